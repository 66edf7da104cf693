#include "entrocap/registers.hpp"

#include <algorithm>
#include <set>

namespace entrocap {

SubsystemRegister::SubsystemRegister(std::vector<Subsystem> parts) : parts_(std::move(parts)) {
  for (const auto& p : parts_) {
    if (p.label.empty()) throw ValidationError("subsystem label must be non-empty");
    if (p.dim < 1) throw ValidationError("subsystem '" + p.label + "' has dim < 1");
  }
  std::sort(parts_.begin(), parts_.end(),
            [](const Subsystem& a, const Subsystem& b) { return a.label < b.label; });
  for (size_t i = 1; i < parts_.size(); ++i) {
    if (parts_[i].label == parts_[i - 1].label)
      throw ValidationError("duplicate subsystem label '" + parts_[i].label + "'");
  }
}

SubsystemRegister SubsystemRegister::single(const std::string& label, int dim) {
  return SubsystemRegister({{label, dim}});
}

long SubsystemRegister::total_dim() const {
  long d = 1;
  for (const auto& p : parts_) d *= p.dim;
  return d;
}

bool SubsystemRegister::has(const std::string& label) const { return index_of(label) >= 0; }

int SubsystemRegister::index_of(const std::string& label) const {
  for (size_t i = 0; i < parts_.size(); ++i)
    if (parts_[i].label == label) return static_cast<int>(i);
  return -1;
}

int SubsystemRegister::dim_of(const std::string& label) const {
  int i = index_of(label);
  if (i < 0) throw ValidationError("no subsystem labeled '" + label + "'");
  return parts_[i].dim;
}

std::vector<std::string> SubsystemRegister::labels() const {
  std::vector<std::string> out;
  out.reserve(parts_.size());
  for (const auto& p : parts_) out.push_back(p.label);
  return out;
}

std::vector<int> SubsystemRegister::dims() const {
  std::vector<int> out;
  out.reserve(parts_.size());
  for (const auto& p : parts_) out.push_back(p.dim);
  return out;
}

SubsystemRegister SubsystemRegister::merged(const SubsystemRegister& other) const {
  std::vector<Subsystem> all = parts_;
  for (const auto& p : other.parts_) {
    if (has(p.label)) throw ValidationError("label collision on '" + p.label + "'");
    all.push_back(p);
  }
  return SubsystemRegister(std::move(all));
}

SubsystemRegister SubsystemRegister::subset(const std::vector<std::string>& keep) const {
  std::vector<Subsystem> sel;
  std::set<std::string> seen;
  for (const auto& l : keep) {
    if (!seen.insert(l).second) throw ValidationError("repeated label '" + l + "' in subset");
    int i = index_of(l);
    if (i < 0) throw ValidationError("no subsystem labeled '" + l + "'");
    sel.push_back(parts_[i]);
  }
  return SubsystemRegister(std::move(sel));
}

SubsystemRegister SubsystemRegister::without(const std::vector<std::string>& drop) const {
  std::set<std::string> dropset;
  for (const auto& l : drop) {
    if (!has(l)) throw ValidationError("no subsystem labeled '" + l + "'");
    dropset.insert(l);
  }
  std::vector<Subsystem> sel;
  for (const auto& p : parts_)
    if (!dropset.count(p.label)) sel.push_back(p);
  return SubsystemRegister(std::move(sel));
}

}  // namespace entrocap
