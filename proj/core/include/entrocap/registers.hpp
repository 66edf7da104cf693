#pragma once

#include "entrocap/types.hpp"

#include <string>
#include <vector>

namespace entrocap {

struct Subsystem {
  std::string label;
  int dim = 0;
  bool operator==(const Subsystem&) const = default;
};

// Ordered collection of labeled subsystems. The order is canonicalized at
// construction (ascending by label) so that any two registers over the same
// labels agree on the index layout. Row-major mixed radix: the first
// subsystem is the most significant digit.
class SubsystemRegister {
 public:
  SubsystemRegister() = default;
  explicit SubsystemRegister(std::vector<Subsystem> parts);

  static SubsystemRegister single(const std::string& label, int dim);

  int size() const { return static_cast<int>(parts_.size()); }
  const Subsystem& part(int i) const { return parts_.at(i); }
  const std::vector<Subsystem>& parts() const { return parts_; }

  long total_dim() const;
  bool has(const std::string& label) const;
  int index_of(const std::string& label) const;  // -1 if absent
  int dim_of(const std::string& label) const;    // throws if absent
  std::vector<std::string> labels() const;
  std::vector<int> dims() const;

  // Disjoint union; throws ValidationError on label collision.
  SubsystemRegister merged(const SubsystemRegister& other) const;
  // Sub-register keeping exactly `keep` (must all be present).
  SubsystemRegister subset(const std::vector<std::string>& keep) const;
  // Sub-register dropping `drop` (must all be present).
  SubsystemRegister without(const std::vector<std::string>& drop) const;

  bool operator==(const SubsystemRegister&) const = default;

 private:
  std::vector<Subsystem> parts_;
};

}  // namespace entrocap
