// CLI entry point; subcommands are wired up as the library modules land.
int main() { return 0; }
