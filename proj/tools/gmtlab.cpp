// CLI entry point; subcommands are wired after the library lands.
#include <cstdio>

int main() {
  std::fprintf(stderr, "gmtlab: not wired yet\n");
  return 2;
}
