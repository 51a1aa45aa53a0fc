// Acceptance gate: runs every criterion and prints one line per result.
// Exit status 0 only when all of them pass.

#include <oscilla/runner.hpp>

#include <cstdint>
#include <cstdlib>
#include <cstring>
#include <iostream>

int main(int argc, char** argv) {
  std::uint64_t seed = 20260816ULL;
  std::string out = "acceptance_out";
  for (int i = 1; i < argc; ++i) {
    if (std::strcmp(argv[i], "--seed") == 0 && i + 1 < argc) {
      seed = std::strtoull(argv[++i], nullptr, 10);
    } else if (std::strcmp(argv[i], "--out") == 0 && i + 1 < argc) {
      out = argv[++i];
    } else {
      std::cerr << "usage: acceptance [--seed N] [--out DIR]\n";
      return 2;
    }
  }
  try {
    return oscilla::run_verify(seed, out) ? 0 : 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
