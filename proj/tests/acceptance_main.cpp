// Acceptance runner: one line per criterion, non-zero exit if any criterion fails.

#include <cstdio>
#include <cstring>

#include "affkms/acceptance.hpp"

int main(int argc, char** argv) {
  affkms::acceptance::Options opt;
  for (int i = 1; i < argc; ++i)
    if (std::strcmp(argv[i], "--corrupt-extremal") == 0) opt.corrupt_extremal = true;

  int failed = 0;
  for (int id = 1; id <= static_cast<int>(affkms::acceptance::criteria().size()); ++id) {
    const auto r = affkms::acceptance::run(id, opt);
    std::printf("[%s] criterion %2d: %s (%.2fs, limit %.0fs) -- %s\n", r.passed ? "PASS" : "FAIL", r.id, r.name.c_str(), r.seconds,
                r.limit_seconds, r.detail.c_str());
    std::fflush(stdout);
    if (!r.passed) ++failed;
  }
  std::printf("%d of %zu criteria passed\n", static_cast<int>(affkms::acceptance::criteria().size()) - failed,
              affkms::acceptance::criteria().size());
  return failed == 0 ? 0 : 1;
}
