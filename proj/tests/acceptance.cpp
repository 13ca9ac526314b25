#include <cstdlib>
#include <cstring>
#include <iostream>
#include <thread>

#include "fnls/cli_harness.hpp"

int main(int argc, char** argv) {
  fnls::Suite suite = fnls::Suite::Full;
  if (argc > 1 && std::strcmp(argv[1], "--smoke") == 0) suite = fnls::Suite::Smoke;
  const std::size_t workers = std::max(1u, std::thread::hardware_concurrency());
  const auto results = fnls::verify_all(suite, {}, workers, 1);
  bool ok = true;
  for (const auto& r : results) {
    std::cout << "criterion " << r.id << ": " << fnls::to_string(r.verdict) << "  " << r.title << "  [" << r.seconds
              << " s]  " << r.detail << "\n";
    ok = ok && r.verdict == fnls::Verdict::Pass;
  }
  return ok ? EXIT_SUCCESS : EXIT_FAILURE;
}
