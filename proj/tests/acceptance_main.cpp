// Acceptance suite runner: one pass/fail line per criterion, nonzero exit on
// any failure.

#include <iostream>

#include "qchan/acceptance.hpp"

int main() {
  qchan::acceptance::SuiteResult suite = qchan::acceptance::run(qchan::default_seed, &std::cout);
  if (!suite.all_pass) {
    std::cerr << "acceptance: at least one criterion failed\n";
    return 1;
  }
  return 0;
}
