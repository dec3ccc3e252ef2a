// Runs a bundled experiment in-process and prints its report.
//
//   demo_run_config [name]

#include <iostream>

#include "rvlab/rvlab.hpp"

int main(int argc, char** argv) {
  const char* name = argc > 1 ? argv[1] : "spectral_roundtrip";
  try {
    const auto e = rvlab::prepare_experiment(rvlab::catalog_config(name));
    std::cout << rvlab::run_experiment(e).report_text;
  } catch (const rvlab::Error& err) {
    std::cerr << err.what() << "\n";
    return err.is_statistical() ? 3 : 2;
  }
  return 0;
}
