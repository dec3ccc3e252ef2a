// Tail indices along the moduli ladder of an i.i.d. Pareto(1) pair, plus the
// closed-form survival functions at a few levels.
//
//   demo_moduli_ladder [n] [seed]

#include <cstdio>
#include <cstdlib>
#include <functional>
#include <vector>

#include "rvlab/rvlab.hpp"

int main(int argc, char** argv) {
  const std::size_t n = argc > 1 ? std::strtoull(argv[1], nullptr, 10) : 1'000'000;
  const std::uint64_t seed = argc > 2 ? std::strtoull(argv[2], nullptr, 10) : 1;
  const auto g = rvlab::make_generator(rvlab::gen::ParetoIID{1.0, 2});
  const std::vector<rvlab::Modulus> ladder = {rvlab::Modulus::max_abs(), rvlab::Modulus::beta_star(0.25),
                                              rvlab::Modulus::beta_min(0.25), rvlab::Modulus::min_abs()};
  std::vector<std::function<std::vector<double>()>> fns;
  for (const auto& m : ladder) fns.emplace_back([&, m] { return rvlab::modulus_sample(*g, m, seed, n); });
  const auto k = rvlab::default_k(n);
  std::printf("%-18s %10s %10s  %s\n", "modulus", "alpha_hat", "stderr", "class");
  for (const auto& e : rvlab::hidden_rv_ladder(fns, ladder, k)) {
    std::printf("%-18s %10.4f %10.4f  %s\n", e.modulus.describe().c_str(), e.hill.alpha_hat, e.hill.std_error,
                rvlab::ladder_class_name(e.classification));
  }
  std::printf("\n%-18s %6s %12s\n", "modulus", "t", "P{tau > t}");
  for (const auto& m : ladder)
    for (double t : {5.0, 10.0, 20.0})
      std::printf("%-18s %6.0f %12.6g\n", m.describe().c_str(), t, *rvlab::pareto_pair_survival(m, t));
  return 0;
}
