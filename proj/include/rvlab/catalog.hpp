#pragma once

// Bundled experiment configs. Each is plain config text, so `rvlab list
// --show NAME > my.toml` gives an editable starting point.

#include <algorithm>
#include <string>
#include <string_view>
#include <vector>

#include "rvlab/config.hpp"
#include "rvlab/error.hpp"

namespace rvlab {

struct CatalogEntry {
  std::string_view name;
  std::string_view summary;
  std::string_view text;
};

inline const std::vector<CatalogEntry>& catalog() {
  static const std::vector<CatalogEntry> entries = {
      {"moduli2_ladder", "i.i.d. Pareto(1) pair: survival closed forms and hidden-RV ladder indices", R"toml(name = "moduli2_ladder"
description = "i.i.d. Pareto(1) pair: P{tau > t} against closed forms at t = 5, 10, 20 and Hill indices along max >= beta* >= beta >= min"
seed = 20240101
n = 10_000_000

[generator]
type = "pareto_iid"
alpha = 1
dim = 2

[analysis]
kind = "hidden_ladder"
ladder = ["max_abs", "beta_star(0.25)", "beta_min(0.25)", "min_abs", "beta_min(0.5)"]
expected_indices = [1, 1.3333333333333333, 2, 2]
index_tolerance = 0.07
t_probes = [5, 10, 20]
)toml"},
      {"frechet_mda", "Pareto(1) maxima: P{max/n <= x} against exp(-1/x)", R"toml(name = "frechet_mda"
description = "maxima of n = 10^4 Pareto(1) variables normed by a_n = n"
seed = 3
n = 10_000
reps = 100_000

[generator]
type = "pareto"
alpha = 1

[analysis]
kind = "mda"
family = "frechet"
probes = [0.5, 1, 2]
)toml"},
      {"weibull_mda", "reflected Pareto maxima: P{n(max - a) <= -y} against exp(-y)", R"toml(name = "weibull_mda"
description = "X = a - 1/xi, xi Pareto(1): maxima under the transform y -> a + (y - a)/t"
seed = 4
n = 10_000
reps = 100_000

[generator]
type = "reflected_pareto"
alpha = 1
endpoint = 0

[analysis]
kind = "mda"
family = "weibull"
probes = [0.5, 1, 2]
)toml"},
      {"gumbel_mda", "log-Pareto maxima: P{max - log n <= u} against exp(-exp(-u))", R"toml(name = "gumbel_mda"
description = "X = log xi, xi Pareto(1): maxima under the transform y -> y + log t"
seed = 5
n = 10_000
reps = 100_000

[generator]
type = "log_pareto"
alpha = 1

[analysis]
kind = "mda"
family = "gumbel"
probes = [-1, 0, 1]
)toml"},
      {"void_poisson", "void probabilities of (s, inf) and the count law of (1, inf)", R"toml(name = "void_poisson"
description = "points X_i / n of n = 10^4 Pareto(1) variables: void frequencies against exp(-1/s), count law against Poisson(1)"
seed = 6
n = 10_000
reps = 100_000

[generator]
type = "pareto"
alpha = 1

[analysis]
kind = "void_prob"
set_s = [0.5, 1, 2]
count_law_set = 1
tv_tolerance = 0.01
)toml"},
      {"breiman_uniform", "xi Pareto(1) times W uniform on [1, 2]: t P{xi W > t} against E W = 1.5", R"toml(name = "breiman_uniform"
description = "product of a Pareto(1) variable and an independent uniform[1, 2] factor"
seed = 7
n = 10_000_000

[generator]
type = "pareto"
alpha = 1

[analysis]
kind = "breiman"
t_ladder = [20, 50]
w_samples = 1_000_000

[analysis.eta]
kind = "independent"

[analysis.eta.w]
type = "uniform"
lo = 1
hi = 2
)toml"},
      {"breiman_clt", "Y^(3/2) times a normalised Gaussian partial sum: tail index 2/3", R"toml(name = "breiman_clt"
description = "Y Pareto(1), Y^gamma sum_{i <= Y} zeta_i with gamma = 1, written as xi = Y^(3/2) times eta_xi"
seed = 8
n = 10_000_000

[generator]
type = "pareto"
alpha = 0.6666666666666666

[analysis]
kind = "breiman"
t_ladder = [20, 50]
check_constant = false
expected_index = 0.6666666666666666
index_tolerance = 0.07

[analysis.eta]
kind = "clt"
sigma = 1
power = 1.5
)toml"},
      {"spectral_roundtrip", "two-atom spectral measure recovered above the 0.999 quantile", R"toml(name = "spectral_roundtrip"
description = "R U with R Pareto(1.5) and U on the max-abs sphere with weights 0.3 and 0.7"
seed = 9
n = 1_000_000

[generator]
type = "spectral_rv"
alpha = 1.5
reference = "max_abs"
atoms = [[1, 0.4], [0.25, 1]]
weights = [0.3, 0.7]

[analysis]
kind = "spectral"
modulus = "max_abs"
quantile = 0.999
)toml"},
      {"change_modulus", "change of modulus for three random atoms and a random positive linear functional", R"toml(name = "change_modulus"
description = "mass of {ell > 1} after the change of modulus against sum w ell(u)^alpha, and against simulation"
seed = 10
n = 2_000_000

[analysis]
kind = "change_modulus"
random_atoms = 3
dim = 3
alpha = 1.5
ell = "random_linear"
t_ladder = [5, 20]
)toml"},
      {"cumulative_assembly", "tail measure assembled from per-coordinate parts against the direct empirical measure", R"toml(name = "cumulative_assembly"
description = "i.i.d. Pareto(1) pair, a = 1: segment measure from the coordinate moduli on 8 polar rectangles"
seed = 11
n = 4_000_000

[generator]
type = "pareto_iid"
alpha = 1
dim = 2

[analysis]
kind = "assembly"
a = 1
level = 1000
cones = [[0, 0.5, 1], [1, 0.5, 1]]
set_s = [1, 2, 4, 1, 1, 2, 4, 1]
set_t = [2, 4, inf, inf, 2, 4, inf, inf]
set_cone = [0, 0, 0, 0, 1, 1, 1, 1]
)toml"},
      {"dombry_ribatet", "ell(x) = x_0 1{x_1 = 0}: exceedance ratio a^-2 while max_abs has index 1", R"toml(name = "dombry_ribatet"
description = "zeta (eta, 1) + (1 - zeta)(sqrt(eta), 0): the discontinuous ell sees index 2"
seed = 12
n = 2_000_000

[generator]
type = "dombry_ribatet"
alpha = 1

[analysis]
kind = "conditional_limit"
tau = "max_abs"
ell = "coord_if_axis(0)"
t_ladder = [5, 10, 20]
ratio_levels = [2, 4]
ratio_index = 2
expect_index_mismatch = true
)toml"},
      {"pareto_tail_index", "Hill estimate for Pareto(2)", R"toml(name = "pareto_tail_index"
description = "Hill plot for a Pareto(2) sample"
seed = 13
n = 1_000_000

[generator]
type = "pareto"
alpha = 2

[analysis]
kind = "tail_index"
target_alpha = 2
)toml"},
      {"moving_max_tail_process", "tail process of a moving maximum against its closed form", R"toml(name = "moving_max_tail_process"
description = "X_k = max_j w_j Z_{k-j}, Z Pareto(1), w = (1, 0.5, 0.25)"
seed = 14
n = 1_000_000

[generator]
type = "moving_max"
alpha = 1
length = 8
weights = [1, 0.5, 0.25]

[analysis]
kind = "tail_process"
t_ladder = [100, 1000]
max_lag = 2
xs = [0.25, 0.5, 1]
)toml"},
      {"broken_line_functions", "finite-dimensional indices and oscillation decay for broken lines", R"toml(name = "broken_line_functions"
description = "random broken lines on [0, 1] with Pareto(1) nodes"
seed = 15
n = 200_000

[generator]
type = "broken_line"
alpha = 1
grid = 65

[analysis]
kind = "function_diag"
gamma_grids = [[0.25, 0.5, 0.75]]
eps_ladder = [0.2, 0.1, 0.05]
delta = 0.5
t_ladder = [10, 100]
target_alpha = 1
expect_decay = true
)toml"},
      {"janossy_binomial", "first Janossy measure of 3 i.i.d. Pareto(1) points in the plane", R"toml(name = "janossy_binomial"
description = "binomial process with m = 3 points: g(t) E[f; eta(T_t B) = 1] against m mu'(A)"
seed = 16
n = 200_000

[generator]
type = "binomial_pp"
m = 3

[generator.point]
type = "pareto_iid"
alpha = 1
dim = 2

[analysis]
kind = "janossy"
base = "max_abs"
t_ladder = [10, 100]
probe_moduli = ["max_abs", "coord_abs(0)"]
probe_levels = [2, 2]
probe_targets = [3, 1.5]
g_alpha = 1
)toml"},
      {"hull_set_pipeline", "set functionals of convex hulls of 3 i.i.d. Pareto(1) points", R"toml(name = "hull_set_pipeline"
description = "hulls of three Pareto(1) pairs: Steiner containment, homogeneity and tail indices"
seed = 17
n = 100_000

[generator]
type = "convex_hull"
m = 3

[generator.point]
type = "pareto_iid"
alpha = 1
dim = 2

[analysis]
kind = "set_pipeline"
functionals = ["set_sup", "steiner", "mean_width"]
target_alpha = 1
steiner_t_ladder = [100, 500]
)toml"},
      {"poisson_counts", "count laws of disjoint radial sets and their covariance", R"toml(name = "poisson_counts"
description = "counts of X_i / n in (1, 2] and (2, inf] for n = 1000 Pareto(1) variables"
seed = 18
n = 1000
reps = 20_000

[generator]
type = "pareto"
alpha = 1

[analysis]
kind = "poisson_counts"
set_s = [1, 2]
set_t = [2, inf]
tv_tolerance = 0.01
)toml"},
  };
  return entries;
}

inline const CatalogEntry* find_catalog_entry(std::string_view name) {
  const auto& c = catalog();
  const auto it = std::find_if(c.begin(), c.end(), [&](const CatalogEntry& e) { return e.name == name; });
  return it == c.end() ? nullptr : &*it;
}

inline Json catalog_config(std::string_view name) {
  const auto* e = find_catalog_entry(name);
  if (e == nullptr) fail(ErrorCode::Config, "config: no bundled experiment named '" + std::string(name) + "'");
  return parse_config_text(e->text);
}

}  // namespace rvlab
