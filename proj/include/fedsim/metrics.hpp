#pragma once

// Heterogeneity measurements: first-order (gradient dissimilarity) and
// second-order (Hessian dissimilarity) across a client family.

#include <memory>
#include <vector>

#include "fedsim/objective.hpp"

namespace fedsim {

struct BgdSample {
    double local_sq_mean = 0.0;  // (1/N) sum_i ||grad f_i(x)||^2
    double full_sq = 0.0;        // ||grad f(x)||^2
};

/// Both sides of the bounded-gradient-dissimilarity inequality at one point;
/// the caller fits (G^2, B^2) over a point set.
BgdSample measure_bgd(const std::vector<std::shared_ptr<const Objective>>& clients, const Vec& x);

/// max_i ||A_i - A|| in spectral norm, A the mean Hessian. Requires Hessian
/// access on every client (quadratics).
double measure_bhd(const std::vector<std::shared_ptr<const Objective>>& clients);

}  // namespace fedsim
