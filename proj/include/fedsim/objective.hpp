#pragma once

// Client loss abstraction. Each client exposes an exact (full-batch) oracle
// and a stochastic oracle driven by an explicit CounterRng stream, so every
// algorithm run is replayable from its stream coordinates.

#include <Eigen/Core>
#include <cstddef>
#include <functional>
#include <memory>
#include <optional>
#include <vector>

#include "fedsim/rng.hpp"
#include "fedsim/vec.hpp"

namespace fedsim {

class Objective {
public:
    virtual ~Objective() = default;

    virtual std::size_t dim() const = 0;
    virtual double value(const Vec& x) const = 0;
    virtual Vec exact_gradient(const Vec& x) const = 0;

    /// Unbiased stochastic gradient. The default adds isotropic Gaussian
    /// noise with per-coordinate variance noise_bound()/dim, so the total
    /// variance meets the bound with equality. noise_bound()==0 returns the
    /// exact gradient bit-for-bit without touching the stream.
    virtual Vec sample_gradient(const Vec& x, CounterRng& rng) const;

    /// Variance bound sigma^2 of the additive-noise oracle. Objectives whose
    /// stochasticity comes from minibatching (logistic) report 0 here; their
    /// sampling noise is a property of the data, not a configured bound.
    virtual double noise_bound() const { return 0.0; }

    virtual bool has_hessian() const { return false; }
    virtual Eigen::MatrixXd hessian() const;
};

struct GradientSample {
    Vec gradient;
    double noise_variance_bound = 0.0;
};

/// Stochastic gradient with finiteness checking and the declared bound attached.
GradientSample noisy_gradient(const Objective& obj, const Vec& x, CounterRng& stream);

/// A federated problem instance: N client objectives plus whatever is known
/// analytically about the average objective f = (1/N) sum f_i.
struct ObjectiveFamily {
    std::vector<std::shared_ptr<const Objective>> clients;
    std::optional<Vec> x_star;       // argmin of f, when known (quadratics)
    std::optional<double> f_star;    // f(x_star), when known
    // Classification families report global train accuracy of a model.
    std::function<double(const Vec&)> accuracy;

    std::size_t num_clients() const { return clients.size(); }
    std::size_t dim() const;

    /// f(x) = (1/N) sum_i f_i(x)
    double value(const Vec& x) const;
    /// exact grad f(x)
    Vec gradient(const Vec& x) const;
    /// f(x) - f_star; NaN when f_star is unknown.
    double suboptimality(const Vec& x) const;
};

}  // namespace fedsim
