#pragma once

// Multinomial logistic regression over a shard of a shared dataset. The
// parameter vector packs one (weights, bias) block per class; the stochastic
// oracle is a fresh without-replacement minibatch per local step.

#include <cstdint>
#include <memory>
#include <vector>

#include "fedsim/dataset.hpp"
#include "fedsim/objective.hpp"

namespace fedsim {

struct LogisticConfig {
    double l2 = 0.0;              // ridge strength lambda
    double batch_fraction = 0.2;  // minibatch size as a fraction of the shard
};

class LogisticObjective : public Objective {
public:
    LogisticObjective(std::shared_ptr<const Dataset> data, std::vector<int> indices,
                      LogisticConfig cfg);

    std::size_t dim() const override;  // num_classes * (feature_dim + 1)
    double value(const Vec& x) const override;
    Vec exact_gradient(const Vec& x) const override;
    Vec sample_gradient(const Vec& x, CounterRng& rng) const override;

    std::size_t shard_size() const { return indices_.size(); }

private:
    Vec gradient_over(const Vec& x, const std::vector<int>& rows) const;

    std::shared_ptr<const Dataset> data_;
    std::vector<int> indices_;
    LogisticConfig cfg_;
    int batch_size_ = 1;
};

/// Fraction of rows whose argmax class matches the label.
double classification_accuracy(const Dataset& data, const Vec& x);

/// Clients from a similarity split of `data`, plus a whole-dataset train
/// accuracy functor on the family.
ObjectiveFamily split_by_similarity(std::shared_ptr<const Dataset> data, double s_percent,
                                    int num_clients, std::uint64_t seed,
                                    const LogisticConfig& cfg = {});

}  // namespace fedsim
