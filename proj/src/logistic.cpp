#include "fedsim/logistic.hpp"

#include <algorithm>
#include <cmath>

#include "fedsim/errors.hpp"

namespace fedsim {

namespace {

// Stable softmax probabilities for one example.
void softmax_probs(const Vec& x, const Vec& feat, int num_classes, std::vector<double>& probs) {
    const std::size_t d = feat.size();
    const std::size_t block = d + 1;
    probs.resize(static_cast<std::size_t>(num_classes));
    double max_logit = -1e300;
    for (int c = 0; c < num_classes; ++c) {
        const double* w = x.data() + static_cast<std::size_t>(c) * block;
        double z = w[d];  // bias
        for (std::size_t j = 0; j < d; ++j) z += w[j] * feat[j];
        probs[static_cast<std::size_t>(c)] = z;
        max_logit = std::max(max_logit, z);
    }
    double denom = 0.0;
    for (double& p : probs) {
        p = std::exp(p - max_logit);
        denom += p;
    }
    for (double& p : probs) p /= denom;
}

}  // namespace

LogisticObjective::LogisticObjective(std::shared_ptr<const Dataset> data, std::vector<int> indices,
                                     LogisticConfig cfg)
    : data_(std::move(data)), indices_(std::move(indices)), cfg_(cfg) {
    if (!data_ || data_->size() == 0) throw ParameterError("LogisticObjective: empty dataset");
    if (indices_.empty()) throw ParameterError("LogisticObjective: empty shard");
    if (cfg_.l2 < 0.0) throw ParameterError("LogisticObjective: l2 must be >= 0");
    if (cfg_.batch_fraction <= 0.0 || cfg_.batch_fraction > 1.0)
        throw ParameterError("LogisticObjective: batch_fraction must lie in (0, 1]");
    for (int idx : indices_) {
        if (idx < 0 || static_cast<std::size_t>(idx) >= data_->size())
            throw ParameterError("LogisticObjective: shard index out of range");
    }
    batch_size_ = std::max(
        1, static_cast<int>(std::llround(cfg_.batch_fraction * static_cast<double>(indices_.size()))));
}

std::size_t LogisticObjective::dim() const {
    return static_cast<std::size_t>(data_->num_classes) * (data_->feature_dim() + 1);
}

double LogisticObjective::value(const Vec& x) const {
    if (x.size() != dim()) throw DimensionError("LogisticObjective::value");
    const int C = data_->num_classes;
    std::vector<double> probs;
    double loss = 0.0;
    for (int idx : indices_) {
        const auto row = static_cast<std::size_t>(idx);
        softmax_probs(x, data_->features[row], C, probs);
        const double p = probs[static_cast<std::size_t>(data_->labels[row])];
        loss -= std::log(std::max(p, 1e-300));
    }
    loss /= static_cast<double>(indices_.size());
    return loss + 0.5 * cfg_.l2 * squared_norm(x);
}

Vec LogisticObjective::gradient_over(const Vec& x, const std::vector<int>& rows) const {
    if (x.size() != dim()) throw DimensionError("LogisticObjective::gradient");
    const int C = data_->num_classes;
    const std::size_t d = data_->feature_dim();
    const std::size_t block = d + 1;
    Vec grad = zeros(x.size());
    std::vector<double> probs;
    for (int idx : rows) {
        const auto row = static_cast<std::size_t>(idx);
        const Vec& feat = data_->features[row];
        softmax_probs(x, feat, C, probs);
        probs[static_cast<std::size_t>(data_->labels[row])] -= 1.0;
        for (int c = 0; c < C; ++c) {
            double* g = grad.data() + static_cast<std::size_t>(c) * block;
            const double coeff = probs[static_cast<std::size_t>(c)];
            for (std::size_t j = 0; j < d; ++j) g[j] += coeff * feat[j];
            g[d] += coeff;
        }
    }
    const double inv = 1.0 / static_cast<double>(rows.size());
    for (std::size_t i = 0; i < grad.size(); ++i) grad[i] = grad[i] * inv + cfg_.l2 * x[i];
    return grad;
}

Vec LogisticObjective::exact_gradient(const Vec& x) const { return gradient_over(x, indices_); }

Vec LogisticObjective::sample_gradient(const Vec& x, CounterRng& rng) const {
    const int n = static_cast<int>(indices_.size());
    if (batch_size_ >= n) return exact_gradient(x);
    const std::vector<int> picks = sample_without_replacement(n, batch_size_, rng);
    std::vector<int> rows;
    rows.reserve(picks.size());
    for (int p : picks) rows.push_back(indices_[static_cast<std::size_t>(p)]);
    return gradient_over(x, rows);
}

double classification_accuracy(const Dataset& data, const Vec& x) {
    const int C = data.num_classes;
    const std::size_t expect = static_cast<std::size_t>(C) * (data.feature_dim() + 1);
    if (x.size() != expect) throw DimensionError("classification_accuracy: model dimension");
    std::vector<double> probs;
    std::size_t correct = 0;
    for (std::size_t i = 0; i < data.size(); ++i) {
        softmax_probs(x, data.features[i], C, probs);
        const auto arg = static_cast<int>(
            std::max_element(probs.begin(), probs.end()) - probs.begin());
        if (arg == data.labels[i]) correct++;
    }
    return static_cast<double>(correct) / static_cast<double>(data.size());
}

ObjectiveFamily split_by_similarity(std::shared_ptr<const Dataset> data, double s_percent,
                                    int num_clients, std::uint64_t seed,
                                    const LogisticConfig& cfg) {
    if (!data) throw ParameterError("split_by_similarity: null dataset");
    const auto parts = similarity_partition(*data, s_percent, num_clients, seed);
    ObjectiveFamily family;
    family.clients.reserve(parts.size());
    for (const auto& part : parts) {
        family.clients.push_back(std::make_shared<LogisticObjective>(data, part, cfg));
    }
    family.accuracy = [data](const Vec& x) { return classification_accuracy(*data, x); };
    return family;
}

}  // namespace fedsim
