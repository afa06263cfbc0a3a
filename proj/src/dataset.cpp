#include "fedsim/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numeric>
#include <sstream>

#include "fedsim/errors.hpp"
#include "fedsim/rng.hpp"

namespace fedsim {

namespace {
// Class means sit on a sphere of radius kClusterRadius; the per-coordinate
// noise scales are log-spaced up to kNoiseScaleMax. The anisotropy keeps the
// classes linearly separable with margin while making the one-step
// mean-direction classifier clearly suboptimal, so training curves span many
// rounds instead of collapsing after a single update. Mean directions are
// partially whitened (biased toward low-noise coordinates) so the separation
// margin survives the noise anisotropy on every seed.
constexpr double kClusterRadius = 4.0;
constexpr double kNoiseScaleMax = 12.0;
constexpr double kMeanWhitening = 0.35;
}  // namespace

Dataset make_synthetic_classification(int n, int d, int num_classes, std::uint64_t seed) {
    if (num_classes < 2) throw ParameterError("make_synthetic_classification: need C >= 2");
    if (n < num_classes) throw ParameterError("make_synthetic_classification: need n >= C");
    if (d < 2) throw ParameterError("make_synthetic_classification: need d >= 2");

    CounterRng rng = make_stream(seed, 0, 0, 0, RngLane::DataGen);

    std::vector<double> noise_scale(static_cast<std::size_t>(d));
    for (int j = 0; j < d; ++j) {
        const double t = static_cast<double>(j) / static_cast<double>(d - 1);
        noise_scale[static_cast<std::size_t>(j)] = std::exp(t * std::log(kNoiseScaleMax));
    }

    std::vector<Vec> means(static_cast<std::size_t>(num_classes));
    for (auto& m : means) {
        m.resize(static_cast<std::size_t>(d));
        double sq = 0.0;
        do {
            for (int j = 0; j < d; ++j) {
                const double damp =
                    std::pow(noise_scale[static_cast<std::size_t>(j)], -kMeanWhitening);
                m[static_cast<std::size_t>(j)] = damp * rng.next_gaussian();
            }
            sq = squared_norm(m);
        } while (sq < 1e-12);
        const double scale = kClusterRadius / std::sqrt(sq);
        for (double& v : m) v *= scale;
    }

    // Round-robin labels give a histogram balanced to within +-1; the row
    // order is then shuffled so the raw file carries no label structure.
    Dataset data;
    data.num_classes = num_classes;
    data.features.resize(static_cast<std::size_t>(n));
    data.labels.resize(static_cast<std::size_t>(n));
    std::vector<int> order(static_cast<std::size_t>(n));
    std::iota(order.begin(), order.end(), 0);
    shuffle(order, rng);
    for (int i = 0; i < n; ++i) {
        const int label = i % num_classes;
        Vec x = means[static_cast<std::size_t>(label)];
        for (int j = 0; j < d; ++j)
            x[static_cast<std::size_t>(j)] +=
                noise_scale[static_cast<std::size_t>(j)] * rng.next_gaussian();
        data.features[static_cast<std::size_t>(order[static_cast<std::size_t>(i)])] = std::move(x);
        data.labels[static_cast<std::size_t>(order[static_cast<std::size_t>(i)])] = label;
    }
    return data;
}

Dataset load_csv_dataset(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("load_csv_dataset: cannot open " + path);
    Dataset data;
    std::string line;
    std::size_t expected_cols = 0;
    int max_label = -1;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::stringstream ss(line);
        std::string cell;
        std::vector<double> row;
        while (std::getline(ss, cell, ',')) row.push_back(std::stod(cell));
        if (row.size() < 2) throw IoError("load_csv_dataset: row needs >= 2 columns");
        if (expected_cols == 0) expected_cols = row.size();
        if (row.size() != expected_cols) throw IoError("load_csv_dataset: ragged rows");
        const double raw_label = row.back();
        row.pop_back();
        const int label = static_cast<int>(std::llround(raw_label));
        if (label < 0 || std::abs(raw_label - label) > 1e-9)
            throw IoError("load_csv_dataset: label column must hold non-negative integers");
        max_label = std::max(max_label, label);
        data.features.push_back(Vec(row.begin(), row.end()));
        data.labels.push_back(label);
    }
    if (data.labels.empty()) throw IoError("load_csv_dataset: empty dataset");
    data.num_classes = max_label + 1;
    return data;
}

void save_csv_dataset(const Dataset& data, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw IoError("save_csv_dataset: cannot open " + path);
    char buf[64];
    for (std::size_t i = 0; i < data.size(); ++i) {
        for (double v : data.features[i]) {
            std::snprintf(buf, sizeof(buf), "%.17g", v);
            out << buf << ',';
        }
        out << data.labels[i] << '\n';
    }
}

std::vector<std::vector<int>> similarity_partition(const Dataset& data, double s_percent,
                                                   int num_clients, std::uint64_t seed) {
    const int n = static_cast<int>(data.size());
    if (num_clients < 1) throw ParameterError("similarity_partition: need N >= 1");
    if (n < num_clients) throw ParameterError("similarity_partition: fewer examples than clients");
    if (s_percent < 0.0 || s_percent > 100.0)
        throw ParameterError("similarity_partition: s must lie in [0, 100]");

    CounterRng rng = make_stream(seed, 0, 0, 0, RngLane::Split);
    std::vector<int> order(static_cast<std::size_t>(n));
    std::iota(order.begin(), order.end(), 0);
    shuffle(order, rng);

    // Per-client quotas, then iid shares via largest remainder so the two
    // pools partition the dataset exactly.
    std::vector<int> quota(static_cast<std::size_t>(num_clients), n / num_clients);
    for (int j = 0; j < n % num_clients; ++j) quota[static_cast<std::size_t>(j)]++;

    const double frac = s_percent / 100.0;
    std::vector<int> iid_share(static_cast<std::size_t>(num_clients));
    std::vector<std::pair<double, int>> remainder;
    int assigned = 0;
    for (int j = 0; j < num_clients; ++j) {
        const double target = quota[static_cast<std::size_t>(j)] * frac;
        iid_share[static_cast<std::size_t>(j)] = static_cast<int>(std::floor(target));
        assigned += iid_share[static_cast<std::size_t>(j)];
        remainder.emplace_back(target - std::floor(target), j);
    }
    int iid_total = static_cast<int>(std::llround(n * frac));
    std::sort(remainder.begin(), remainder.end(), [](const auto& a, const auto& b) {
        if (a.first != b.first) return a.first > b.first;
        return a.second < b.second;
    });
    for (std::size_t t = 0; assigned < iid_total && t < remainder.size(); ++t) {
        iid_share[static_cast<std::size_t>(remainder[t].second)]++;
        assigned++;
    }

    // First iid_total shuffled examples form the iid pool; the rest are
    // sorted by label (stable, so ties keep the shuffled order).
    std::vector<int> iid_pool(order.begin(), order.begin() + iid_total);
    std::vector<int> sorted_pool(order.begin() + iid_total, order.end());
    std::stable_sort(sorted_pool.begin(), sorted_pool.end(), [&](int a, int b) {
        return data.labels[static_cast<std::size_t>(a)] < data.labels[static_cast<std::size_t>(b)];
    });

    std::vector<std::vector<int>> parts(static_cast<std::size_t>(num_clients));
    std::size_t iid_pos = 0, sorted_pos = 0;
    for (int j = 0; j < num_clients; ++j) {
        auto& part = parts[static_cast<std::size_t>(j)];
        const int take_iid = iid_share[static_cast<std::size_t>(j)];
        const int take_sorted = quota[static_cast<std::size_t>(j)] - take_iid;
        for (int t = 0; t < take_iid; ++t) part.push_back(iid_pool[iid_pos++]);
        for (int t = 0; t < take_sorted; ++t) part.push_back(sorted_pool[sorted_pos++]);
    }
    return parts;
}

double mean_label_entropy(const Dataset& data, const std::vector<std::vector<int>>& parts) {
    if (parts.empty()) throw ParameterError("mean_label_entropy: no clients");
    double total = 0.0;
    for (const auto& part : parts) {
        if (part.empty()) continue;
        std::vector<int> counts(static_cast<std::size_t>(data.num_classes), 0);
        for (int idx : part) counts[static_cast<std::size_t>(data.labels[static_cast<std::size_t>(idx)])]++;
        double h = 0.0;
        for (int c : counts) {
            if (c == 0) continue;
            const double p = static_cast<double>(c) / static_cast<double>(part.size());
            h -= p * std::log(p);
        }
        total += h;
    }
    return total / static_cast<double>(parts.size());
}

}  // namespace fedsim
