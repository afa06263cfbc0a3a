#pragma once

// Classification datasets and the similarity-based non-iid partitioner.
// A client's share is s% uniform-random draws plus (100-s)% taken from a
// label-sorted stream, which is what turns the similarity knob into label
// skew.

#include <cstdint>
#include <string>
#include <vector>

#include "fedsim/vec.hpp"

namespace fedsim {

struct Dataset {
    std::vector<Vec> features;  // n rows, feature_dim columns
    std::vector<int> labels;    // class ids in [0, num_classes)
    int num_classes = 0;

    std::size_t size() const { return labels.size(); }
    std::size_t feature_dim() const { return features.empty() ? 0 : features.front().size(); }
};

/// Balanced multiclass point clouds: one Gaussian cluster per class with
/// unit noise around well-separated means. Deterministic given the seed.
Dataset make_synthetic_classification(int n, int d, int num_classes, std::uint64_t seed);

/// Header-free CSV: d feature columns then one integer label column.
Dataset load_csv_dataset(const std::string& path);
void save_csv_dataset(const Dataset& data, const std::string& path);

/// Index partition for N clients at s% similarity. Every example is assigned
/// exactly once; deterministic given the seed.
std::vector<std::vector<int>> similarity_partition(const Dataset& data, double s_percent,
                                                   int num_clients, std::uint64_t seed);

/// Mean over clients of the label entropy (nats) of their shard.
double mean_label_entropy(const Dataset& data, const std::vector<std::vector<int>>& parts);

}  // namespace fedsim
