#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <vector>

#include "astroturf/rng.hpp"

namespace astroturf {

/// Single-feature Isolation Forest over per-minute tweet counts.
///
/// Each tree partitions a random subsample by splitting at a uniform random
/// value strictly between the node's min and max until points are isolated
/// or the depth limit ceil(log2(subsample)) is reached. Anomalies isolate in
/// few splits, so their expected path length is short.

struct ForestParams {
    int tree_count = 100;
    int subsample_size = 256;
    double outlier_factor = 0.02; // fraction of windows treated as anomalous
    std::uint64_t seed = 0;
};

/// Average unsuccessful-search path length in a BST of n nodes, the
/// normalizer of the anomaly score: c(n) = 2 H(n-1) - 2(n-1)/n with
/// H(i) ~ ln(i) + Euler's constant. c(0) = c(1) = 0.
inline double average_path_length(std::int64_t n) {
    if (n <= 1) return 0.0;
    constexpr double kEulerGamma = 0.5772156649;
    const double m = static_cast<double>(n);
    return 2.0 * (std::log(m - 1.0) + kEulerGamma) - 2.0 * (m - 1.0) / m;
}

/// Anomaly score from a mean path length over trees: s = 2^(-E[h]/c(n)).
/// E[h] = c(n) maps to exactly 0.5; shorter paths push toward 1.
inline double anomaly_score_from_path(double mean_path, std::int64_t trained_size) {
    const double c = average_path_length(trained_size);
    if (c <= 0.0) return 0.5;
    return std::pow(2.0, -mean_path / c);
}

class IsolationForest {
public:
    /// Fits tree_count trees on seeded subsamples of `samples`. Returns
    /// nullopt when all samples are identical (no split value exists); the
    /// caller maps that to "no anomalies".
    static std::optional<IsolationForest> fit(const std::vector<double>& samples, const ForestParams& params) {
        if (samples.size() < 2) throw std::invalid_argument("isolation forest needs at least 2 samples");
        if (params.tree_count < 1) throw std::invalid_argument("tree_count must be positive");
        if (params.subsample_size < 2) throw std::invalid_argument("subsample_size must be >= 2");
        if (!(params.outlier_factor > 0.0) || params.outlier_factor > 0.5) {
            throw std::invalid_argument("outlier_factor must lie in (0, 0.5]");
        }
        const auto [mn, mx] = std::minmax_element(samples.begin(), samples.end());
        if (*mn == *mx) return std::nullopt;

        IsolationForest forest;
        forest.params_ = params;
        forest.trained_size_ = std::min<std::int64_t>(params.subsample_size, static_cast<std::int64_t>(samples.size()));
        const int depth_limit = static_cast<int>(std::ceil(std::log2(static_cast<double>(forest.trained_size_))));

        Rng root(params.seed);
        std::vector<double> pool(samples);
        std::vector<double> subsample(static_cast<size_t>(forest.trained_size_));
        forest.trees_.reserve(static_cast<size_t>(params.tree_count));
        for (int t = 0; t < params.tree_count; ++t) {
            Rng rng = root.fork(static_cast<std::uint64_t>(t) + 1);
            // Partial Fisher-Yates: the first trained_size_ entries become a
            // uniform subsample without replacement.
            for (std::int64_t i = 0; i < forest.trained_size_; ++i) {
                std::uint64_t j = i + rng.below(pool.size() - static_cast<std::uint64_t>(i));
                std::swap(pool[static_cast<size_t>(i)], pool[j]);
                subsample[static_cast<size_t>(i)] = pool[static_cast<size_t>(i)];
            }
            Tree tree;
            tree.build(subsample, depth_limit, rng);
            forest.trees_.push_back(std::move(tree));
        }
        return forest;
    }

    /// Mean isolation path length of `value` across all trees, including the
    /// c(leaf_size) adjustment at unsplit leaves.
    double mean_path_length(double value) const {
        double total = 0.0;
        for (const auto& tree : trees_) total += tree.path_length(value);
        return total / static_cast<double>(trees_.size());
    }

    /// Anomaly score in (0, 1).
    double score(double value) const {
        return anomaly_score_from_path(mean_path_length(value), trained_size_);
    }

    std::int64_t trained_size() const { return trained_size_; }
    const ForestParams& params() const { return params_; }

private:
    struct Node {
        double split_value = 0.0;
        std::int32_t left = -1;  // node indices; -1 marks a leaf
        std::int32_t right = -1;
        std::int32_t size = 0; // sample count at this node
    };

    struct Tree {
        std::vector<Node> nodes;

        void build(std::vector<double> data, int depth_limit, Rng& rng) {
            nodes.clear();
            build_range(data, 0, data.size(), 0, depth_limit, rng);
        }

        double path_length(double value) const {
            std::int32_t idx = 0;
            double depth = 0.0;
            while (true) {
                const Node& node = nodes[static_cast<size_t>(idx)];
                if (node.left < 0) return depth + average_path_length(node.size);
                depth += 1.0;
                idx = value < node.split_value ? node.left : node.right;
            }
        }

    private:
        std::int32_t build_range(std::vector<double>& data, size_t lo, size_t hi, int depth, int depth_limit, Rng& rng) {
            const std::int32_t idx = static_cast<std::int32_t>(nodes.size());
            nodes.push_back(Node{});
            nodes[static_cast<size_t>(idx)].size = static_cast<std::int32_t>(hi - lo);
            if (hi - lo <= 1 || depth >= depth_limit) return idx;

            double mn = data[lo], mx = data[lo];
            for (size_t i = lo + 1; i < hi; ++i) {
                mn = std::min(mn, data[i]);
                mx = std::max(mx, data[i]);
            }
            if (mn == mx) return idx;

            // Uniform split strictly inside (mn, mx); uniform01 excludes 0,
            // after the guard below the split can equal neither bound.
            double split = mn + (mx - mn) * rng.uniform01();
            while (split <= mn || split >= mx) split = mn + (mx - mn) * rng.uniform01();

            auto mid_it = std::partition(data.begin() + static_cast<std::ptrdiff_t>(lo),
                                         data.begin() + static_cast<std::ptrdiff_t>(hi),
                                         [split](double v) { return v < split; });
            const size_t mid = static_cast<size_t>(mid_it - data.begin());
            const std::int32_t left = build_range(data, lo, mid, depth + 1, depth_limit, rng);
            const std::int32_t right = build_range(data, mid, hi, depth + 1, depth_limit, rng);
            nodes[static_cast<size_t>(idx)].split_value = split;
            nodes[static_cast<size_t>(idx)].left = left;
            nodes[static_cast<size_t>(idx)].right = right;
            return idx;
        }
    };

    std::vector<Tree> trees_;
    std::int64_t trained_size_ = 0;
    ForestParams params_;
};

} // namespace astroturf
