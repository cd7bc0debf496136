#pragma once

#include <span>
#include <vector>

#include <json.hpp>

#include "autohybrid/dataset.hpp"
#include "autohybrid/random.hpp"

namespace autohybrid::learners {

struct TreeNode {
    int feature = -1;        // -1 marks a leaf
    double threshold = 0.0;  // x <= threshold goes left
    int left = -1;
    int right = -1;
    double value = 0.0;

    friend bool operator==(const TreeNode&, const TreeNode&) = default;
};

class RegressionTree {
public:
    RegressionTree() = default;
    explicit RegressionTree(std::vector<TreeNode> nodes) : nodes_(std::move(nodes)) {}

    double predict_row(const Matrix& X, Eigen::Index row) const;
    const std::vector<TreeNode>& nodes() const noexcept { return nodes_; }

    nlohmann::json to_json() const;
    static RegressionTree from_json(const nlohmann::json& j);

private:
    std::vector<TreeNode> nodes_;
};

/// Row indices of each column sorted by value (ties by row). Computed once per
/// ensemble and shared by all of its trees.
class SortedColumns {
public:
    explicit SortedColumns(const Matrix& X);
    std::span<const int> order(Eigen::Index feature) const { return order_[static_cast<std::size_t>(feature)]; }

private:
    std::vector<std::vector<int>> order_;
};

struct TreeOptions {
    int max_depth = -1;          // -1: unbounded
    int features_per_split = 0;  // 0: all features
    double min_leaf_weight = 1.0;
};

/// CART variance-reduction tree grown level by level over presorted columns.
/// `weights` are per-row multiplicities (bootstrap counts); zero-weight rows are ignored.
RegressionTree grow_tree(const Matrix& X, const SortedColumns& sorted, const Vector& target,
                         std::span<const double> weights, const TreeOptions& options, Rng& rng);

} // namespace autohybrid::learners
