#include "autohybrid/learners/tree.hpp"

#include <algorithm>
#include <numeric>

#include "autohybrid/error.hpp"

namespace autohybrid::learners {

double RegressionTree::predict_row(const Matrix& X, Eigen::Index row) const {
    std::size_t k = 0;
    while (nodes_[k].feature >= 0) {
        const auto& node = nodes_[k];
        k = static_cast<std::size_t>(X(row, node.feature) <= node.threshold ? node.left
                                                                            : node.right);
    }
    return nodes_[k].value;
}

nlohmann::json RegressionTree::to_json() const {
    // columnar: feature, threshold, left, right, value
    std::vector<int> f, l, r;
    std::vector<double> t, v;
    for (const auto& node : nodes_) {
        f.push_back(node.feature);
        t.push_back(node.threshold);
        l.push_back(node.left);
        r.push_back(node.right);
        v.push_back(node.value);
    }
    return {{"feature", f}, {"threshold", t}, {"left", l}, {"right", r}, {"value", v}};
}

RegressionTree RegressionTree::from_json(const nlohmann::json& j) {
    const auto f = j.at("feature").get<std::vector<int>>();
    const auto t = j.at("threshold").get<std::vector<double>>();
    const auto l = j.at("left").get<std::vector<int>>();
    const auto r = j.at("right").get<std::vector<int>>();
    const auto v = j.at("value").get<std::vector<double>>();
    if (f.empty() || t.size() != f.size() || l.size() != f.size() || r.size() != f.size() ||
        v.size() != f.size())
        throw ParseError("tree blob has inconsistent shapes");
    std::vector<TreeNode> nodes(f.size());
    const auto count = static_cast<int>(f.size());
    for (std::size_t k = 0; k < f.size(); ++k) {
        nodes[k] = TreeNode{f[k], t[k], l[k], r[k], v[k]};
        if (f[k] >= 0 && (l[k] <= static_cast<int>(k) || r[k] <= static_cast<int>(k) ||
                          l[k] >= count || r[k] >= count))
            throw ParseError("tree blob has invalid child links");
    }
    return RegressionTree(std::move(nodes));
}

SortedColumns::SortedColumns(const Matrix& X) {
    order_.resize(static_cast<std::size_t>(X.cols()));
    for (Eigen::Index f = 0; f < X.cols(); ++f) {
        auto& ord = order_[static_cast<std::size_t>(f)];
        ord.resize(static_cast<std::size_t>(X.rows()));
        std::iota(ord.begin(), ord.end(), 0);
        std::stable_sort(ord.begin(), ord.end(),
                         [&](int a, int b) { return X(a, f) < X(b, f); });
    }
}

namespace {

struct OpenNode {
    int node = 0;
    int depth = 0;
    double weight = 0.0;
    double sum = 0.0;
    double sum_sq = 0.0;
    std::vector<char> uses;
    // best split found so far
    double best_gain = 0.0;
    int best_feature = -1;
    double best_threshold = 0.0;
    // scan state for the current feature
    double left_weight = 0.0;
    double left_sum = 0.0;
    double last = 0.0;
    bool has_last = false;
};

double impurity(const OpenNode& o) {
    return o.sum_sq - o.sum * o.sum / o.weight;
}

double midpoint(double lo, double hi) {
    const double mid = lo + (hi - lo) / 2.0;
    return mid < hi ? mid : lo;
}

} // namespace

RegressionTree grow_tree(const Matrix& X, const SortedColumns& sorted, const Vector& target,
                         std::span<const double> weights, const TreeOptions& options, Rng& rng) {
    const auto n = static_cast<std::size_t>(X.rows());
    const auto d = static_cast<int>(X.cols());
    const int mtry = options.features_per_split <= 0 ? d : std::min(d, options.features_per_split);
    const double min_leaf = options.min_leaf_weight;

    std::vector<TreeNode> nodes(1);
    std::vector<int> node_of(n, -1);
    OpenNode root;
    for (std::size_t r = 0; r < n; ++r) {
        const double w = weights[r];
        if (w <= 0.0) continue;
        const double y = target(static_cast<Eigen::Index>(r));
        node_of[r] = 0;
        root.weight += w;
        root.sum += w * y;
        root.sum_sq += w * y * y;
    }
    if (root.weight <= 0.0) return RegressionTree(std::move(nodes));

    std::vector<OpenNode> open;
    open.push_back(std::move(root));
    std::vector<int> slot_of(1, 0);
    std::vector<int> features(static_cast<std::size_t>(d));

    while (!open.empty()) {
        // Leaves are settled first; the remaining nodes draw their candidate features.
        std::vector<char> any_uses(static_cast<std::size_t>(d), 0);
        for (auto& o : open) {
            nodes[static_cast<std::size_t>(o.node)].value = o.sum / o.weight;
            const bool depth_ok = options.max_depth < 0 || o.depth < options.max_depth;
            const double imp = impurity(o);
            const bool splittable =
                depth_ok && o.weight >= 2.0 * min_leaf && imp > 1e-14 * std::max(o.sum_sq, 1e-300);
            o.uses.assign(static_cast<std::size_t>(d), 0);
            if (!splittable) continue;
            std::iota(features.begin(), features.end(), 0);
            for (int k = 0; k < mtry; ++k) {
                std::uniform_int_distribution<int> pick(k, d - 1);
                std::swap(features[static_cast<std::size_t>(k)],
                          features[static_cast<std::size_t>(pick(rng))]);
                o.uses[static_cast<std::size_t>(features[static_cast<std::size_t>(k)])] = 1;
                any_uses[static_cast<std::size_t>(features[static_cast<std::size_t>(k)])] = 1;
            }
            o.best_gain = 1e-10 * imp;
        }

        for (int f = 0; f < d; ++f) {
            if (!any_uses[static_cast<std::size_t>(f)]) continue;
            for (auto& o : open) {
                o.left_weight = 0.0;
                o.left_sum = 0.0;
                o.has_last = false;
            }
            for (const int r : sorted.order(f)) {
                const int k = node_of[static_cast<std::size_t>(r)];
                if (k < 0) continue;
                auto& o = open[static_cast<std::size_t>(slot_of[static_cast<std::size_t>(k)])];
                if (!o.uses[static_cast<std::size_t>(f)]) continue;
                const double x = X(r, f);
                if (o.has_last && x > o.last && o.left_weight >= min_leaf &&
                    o.weight - o.left_weight >= min_leaf) {
                    const double wr = o.weight - o.left_weight;
                    const double sr = o.sum - o.left_sum;
                    const double gain = o.left_sum * o.left_sum / o.left_weight + sr * sr / wr -
                                        o.sum * o.sum / o.weight;
                    if (gain > o.best_gain) {
                        o.best_gain = gain;
                        o.best_feature = f;
                        o.best_threshold = midpoint(o.last, x);
                    }
                }
                const double w = weights[static_cast<std::size_t>(r)];
                o.left_weight += w;
                o.left_sum += w * target(r);
                o.last = x;
                o.has_last = true;
            }
        }

        std::vector<OpenNode> next;
        std::vector<int> child_slot(open.size(), -1);
        for (std::size_t s = 0; s < open.size(); ++s) {
            auto& o = open[s];
            if (o.best_feature < 0) continue;
            const int left = static_cast<int>(nodes.size());
            nodes.emplace_back();
            nodes.emplace_back();
            auto& parent = nodes[static_cast<std::size_t>(o.node)];
            parent.feature = o.best_feature;
            parent.threshold = o.best_threshold;
            parent.left = left;
            parent.right = left + 1;
            child_slot[s] = static_cast<int>(next.size());
            OpenNode l;
            l.node = left;
            l.depth = o.depth + 1;
            OpenNode r;
            r.node = left + 1;
            r.depth = o.depth + 1;
            next.push_back(std::move(l));
            next.push_back(std::move(r));
        }
        slot_of.assign(nodes.size(), -1);
        for (std::size_t s = 0; s < next.size(); ++s) slot_of[static_cast<std::size_t>(next[s].node)] = static_cast<int>(s);

        for (std::size_t r = 0; r < n; ++r) {
            const int k = node_of[r];
            if (k < 0) continue;
            const auto& parent = nodes[static_cast<std::size_t>(k)];
            if (parent.feature < 0) {
                node_of[r] = -1;
                continue;
            }
            const auto row = static_cast<Eigen::Index>(r);
            const int child = X(row, parent.feature) <= parent.threshold ? parent.left : parent.right;
            node_of[r] = child;
            auto& c = next[static_cast<std::size_t>(slot_of[static_cast<std::size_t>(child)])];
            const double w = weights[r];
            const double y = target(row);
            c.weight += w;
            c.sum += w * y;
            c.sum_sq += w * y * y;
        }
        open = std::move(next);
    }
    return RegressionTree(std::move(nodes));
}

} // namespace autohybrid::learners
