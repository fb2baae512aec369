#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>
#include <utility>
#include <vector>

#include "cpt/classifiers.hpp"

namespace cpt {

namespace detail {
void check_eval_dim(const LabeledDataset& train, const SampleMatrix& eval);
Eigen::VectorXd clipped(Eigen::VectorXd values, double epsilon);
}  // namespace detail

namespace {

struct TreeNode {
    int feature = -1;  // -1 marks a leaf
    double threshold = 0.0;
    std::int32_t left = -1;
    std::int32_t right = -1;
    double prob = 0.0;  // label-1 share of the full training sample routed here
};

struct Tree {
    std::vector<TreeNode> nodes;

    std::int32_t route(const Eigen::MatrixXd& x, Eigen::Index row) const {
        std::int32_t at = 0;
        while (nodes[static_cast<std::size_t>(at)].feature >= 0) {
            const TreeNode& node = nodes[static_cast<std::size_t>(at)];
            at = x(row, node.feature) <= node.threshold ? node.left : node.right;
        }
        return at;
    }
};

struct Forest {
    std::vector<Tree> trees;
    std::vector<std::vector<int>> in_bag;  // Poisson(1) multiplicity per tree, per row
};

int resolve_mtry(const ClassifierSpec& spec, Eigen::Index dim) {
    const int mtry = spec.forest_mtry != 0
                         ? spec.forest_mtry
                         : std::max(1, static_cast<int>(std::sqrt(static_cast<double>(dim))));
    if (mtry < 1 || mtry > dim) {
        throw InvalidArgument("forest_mtry must lie in [1, dim]");
    }
    return mtry;
}

struct BestSplit {
    int feature = -1;
    double threshold = 0.0;
    double score = std::numeric_limits<double>::infinity();
};

double gini(double ones, double total) {
    const double p1 = ones / total;
    const double p0 = 1.0 - p1;
    return 1.0 - p1 * p1 - p0 * p0;
}

Tree grow_tree(const LabeledDataset& train, const std::vector<int>& weight, int mtry,
               int min_leaf, RngStream& feature_rng) {
    const Eigen::MatrixXd& x = train.features().values();
    const std::vector<int>& y = train.labels();
    const std::vector<std::int64_t>& ids = train.row_ids();
    const Eigen::Index dim = train.dim();

    // In-bag rows in a canonical order (by stable row id) so the grown
    // structure does not depend on how the caller ordered the rows.
    std::vector<int> root;
    for (Eigen::Index i = 0; i < train.size(); ++i) {
        if (weight[static_cast<std::size_t>(i)] > 0) {
            root.push_back(static_cast<int>(i));
        }
    }
    std::sort(root.begin(), root.end(),
              [&](int a, int b) { return ids[static_cast<std::size_t>(a)] < ids[static_cast<std::size_t>(b)]; });

    Tree tree;
    tree.nodes.emplace_back();

    struct Work {
        std::int32_t node;
        std::vector<int> rows;  // positions into train, sorted by row id
    };
    std::vector<Work> stack;
    stack.push_back({0, std::move(root)});

    std::vector<int> pool(static_cast<std::size_t>(dim));
    std::vector<int> sorted_rows;

    while (!stack.empty()) {
        Work work = std::move(stack.back());
        stack.pop_back();
        const std::vector<int>& rows = work.rows;

        double ones = 0.0;
        double total = 0.0;
        for (int r : rows) {
            const double w = weight[static_cast<std::size_t>(r)];
            total += w;
            ones += w * y[static_cast<std::size_t>(r)];
        }
        const bool pure = ones <= 0.0 || ones >= total;
        if (pure || static_cast<int>(rows.size()) <= min_leaf) {
            continue;  // stays a leaf
        }

        // mtry distinct candidate features via partial Fisher-Yates, drawn in
        // preorder so the per-tree stream is consumed deterministically.
        std::iota(pool.begin(), pool.end(), 0);
        for (int i = 0; i < mtry; ++i) {
            const std::uint64_t j =
                static_cast<std::uint64_t>(i) +
                feature_rng.below(static_cast<std::uint64_t>(dim - i));
            std::swap(pool[static_cast<std::size_t>(i)], pool[static_cast<std::size_t>(j)]);
        }

        BestSplit best;
        for (int c = 0; c < mtry; ++c) {
            const int feature = pool[static_cast<std::size_t>(c)];
            sorted_rows = rows;
            std::sort(sorted_rows.begin(), sorted_rows.end(), [&](int a, int b) {
                const double va = x(a, feature);
                const double vb = x(b, feature);
                if (va != vb) {
                    return va < vb;
                }
                return ids[static_cast<std::size_t>(a)] < ids[static_cast<std::size_t>(b)];
            });

            // Prefix scan; every boundary between distinct consecutive values
            // is one candidate threshold (midpoint), so both children are
            // guaranteed nonempty.
            double left_ones = 0.0;
            double left_total = 0.0;
            for (std::size_t k = 0; k + 1 < sorted_rows.size(); ++k) {
                const int r = sorted_rows[k];
                const double w = weight[static_cast<std::size_t>(r)];
                left_total += w;
                left_ones += w * y[static_cast<std::size_t>(r)];
                const double lo = x(r, feature);
                const double hi = x(sorted_rows[k + 1], feature);
                if (lo == hi) {
                    continue;
                }
                const double right_total = total - left_total;
                const double right_ones = ones - left_ones;
                const double score = (left_total * gini(left_ones, left_total) +
                                      right_total * gini(right_ones, right_total)) /
                                     total;
                if (score < best.score) {
                    best.score = score;
                    best.feature = feature;
                    best.threshold = lo + 0.5 * (hi - lo);
                }
            }
        }
        if (best.feature < 0) {
            continue;  // every candidate feature is constant on this node
        }

        std::vector<int> left_rows;
        std::vector<int> right_rows;
        for (int r : rows) {
            (x(r, best.feature) <= best.threshold ? left_rows : right_rows).push_back(r);
        }

        const auto left_index = static_cast<std::int32_t>(tree.nodes.size());
        tree.nodes.emplace_back();
        tree.nodes.emplace_back();
        TreeNode& node = tree.nodes[static_cast<std::size_t>(work.node)];
        node.feature = best.feature;
        node.threshold = best.threshold;
        node.left = left_index;
        node.right = left_index + 1;

        // Push right first so the left child is processed next (preorder).
        stack.push_back({left_index + 1, std::move(right_rows)});
        stack.push_back({left_index, std::move(left_rows)});
    }

    // Leaf probabilities come from the full training sample routed through
    // the finished structure, not from the bootstrap multiset. Every leaf
    // holds at least its own in-bag rows, so no leaf count is zero.
    std::vector<double> leaf_ones(tree.nodes.size(), 0.0);
    std::vector<double> leaf_total(tree.nodes.size(), 0.0);
    for (Eigen::Index i = 0; i < train.size(); ++i) {
        const auto leaf = static_cast<std::size_t>(tree.route(x, i));
        leaf_total[leaf] += 1.0;
        leaf_ones[leaf] += y[static_cast<std::size_t>(i)];
    }
    for (std::size_t k = 0; k < tree.nodes.size(); ++k) {
        if (tree.nodes[k].feature < 0 && leaf_total[k] > 0.0) {
            tree.nodes[k].prob = leaf_ones[k] / leaf_total[k];
        }
    }
    return tree;
}

Forest build_forest(const ClassifierSpec& spec, const LabeledDataset& train) {
    if (spec.forest_trees < 1) {
        throw InvalidArgument("forest_trees must be at least 1");
    }
    if (spec.forest_min_leaf < 1) {
        throw InvalidArgument("forest_min_leaf must be at least 1");
    }
    const int mtry = resolve_mtry(spec, train.dim());
    const auto n = static_cast<std::size_t>(train.size());

    Forest forest;
    forest.trees.reserve(static_cast<std::size_t>(spec.forest_trees));
    forest.in_bag.reserve(static_cast<std::size_t>(spec.forest_trees));
    for (int t = 0; t < spec.forest_trees; ++t) {
        // The resample weight of a row depends only on (seed, tree, row id),
        // never on the row's position, so shuffled inputs grow equal trees.
        const RngStream boot(spec.seed, 2 * static_cast<std::uint64_t>(t));
        std::vector<int> weight(n);
        for (std::size_t i = 0; i < n; ++i) {
            weight[i] = boot.derive(static_cast<std::uint64_t>(train.row_ids()[i])).poisson1();
        }
        RngStream feature_rng(spec.seed, 2 * static_cast<std::uint64_t>(t) + 1);
        forest.trees.push_back(grow_tree(train, weight, mtry, spec.forest_min_leaf, feature_rng));
        forest.in_bag.push_back(std::move(weight));
    }
    return forest;
}

}  // namespace

ProbEstimate forest_fit_predict(const ClassifierSpec& spec, const LabeledDataset& train,
                                const SampleMatrix& eval) {
    detail::check_eval_dim(train, eval);
    const Forest forest = build_forest(spec, train);

    Eigen::VectorXd probs = Eigen::VectorXd::Zero(eval.rows());
    for (const Tree& tree : forest.trees) {
        for (Eigen::Index i = 0; i < eval.rows(); ++i) {
            probs(i) += tree.nodes[static_cast<std::size_t>(tree.route(eval.values(), i))].prob;
        }
    }
    probs /= static_cast<double>(forest.trees.size());
    const double eps = default_epsilon(train.size());
    return ProbEstimate{detail::clipped(std::move(probs), eps), eps, true};
}

double forest_oob_error(const ClassifierSpec& spec, const LabeledDataset& train) {
    const Forest forest = build_forest(spec, train);
    const Eigen::MatrixXd& x = train.features().values();

    std::int64_t scored = 0;
    std::int64_t wrong = 0;
    for (Eigen::Index i = 0; i < train.size(); ++i) {
        double sum = 0.0;
        int votes = 0;
        for (std::size_t t = 0; t < forest.trees.size(); ++t) {
            if (forest.in_bag[t][static_cast<std::size_t>(i)] == 0) {
                const Tree& tree = forest.trees[t];
                sum += tree.nodes[static_cast<std::size_t>(tree.route(x, i))].prob;
                ++votes;
            }
        }
        if (votes == 0) {
            continue;  // row was in-bag everywhere; it cannot be scored
        }
        ++scored;
        const int predicted = sum / votes >= 0.5 ? 1 : 0;
        wrong += predicted != train.labels()[static_cast<std::size_t>(i)];
    }
    if (scored == 0) {
        throw InvalidArgument("forest_oob_error: no row is out of bag; grow more trees");
    }
    return static_cast<double>(wrong) / static_cast<double>(scored);
}

}  // namespace cpt
