#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "amrkit/random.hpp"
#include "amrkit/training_set.hpp"

namespace amrkit {

// 1 - sum_c (n_c / n)^2. Throws EmptyNode when both counts are zero.
double gini_impurity(double sus, double res);

struct Split {
    std::uint32_t feature = 0;
    double threshold = 0.0;  // value <= threshold goes left
    double impurity_decrease = 0.0;
};

// Exhaustive search over midpoints between consecutive distinct values of each
// candidate feature (absent entries are 0), all samples weighted 1. Ties go to
// the lowest feature index, then the lowest threshold. Returns nothing when no
// split strictly decreases impurity.
std::optional<Split> best_split(const TrainingSet& data, std::span<const std::uint32_t> candidate_features);

struct MaxFeatures {
    enum class Rule : std::uint8_t { Sqrt = 0, All = 1, Fixed = 2 };
    Rule rule = Rule::Sqrt;
    std::uint64_t m = 0;  // used by Fixed

    static MaxFeatures sqrt() { return {Rule::Sqrt, 0}; }
    static MaxFeatures all() { return {Rule::All, 0}; }
    static MaxFeatures fixed(std::uint64_t m) { return {Rule::Fixed, m}; }

    // Number of candidates per node for a matrix with `n_features` columns.
    std::size_t resolve(std::size_t n_features) const;

    bool operator==(const MaxFeatures&) const = default;
};

struct TreeParams {
    MaxFeatures max_features = MaxFeatures::sqrt();
    std::uint32_t max_depth = 0;  // 0 = unlimited
    std::uint32_t min_samples_split = 2;
};

struct TreeNode {
    std::int32_t feature = -1;  // -1 marks a leaf
    double threshold = 0.0;
    std::uint32_t left = 0;
    std::uint32_t right = 0;
    // Training samples (with bootstrap multiplicity) that reached the node.
    std::uint32_t n_sus = 0;
    std::uint32_t n_res = 0;

    bool is_leaf() const { return feature < 0; }
    double res_fraction() const {
        return static_cast<double>(n_res) / static_cast<double>(n_sus + n_res);
    }

    bool operator==(const TreeNode&) const = default;
};

// Nodes in depth-first pre-order; nodes[0] is the root and children always
// follow their parent.
struct DecisionTree {
    std::vector<TreeNode> nodes;

    const TreeNode& leaf_for(const SparseRow& row) const;
    double predict_proba(const SparseRow& row) const { return leaf_for(row).res_fraction(); }
    std::size_t depth() const;
    std::size_t n_leaves() const;

    bool operator==(const DecisionTree&) const = default;
};

// Recursive CART with Gini impurity. `sample_weights` holds per-sample
// multiplicities (bootstrap counts); zero excludes a sample. When
// `importances` is given it receives the weighted impurity decrease of every
// split, accumulated per feature (not normalized).
DecisionTree fit_tree(const TrainingSet& data, std::span<const std::uint32_t> sample_weights,
                      const TreeParams& params, Rng& rng, std::vector<double>* importances = nullptr);

DecisionTree fit_tree(const TrainingSet& data, const TreeParams& params, Rng& rng);

}  // namespace amrkit
