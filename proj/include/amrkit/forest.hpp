#pragma once

#include <cstdint>
#include <vector>

#include "amrkit/tree.hpp"

namespace amrkit {

// Defaults follow the conventional random-forest settings: 100 trees, Gini,
// sqrt(n_features) candidates per node, bootstrap resampling, unlimited depth.
struct ForestParams {
    std::uint32_t n_trees = 100;
    MaxFeatures max_features = MaxFeatures::sqrt();
    bool bootstrap = true;
    std::uint32_t max_depth = 0;  // 0 = unlimited
    std::uint32_t min_samples_split = 2;
    std::uint64_t seed = 0;

    void validate() const;
    TreeParams tree_params() const { return {max_features, max_depth, min_samples_split}; }

    bool operator==(const ForestParams&) const = default;
};

struct ForestModel {
    std::vector<DecisionTree> trees;
    std::size_t n_features = 0;
    ForestParams params;
    // Mean decrease in impurity, summing to 1 (all zero if no tree split).
    std::vector<double> importances;

    bool operator==(const ForestModel&) const = default;
};

// n draws with replacement from [0, n), returned as per-sample multiplicities.
std::vector<std::uint32_t> bootstrap_weights(std::size_t n, Rng& rng);

// Tree i is grown from its own engine seeded with derive_seed(seed, {i}), so
// the result does not depend on `threads`. Throws SingleClassTraining.
ForestModel fit_forest(const TrainingSet& data, const ForestParams& params, unsigned threads = 1);
ForestModel fit_forest(const FeatureMatrix& matrix, const ForestParams& params, unsigned threads = 1);

// Mean over trees of the leaf RES fraction. Throws IndexOutOfRange.
double forest_predict_proba(const ForestModel& model, const SparseRow& row);

// RES iff probability >= threshold; a tie at 0.5 therefore reads as resistant.
inline Phenotype classify(double res_probability, double threshold = 0.5) {
    return res_probability >= threshold ? Phenotype::RES : Phenotype::SUS;
}

}  // namespace amrkit
