#include "amrkit/forest.hpp"

#include <algorithm>
#include <numeric>

#include "amrkit/error.hpp"
#include "amrkit/parallel.hpp"

namespace amrkit {

void ForestParams::validate() const {
    if (n_trees < 1) fail(ErrorCode::InvalidParameter, "n_trees must be >= 1");
    if (min_samples_split < 2) fail(ErrorCode::InvalidParameter, "min_samples_split must be >= 2");
}

std::vector<std::uint32_t> bootstrap_weights(std::size_t n, Rng& rng) {
    std::vector<std::uint32_t> w(n, 0);
    for (std::size_t i = 0; i < n; ++i) ++w[uniform_index(rng, n)];
    return w;
}

ForestModel fit_forest(const TrainingSet& data, const ForestParams& params, unsigned threads) {
    params.validate();
    if (data.n_res() == 0 || data.n_sus() == 0)
        fail(ErrorCode::SingleClassTraining, "training data must contain both SUS and RES samples");
    // Surface a bad max_features before spawning workers.
    params.max_features.resolve(data.n_features());

    ForestModel model;
    model.n_features = data.n_features();
    model.params = params;
    model.trees.resize(params.n_trees);
    // Normalized per-tree importances, kept sparse (only split features).
    std::vector<std::vector<std::pair<std::uint32_t, double>>> per_tree(params.n_trees);

    const TreeParams tree_params = params.tree_params();
    parallel_for(params.n_trees, threads, [&](std::size_t t) {
        Rng rng(derive_seed(params.seed, {t}));
        std::vector<std::uint32_t> weights = params.bootstrap
                                                 ? bootstrap_weights(data.n_samples(), rng)
                                                 : std::vector<std::uint32_t>(data.n_samples(), 1);
        std::vector<double> dense;
        model.trees[t] = fit_tree(data, weights, tree_params, rng, &dense);
        const double sum = std::accumulate(dense.begin(), dense.end(), 0.0);
        if (sum > 0) {
            for (const TreeNode& node : model.trees[t].nodes) {
                if (node.is_leaf()) continue;
                auto f = static_cast<std::uint32_t>(node.feature);
                if (dense[f] > 0) {
                    per_tree[t].emplace_back(f, dense[f] / sum);
                    dense[f] = 0;
                }
            }
            std::sort(per_tree[t].begin(), per_tree[t].end());
        }
    });

    // Reduce in tree order so the floating-point sum is independent of threads.
    model.importances.assign(model.n_features, 0.0);
    for (const auto& imp : per_tree)
        for (const auto& [f, v] : imp) model.importances[f] += v;
    double total = std::accumulate(model.importances.begin(), model.importances.end(), 0.0);
    if (total > 0)
        for (double& v : model.importances) v /= total;
    return model;
}

ForestModel fit_forest(const FeatureMatrix& matrix, const ForestParams& params, unsigned threads) {
    return fit_forest(TrainingSet(matrix), params, threads);
}

double forest_predict_proba(const ForestModel& model, const SparseRow& row) {
    if (!row.indices.empty() && row.indices.back() >= model.n_features)
        fail(ErrorCode::IndexOutOfRange, "row has a feature index beyond the model's " +
                                             std::to_string(model.n_features) + " features");
    if (model.trees.empty()) fail(ErrorCode::InvalidParameter, "forest has no trees");
    double sum = 0;
    for (const auto& tree : model.trees) sum += tree.predict_proba(row);
    return sum / static_cast<double>(model.trees.size());
}

}  // namespace amrkit
