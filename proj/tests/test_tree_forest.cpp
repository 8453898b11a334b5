#include <gtest/gtest.h>

#include <numeric>

#include "amrkit/error.hpp"
#include "amrkit/forest.hpp"
#include "amrkit/training_set.hpp"
#include "amrkit/tree.hpp"
#include "oracles.hpp"

using namespace amrkit;

namespace {

constexpr Phenotype S = Phenotype::SUS;
constexpr Phenotype R = Phenotype::RES;

ErrorCode code_of(const std::function<void()>& fn) {
    try {
        fn();
    } catch (const Error& e) {
        return e.code();
    }
    ADD_FAILURE() << "no amrkit::Error thrown";
    return ErrorCode::IoError;
}

std::vector<std::uint32_t> all_features(std::size_t p) {
    std::vector<std::uint32_t> f(p);
    std::iota(f.begin(), f.end(), 0u);
    return f;
}

// Random data where no two identical rows disagree on the label.
fixture::DenseData consistent_dense(Rng& rng, std::size_t n, std::size_t p) {
    fixture::DenseData d = fixture::random_dense(rng, n, p, 2);
    std::map<std::vector<std::uint32_t>, Phenotype> first;
    for (std::size_t i = 0; i < n; ++i) {
        auto [it, inserted] = first.emplace(d.x[i], d.y[i]);
        if (!inserted) d.y[i] = it->second;
    }
    return d;
}

double training_accuracy(const ForestModel& model, const FeatureMatrix& m) {
    std::size_t hits = 0;
    for (std::size_t r = 0; r < m.n_rows(); ++r) hits += classify(forest_predict_proba(model, m.rows[r])) == *m.labels[r];
    return static_cast<double>(hits) / static_cast<double>(m.n_rows());
}

}  // namespace

TEST(Gini, Examples) {
    EXPECT_DOUBLE_EQ(gini_impurity(5, 5), 0.5);
    EXPECT_DOUBLE_EQ(gini_impurity(10, 0), 0.0);
    EXPECT_DOUBLE_EQ(gini_impurity(3, 1), 0.375);
    EXPECT_EQ(code_of([] { gini_impurity(0, 0); }), ErrorCode::EmptyNode);
}

TEST(BestSplit, Examples) {
    FeatureMatrix m = fixture::dense_matrix({{0}, {0}, {1}, {1}}, {S, S, R, R});
    TrainingSet data(m);
    auto split = best_split(data, all_features(1));
    ASSERT_TRUE(split);
    EXPECT_EQ(split->feature, 0u);
    EXPECT_DOUBLE_EQ(split->threshold, 0.5);
    EXPECT_DOUBLE_EQ(split->impurity_decrease, 0.5);

    FeatureMatrix pure = fixture::dense_matrix({{0}, {3}, {1}}, {R, R, R});
    EXPECT_FALSE(best_split(TrainingSet(pure), all_features(1)));

    FeatureMatrix two = fixture::dense_matrix({{2, 0}, {1, 0}, {2, 4}, {1, 5}}, {S, S, R, R});
    split = best_split(TrainingSet(two), all_features(2));
    ASSERT_TRUE(split);
    EXPECT_EQ(split->feature, 1u);
    EXPECT_DOUBLE_EQ(split->threshold, 2.0);
}

TEST(BestSplit, TieGoesToLowestFeatureThenThreshold) {
    FeatureMatrix m = fixture::dense_matrix({{0, 0}, {1, 1}}, {S, R});
    auto split = best_split(TrainingSet(m), std::vector<std::uint32_t>{1, 0});
    ASSERT_TRUE(split);
    EXPECT_EQ(split->feature, 0u);
}

TEST(BestSplit, MatchesBruteForceEnumeration) {
    Rng rng(31);
    for (int trial = 0; trial < 300; ++trial) {
        const std::size_t n = 2 + uniform_index(rng, 25);
        const std::size_t p = 1 + uniform_index(rng, 6);
        fixture::DenseData d = fixture::random_dense(rng, std::max<std::size_t>(n, 2), p, 4);
        for (auto& row : d.x)
            for (auto& v : row)
                if (uniform_index(rng, 3) == 0) v = 0;
        FeatureMatrix m = fixture::dense_matrix(d.x, d.y);
        TrainingSet data(m);
        std::vector<std::uint32_t> candidates;
        for (std::uint32_t f = 0; f < p; ++f)
            if (uniform_index(rng, 3) != 0) candidates.push_back(f);
        if (candidates.empty()) candidates.push_back(0);

        auto got = best_split(data, candidates);
        auto want = oracle::best_split(d.x, fixture::is_res(d.y), candidates);
        ASSERT_EQ(got.has_value(), want.has_value()) << "trial " << trial;
        if (!got) continue;
        EXPECT_NEAR(got->impurity_decrease, want->decrease, 1e-12);
        // The chosen split really achieves that decrease.
        auto alone = oracle::best_split(d.x, fixture::is_res(d.y), {got->feature});
        ASSERT_TRUE(alone);
        EXPECT_NEAR(alone->decrease, got->impurity_decrease, 1e-12);
        if (std::abs(got->impurity_decrease - want->decrease) < 1e-12 && got->feature == want->feature)
            EXPECT_DOUBLE_EQ(got->threshold, want->threshold);
    }
}

TEST(FitTree, Examples) {
    Rng rng(32);
    FeatureMatrix m = fixture::dense_matrix({{0}, {1}}, {S, R});
    DecisionTree tree = fit_tree(TrainingSet(m), TreeParams{MaxFeatures::all()}, rng);
    EXPECT_EQ(tree.depth(), 1u);
    EXPECT_DOUBLE_EQ(tree.nodes[0].threshold, 0.5);
    EXPECT_DOUBLE_EQ(tree.predict_proba(m.rows[0]), 0.0);
    EXPECT_DOUBLE_EQ(tree.predict_proba(m.rows[1]), 1.0);

    FeatureMatrix one = fixture::dense_matrix({{4, 2}}, {R});
    EXPECT_EQ(fit_tree(TrainingSet(one), TreeParams{}, rng).nodes.size(), 1u);

    FeatureMatrix pure = fixture::dense_matrix({{0, 1}, {5, 0}, {2, 2}}, {S, S, S});
    DecisionTree leaf = fit_tree(TrainingSet(pure), TreeParams{MaxFeatures::all()}, rng);
    ASSERT_EQ(leaf.nodes.size(), 1u);
    EXPECT_EQ(leaf.nodes[0].n_sus, 3u);
}

TEST(FitTree, DepthAndMinSamplesLimits) {
    Rng rng(33);
    fixture::DenseData d = consistent_dense(rng, 60, 5);
    FeatureMatrix m = fixture::dense_matrix(d.x, d.y);
    for (std::uint32_t depth : {1u, 2u, 3u}) {
        Rng r(1);
        DecisionTree t = fit_tree(TrainingSet(m), TreeParams{MaxFeatures::all(), depth, 2}, r);
        EXPECT_LE(t.depth(), depth);
    }
    Rng r(2);
    DecisionTree t = fit_tree(TrainingSet(m), TreeParams{MaxFeatures::all(), 0, 1000}, r);
    EXPECT_EQ(t.nodes.size(), 1u);
}

TEST(FitTree, StructuralInvariants) {
    Rng rng(34);
    for (int trial = 0; trial < 30; ++trial) {
        fixture::DenseData d = fixture::random_dense(rng, 40, 8, 3);
        FeatureMatrix m = fixture::dense_matrix(d.x, d.y);
        Rng r(trial);
        DecisionTree t = fit_tree(TrainingSet(m), TreeParams{MaxFeatures::fixed(3)}, r);
        for (std::size_t i = 0; i < t.nodes.size(); ++i) {
            const TreeNode& node = t.nodes[i];
            EXPECT_GE(node.n_sus + node.n_res, 1u);
            if (node.is_leaf()) continue;
            EXPECT_GT(node.left, i);
            EXPECT_GT(node.right, i);
            const TreeNode& l = t.nodes[node.left];
            const TreeNode& rr = t.nodes[node.right];
            EXPECT_EQ(l.n_sus + rr.n_sus, node.n_sus);
            EXPECT_EQ(l.n_res + rr.n_res, node.n_res);
        }
        // Routing: every training row lands in a leaf on the correct side of each test.
        for (const SparseRow& row : m.rows) {
            std::size_t at = 0;
            while (!t.nodes[at].is_leaf()) {
                const TreeNode& node = t.nodes[at];
                at = row.value_at(static_cast<std::uint32_t>(node.feature)) <= node.threshold ? node.left : node.right;
            }
            EXPECT_EQ(&t.nodes[at], &t.leaf_for(row));
        }
    }
}

TEST(MaxFeatures, Resolve) {
    EXPECT_EQ(MaxFeatures::sqrt().resolve(100), 10u);
    EXPECT_EQ(MaxFeatures::sqrt().resolve(1), 1u);
    EXPECT_EQ(MaxFeatures::all().resolve(37), 37u);
    EXPECT_EQ(MaxFeatures::fixed(5).resolve(37), 5u);
    EXPECT_EQ(code_of([] { MaxFeatures::fixed(50).resolve(37); }), ErrorCode::InvalidParameter);
}

TEST(Forest, SeparableFeatureGetsAllImportance) {
    std::vector<std::vector<std::uint32_t>> x;
    std::vector<Phenotype> y;
    Rng rng(35);
    for (int i = 0; i < 40; ++i) {
        const bool res = i % 2;
        x.push_back({static_cast<std::uint32_t>(uniform_index(rng, 3)), res ? 2u : 0u,
                     static_cast<std::uint32_t>(uniform_index(rng, 3))});
        y.push_back(res ? R : S);
    }
    FeatureMatrix m = fixture::dense_matrix(x, y);
    ForestParams params;
    params.max_features = MaxFeatures::all();
    params.seed = 3;
    ForestModel model = fit_forest(m, params);
    EXPECT_NEAR(model.importances[1], 1.0, 1e-12);
    EXPECT_DOUBLE_EQ(training_accuracy(model, m), 1.0);
}

TEST(Forest, DeterministicAcrossThreadCounts) {
    Rng rng(36);
    fixture::DenseData d = fixture::random_dense(rng, 80, 30, 3);
    FeatureMatrix m = fixture::dense_matrix(d.x, d.y);
    ForestParams params;
    params.n_trees = 25;
    params.seed = 99;
    ForestModel a = fit_forest(m, params, 1);
    EXPECT_EQ(a, fit_forest(m, params, 1));
    EXPECT_EQ(a, fit_forest(m, params, 8));
    params.seed = 100;
    EXPECT_NE(a, fit_forest(m, params, 1));
}

TEST(Forest, SingleTreeWithoutBootstrapEqualsFitTree) {
    Rng rng(37);
    fixture::DenseData d = fixture::random_dense(rng, 50, 10, 3);
    FeatureMatrix m = fixture::dense_matrix(d.x, d.y);
    ForestParams params;
    params.n_trees = 1;
    params.bootstrap = false;
    params.max_features = MaxFeatures::all();
    params.seed = 5;
    ForestModel model = fit_forest(m, params);
    Rng tree_rng(derive_seed(5, {0}));
    EXPECT_EQ(model.trees[0], fit_tree(TrainingSet(m), params.tree_params(), tree_rng));
}

TEST(Forest, ImportancesAreNormalized) {
    Rng rng(38);
    for (int trial = 0; trial < 20; ++trial) {
        fixture::DenseData d = fixture::random_dense(rng, 30, 12, 3);
        FeatureMatrix m = fixture::dense_matrix(d.x, d.y);
        ForestParams params;
        params.n_trees = 10;
        params.seed = trial;
        ForestModel model = fit_forest(m, params);
        ASSERT_EQ(model.importances.size(), 12u);
        double sum = 0;
        for (double v : model.importances) {
            EXPECT_GE(v, 0.0);
            sum += v;
        }
        EXPECT_NEAR(sum, 1.0, 1e-9);
    }
}

TEST(Forest, TrainingAccuracyIsPerfectOnConsistentData) {
    Rng rng(39);
    for (int trial = 0; trial < 20; ++trial) {
        fixture::DenseData d = consistent_dense(rng, 20 + uniform_index(rng, 60), 2 + uniform_index(rng, 8));
        FeatureMatrix m = fixture::dense_matrix(d.x, d.y);
        ForestParams params;
        params.n_trees = 5;
        params.bootstrap = false;
        params.max_features = MaxFeatures::all();
        params.seed = trial;
        EXPECT_DOUBLE_EQ(training_accuracy(fit_forest(m, params), m), 1.0) << "trial " << trial;
    }
}

TEST(Forest, BootstrapDrawsExactlyN) {
    Rng rng(40);
    for (std::size_t n : {1u, 7u, 100u}) {
        auto w = bootstrap_weights(n, rng);
        ASSERT_EQ(w.size(), n);
        EXPECT_EQ(std::accumulate(w.begin(), w.end(), std::size_t{0}), n);
    }
}

TEST(Forest, PredictionRules) {
    ForestModel model;
    model.n_features = 1;
    DecisionTree res_tree{{TreeNode{-1, 0, 0, 0, 0, 3}}};
    DecisionTree sus_tree{{TreeNode{-1, 0, 0, 0, 4, 0}}};
    SparseRow row;
    model.trees = {res_tree, res_tree};
    EXPECT_DOUBLE_EQ(forest_predict_proba(model, row), 1.0);
    model.trees = {sus_tree};
    EXPECT_DOUBLE_EQ(forest_predict_proba(model, row), 0.0);
    model.trees = {res_tree, sus_tree};
    EXPECT_DOUBLE_EQ(forest_predict_proba(model, row), 0.5);
    EXPECT_EQ(classify(0.5), Phenotype::RES);
    SparseRow wide{{3}, {1}};
    EXPECT_EQ(code_of([&] { forest_predict_proba(model, wide); }), ErrorCode::IndexOutOfRange);
}

TEST(Forest, Errors) {
    FeatureMatrix single = fixture::dense_matrix({{1}, {2}}, {R, R});
    EXPECT_EQ(code_of([&] { fit_forest(single, ForestParams{}); }), ErrorCode::SingleClassTraining);
    FeatureMatrix ok = fixture::dense_matrix({{1}, {2}}, {S, R});
    ForestParams zero;
    zero.n_trees = 0;
    EXPECT_EQ(code_of([&] { fit_forest(ok, zero); }), ErrorCode::InvalidParameter);
}
