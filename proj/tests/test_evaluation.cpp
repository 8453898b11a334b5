#include <gtest/gtest.h>

#include <set>
#include <sstream>

#include "amrkit/error.hpp"
#include "amrkit/evaluation.hpp"
#include "amrkit/report.hpp"
#include "amrkit/synth.hpp"
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

FeatureMatrix labeled(std::size_t n_sus, std::size_t n_res, std::size_t n_unlabeled = 0) {
    std::vector<std::vector<std::uint32_t>> x;
    std::vector<Phenotype> y;
    for (std::size_t i = 0; i < n_sus + n_res + n_unlabeled; ++i) {
        x.push_back({static_cast<std::uint32_t>(i % 3)});
        y.push_back(i < n_sus ? S : R);
    }
    FeatureMatrix m = fixture::dense_matrix(x, y);
    for (std::size_t i = n_sus + n_res; i < m.n_rows(); ++i) m.labels[i] = std::nullopt;
    return m;
}

std::size_t count_class(const FeatureMatrix& m, const std::vector<std::size_t>& rows, Phenotype p) {
    return std::count_if(rows.begin(), rows.end(), [&](std::size_t r) { return m.labels[r] == p; });
}

FeatureMatrix planted_matrix(std::uint64_t seed, std::size_t n, double res_presence = 1.0, double sus_presence = 0.0) {
    SynthSpec spec;
    spec.n_isolates = n;
    spec.contig_length = 400;
    spec.marker = "GATTACA";
    spec.marker_presence_in_res = res_presence;
    spec.marker_presence_in_sus = sus_presence;
    spec.seed = seed;
    return build_matrix(generate_corpus(spec).dataset, KmerSpec{7, true});
}

}  // namespace

TEST(Split, Examples) {
    FeatureMatrix ten = labeled(5, 5);
    TrainTestSplit s = train_test_split(ten, SplitSpec{0.2, true, 1});
    EXPECT_EQ(s.train.size(), 8u);
    EXPECT_EQ(s.test.size(), 2u);
    EXPECT_EQ(count_class(ten, s.test, S), 1u);
    EXPECT_EQ(count_class(ten, s.test, R), 1u);
    EXPECT_EQ(train_test_split(ten, SplitSpec{0.2, true, 1}).test, s.test);

    FeatureMatrix hundred = labeled(37, 63);
    EXPECT_EQ(train_test_split(hundred, SplitSpec{0.2, true, 4}).test.size(), 20u);
    EXPECT_EQ(train_test_split(hundred, SplitSpec{0.2, false, 4}).test.size(), 20u);
}

TEST(Split, PartitionAndStratificationProperties) {
    Rng rng(61);
    for (int trial = 0; trial < 200; ++trial) {
        const std::size_t n_sus = 2 + uniform_index(rng, 40), n_res = 2 + uniform_index(rng, 40);
        FeatureMatrix m = labeled(n_sus, n_res, uniform_index(rng, 3));
        const double fraction = 0.05 + 0.9 * uniform01(rng);
        const bool stratified = trial % 3 != 0;
        const std::size_t n_test = static_cast<std::size_t>(std::ceil(fraction * (n_sus + n_res) - 1e-9));
        if (n_test + (stratified ? 2 : 1) > n_sus + n_res) {
            // Some class would be left without a train row.
            EXPECT_EQ(code_of([&] { train_test_split(m, SplitSpec{fraction, stratified, 1}); }),
                      ErrorCode::TooFewSamples);
            continue;
        }
        TrainTestSplit s = train_test_split(m, SplitSpec{fraction, stratified, rng()});
        std::set<std::size_t> train(s.train.begin(), s.train.end()), test(s.test.begin(), s.test.end());
        std::vector<std::size_t> both;
        std::set_union(train.begin(), train.end(), test.begin(), test.end(), std::back_inserter(both));
        EXPECT_EQ(both, m.labeled_rows());
        EXPECT_EQ(train.size() + test.size(), both.size());
        EXPECT_TRUE(std::is_sorted(s.test.begin(), s.test.end()));
        const std::size_t n = n_sus + n_res;
        EXPECT_EQ(s.test.size(), static_cast<std::size_t>(std::ceil(fraction * n - 1e-9)));
        if (stratified) {
            const double expect_res = static_cast<double>(s.test.size()) * n_res / n;
            EXPECT_LE(std::abs(static_cast<double>(count_class(m, s.test, R)) - expect_res), 1.0 + 1e-9);
            EXPECT_GE(count_class(m, s.test, R), 1u);
            EXPECT_GE(count_class(m, s.train, R), 1u);
        }
    }
}

TEST(Split, Errors) {
    EXPECT_EQ(code_of([] { train_test_split(labeled(1, 5), SplitSpec{}); }), ErrorCode::TooFewSamples);
    EXPECT_EQ(code_of([] { train_test_split(labeled(5, 5), SplitSpec{1.0}); }), ErrorCode::InvalidParameter);
    EXPECT_EQ(code_of([] { train_test_split(labeled(5, 5), SplitSpec{0.0}); }), ErrorCode::InvalidParameter);
}

TEST(Subsample, StratifiedDraws) {
    FeatureMatrix m = labeled(30, 70);
    Rng rng(62);
    const auto rows = m.labeled_rows();
    for (std::size_t size : {4u, 10u, 25u, 100u}) {
        auto sub = stratified_subsample(m, rows, size, rng);
        EXPECT_EQ(sub.size(), size);
        EXPECT_GE(count_class(m, sub, S), 2u);
        EXPECT_EQ(std::set<std::size_t>(sub.begin(), sub.end()).size(), size);
    }
    EXPECT_EQ(code_of([&] { stratified_subsample(m, rows, 101, rng); }), ErrorCode::SizeExceedsDataset);
}

TEST(Accuracy, Examples) {
    std::vector<Phenotype> a{S, R, R, S, R, S, S, R, R, S};
    std::vector<Phenotype> flipped;
    for (auto p : a) flipped.push_back(p == S ? R : S);
    EXPECT_DOUBLE_EQ(accuracy(a, a), 1.0);
    EXPECT_DOUBLE_EQ(accuracy(flipped, a), 0.0);
    std::vector<Phenotype> nine = a;
    nine[3] = R;
    EXPECT_DOUBLE_EQ(accuracy(nine, a), 0.9);
    EXPECT_EQ(code_of([&] { accuracy(std::span(a).first(3), a); }), ErrorCode::LengthMismatch);
    EXPECT_EQ(code_of([] { accuracy({}, {}); }), ErrorCode::LengthMismatch);
}

TEST(Roc, Examples) {
    EXPECT_DOUBLE_EQ(roc_curve(std::vector<double>{0.9, 0.8, 0.3, 0.1}, std::vector<Phenotype>{R, R, S, S}).auc, 1.0);
    RocCurve flat = roc_curve(std::vector<double>{0.4, 0.4, 0.4}, std::vector<Phenotype>{R, S, S});
    EXPECT_EQ(flat.auc, 0.5);
    EXPECT_EQ(flat.points.size(), 2u);
    EXPECT_EQ(code_of([] { roc_curve(std::vector<double>{0.1, 0.2}, std::vector<Phenotype>{R, R}); }),
              ErrorCode::SingleClassEval);
    EXPECT_EQ(code_of([] { roc_curve(std::vector<double>{0.1}, std::vector<Phenotype>{R, S}); }),
              ErrorCode::LengthMismatch);
    EXPECT_EQ(code_of([] { roc_curve(std::vector<double>{NAN, 0.1}, std::vector<Phenotype>{R, S}); }),
              ErrorCode::InvalidParameter);
}

TEST(Roc, AgreesWithPairwiseOracleAndCurveInvariants) {
    Rng rng(63);
    for (int trial = 0; trial < 300; ++trial) {
        const std::size_t n = 2 + uniform_index(rng, 300);
        std::vector<double> scores(n);
        std::vector<Phenotype> labels(n);
        const std::size_t levels = 1 + uniform_index(rng, 20);
        for (std::size_t i = 0; i < n; ++i) {
            scores[i] = trial % 2 ? static_cast<double>(uniform_index(rng, levels)) / levels : uniform01(rng);
            labels[i] = uniform_index(rng, 2) ? R : S;
        }
        labels[0] = R;
        labels[1] = S;
        RocCurve roc = roc_curve(scores, labels);
        EXPECT_NEAR(roc.auc, oracle::pairwise_auc(scores, fixture::is_res(labels)), 1e-9);
        ASSERT_GE(roc.points.size(), 2u);
        EXPECT_EQ(roc.points.front().fpr, 0.0);
        EXPECT_EQ(roc.points.front().tpr, 0.0);
        EXPECT_EQ(roc.points.back().fpr, 1.0);
        EXPECT_EQ(roc.points.back().tpr, 1.0);
        double area = 0;
        for (std::size_t i = 1; i < roc.points.size(); ++i) {
            EXPECT_GE(roc.points[i].fpr, roc.points[i - 1].fpr);
            EXPECT_GE(roc.points[i].tpr, roc.points[i - 1].tpr);
            area += (roc.points[i].fpr - roc.points[i - 1].fpr) * (roc.points[i].tpr + roc.points[i - 1].tpr) / 2;
        }
        EXPECT_NEAR(area, roc.auc, 1e-12);
        EXPECT_EQ(roc.points.size(), std::set<double>(scores.begin(), scores.end()).size() + 1);
    }
}

TEST(Algorithm, Names) {
    for (Algorithm a : {Algorithm::Forest, Algorithm::AdaBoost, Algorithm::Lasso})
        EXPECT_EQ(parse_algorithm(to_string(a)), a);
    EXPECT_EQ(code_of([] { parse_algorithm("svm"); }), ErrorCode::InvalidParameter);
}

TEST(Holdout, EveryLearnerRunsOnPlantedData) {
    FeatureMatrix m = planted_matrix(5, 60);
    for (Algorithm a : {Algorithm::Forest, Algorithm::AdaBoost, Algorithm::Lasso}) {
        LearnerConfig learner;
        learner.algorithm = a;
        learner.forest.n_trees = 20;
        learner.forest.max_features = MaxFeatures::all();
        EvalReport report = evaluate_holdout(m, learner, SplitSpec{0.2, true, 3});
        EXPECT_EQ(report.n_test, 12u);
        EXPECT_EQ(report.n_train, 48u);
        EXPECT_GE(report.accuracy, 0.9) << to_string(a);
        EXPECT_EQ(report.k, 7);
        EXPECT_EQ(report.algorithm, to_string(a));
    }
}

TEST(Holdout, ModelFeatureCountMustMatch) {
    FeatureMatrix m = planted_matrix(6, 20);
    LinearModel narrow;
    narrow.weights = {1.0};
    EXPECT_EQ(code_of([&] { evaluate_model(Model{narrow}, m, m.labeled_rows()); }), ErrorCode::FeatureCountMismatch);
}

TEST(CrossDataset, Behaviour) {
    FeatureMatrix train = planted_matrix(7, 60);
    LearnerConfig learner;
    learner.forest.n_trees = 20;
    learner.forest.max_features = MaxFeatures::all();
    learner.forest.bootstrap = false;
    EvalReport self = cross_dataset_eval(train, train, learner);
    EXPECT_DOUBLE_EQ(self.accuracy, 1.0);

    SynthSpec spec;
    spec.n_isolates = 60;
    spec.contig_length = 400;
    spec.marker = "GATTACA";
    spec.marker_presence_in_res = 1.0;
    spec.marker_presence_in_sus = 0.0;
    spec.seed = 8;
    FeatureMatrix other = build_matrix(generate_corpus(spec).dataset, train.vocabulary);
    EXPECT_GE(cross_dataset_eval(train, other, learner).accuracy, 0.8);

    FeatureMatrix unrelated = planted_matrix(9, 20);
    EXPECT_EQ(code_of([&] { cross_dataset_eval(train, unrelated, learner); }), ErrorCode::VocabularyMismatch);
}

TEST(LearningCurve, FullSizeEqualsSingleHoldout) {
    FeatureMatrix m = planted_matrix(10, 40, 0.9, 0.1);
    ForestParams params;
    params.n_trees = 15;
    CurveSpec spec{{40}, 1, 0.2, CurveProtocol::SubsampleThenSplit, 77};
    LearningCurve curve = learning_curve(m, spec, params);

    const std::uint64_t seed = cell_seed(77, 40, 0);
    LearnerConfig learner;
    learner.forest = params;
    learner.forest.seed = seed;
    EvalReport single = evaluate_holdout(m, learner, SplitSpec{0.2, true, seed});
    EXPECT_EQ(curve.mean_accuracy[0], single.accuracy);
    EXPECT_EQ(curve.std_accuracy[0], 0.0);
}

TEST(LearningCurve, ShapeDeterminismAndBounds) {
    FeatureMatrix m = planted_matrix(11, 60);
    ForestParams params;
    params.n_trees = 10;
    params.max_features = MaxFeatures::all();
    CurveSpec spec{{25, 50}, 3, 0.2, CurveProtocol::SubsampleThenSplit, 5};
    LearningCurve a = learning_curve(m, spec, params, 1);
    LearningCurve b = learning_curve(m, spec, params, 4);
    EXPECT_EQ(a.mean_accuracy, b.mean_accuracy);
    EXPECT_EQ(a.accuracies, b.accuracies);
    ASSERT_EQ(a.mean_accuracy.size(), 2u);
    ASSERT_EQ(a.std_accuracy.size(), 2u);
    for (double mean : a.mean_accuracy) EXPECT_GE(mean, 0.5);

    spec.protocol = CurveProtocol::FixedTestSet;
    spec.sizes = {25, 48};
    LearningCurve fixed = learning_curve(m, spec, params);
    for (double mean : fixed.mean_accuracy) EXPECT_GE(mean, 0.5);

    CurveSpec too_big{{61}, 1, 0.2, CurveProtocol::SubsampleThenSplit, 5};
    EXPECT_EQ(code_of([&] { learning_curve(m, too_big, params); }), ErrorCode::SizeExceedsDataset);
    CurveSpec unsorted{{50, 25}, 1, 0.2, CurveProtocol::SubsampleThenSplit, 5};
    EXPECT_EQ(code_of([&] { learning_curve(m, unsorted, params); }), ErrorCode::InvalidParameter);
}

TEST(Report, JsonKeyOrderAndTsv) {
    EvalReport r;
    r.k = 10;
    r.n_isolates = 3;
    r.n_features = 9;
    r.seed = 4;
    r.algorithm = "forest";
    r.accuracy = 0.1;
    r.roc.points = {{0, 0}, {0.5, 1}, {1, 1}};
    r.roc.auc = 0.75;
    r.top_regions = {{"PLANTED", 0.9}};
    const std::string json = eval_report_json(r);
    std::vector<std::string> keys{"\"k\"", "\"canonical\"", "\"n_isolates\"", "\"n_features\"", "\"seed\"",
                                  "\"algorithm\"", "\"n_train\"", "\"n_test\"", "\"accuracy\"", "\"auc\"",
                                  "\"roc_points\"", "\"curve\"", "\"top_regions\""};
    std::size_t last = 0;
    for (const auto& key : keys) {
        const std::size_t at = json.find(key);
        ASSERT_NE(at, std::string::npos) << key;
        EXPECT_GT(at, last == 0 ? 0 : last) << key;
        last = at;
    }
    EXPECT_EQ(eval_report_json(r), json);

    std::ostringstream roc;
    write_roc_tsv(roc, r.roc);
    EXPECT_EQ(roc.str(), "fpr\ttpr\n0\t0\n0.5\t1\n1\t1\n");
    EXPECT_EQ(format_double(0.1), "0.1");
    EXPECT_EQ(std::stod(format_double(1.0 / 3)), 1.0 / 3);
}
