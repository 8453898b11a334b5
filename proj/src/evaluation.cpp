#include "amrkit/evaluation.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numeric>

#include "amrkit/error.hpp"
#include "amrkit/parallel.hpp"

namespace amrkit {

void SplitSpec::validate() const {
    if (!(test_fraction > 0.0 && test_fraction < 1.0))
        fail(ErrorCode::InvalidParameter, "test_fraction must lie strictly between 0 and 1");
}

namespace {

using ClassRows = std::array<std::vector<std::size_t>, 2>;  // [SUS, RES]

ClassRows by_class(const FeatureMatrix& matrix, std::span<const std::size_t> rows) {
    ClassRows out;
    for (std::size_t r : rows) {
        if (r >= matrix.n_rows()) fail(ErrorCode::IndexOutOfRange, "row index beyond matrix");
        if (!matrix.labels[r]) fail(ErrorCode::NoLabeledSamples, "row '" + matrix.row_ids[r] + "' is unlabeled");
        out[static_cast<std::size_t>(*matrix.labels[r])].push_back(r);
    }
    return out;
}

// Splits `target` between the two classes in proportion to their sizes
// (largest remainder), then moves units until every class sits in [lo, hi].
std::array<std::size_t, 2> apportion(std::size_t target, std::array<std::size_t, 2> sizes,
                                     std::array<std::size_t, 2> lo, std::array<std::size_t, 2> hi) {
    const double n = static_cast<double>(sizes[0] + sizes[1]);
    std::array<double, 2> exact{};
    std::array<std::size_t, 2> alloc{};
    for (int c = 0; c < 2; ++c) {
        exact[c] = static_cast<double>(target) * static_cast<double>(sizes[c]) / n;
        alloc[c] = static_cast<std::size_t>(std::floor(exact[c]));
    }
    if (alloc[0] + alloc[1] < target) {
        const double frac0 = exact[0] - std::floor(exact[0]);
        const double frac1 = exact[1] - std::floor(exact[1]);
        ++alloc[frac1 > frac0 ? 1 : 0];
    }
    for (int c = 0; c < 2; ++c) alloc[c] = std::clamp(alloc[c], lo[c], hi[c]);
    while (alloc[0] + alloc[1] > target) {
        int c = (static_cast<double>(alloc[1]) - exact[1] > static_cast<double>(alloc[0]) - exact[0]) ? 1 : 0;
        if (alloc[c] <= lo[c]) c = 1 - c;
        if (alloc[c] <= lo[c]) fail(ErrorCode::TooFewSamples, "cannot keep both classes represented");
        --alloc[c];
    }
    while (alloc[0] + alloc[1] < target) {
        int c = (exact[1] - static_cast<double>(alloc[1]) > exact[0] - static_cast<double>(alloc[0])) ? 1 : 0;
        if (alloc[c] >= hi[c]) c = 1 - c;
        if (alloc[c] >= hi[c]) fail(ErrorCode::TooFewSamples, "cannot keep both classes represented");
        ++alloc[c];
    }
    return alloc;
}

}  // namespace

TrainTestSplit train_test_split(const FeatureMatrix& matrix, std::span<const std::size_t> rows,
                                const SplitSpec& spec) {
    spec.validate();
    ClassRows classes = by_class(matrix, rows);
    const std::size_t n = classes[0].size() + classes[1].size();
    const auto n_test = static_cast<std::size_t>(std::ceil(spec.test_fraction * static_cast<double>(n) - 1e-9));
    if (n < 2 || n_test < 1 || n_test >= n)
        fail(ErrorCode::TooFewSamples, "need at least one train and one test row, have " + std::to_string(n));

    Rng rng(spec.seed);
    TrainTestSplit out;
    if (spec.stratified) {
        if (classes[0].size() < 2 || classes[1].size() < 2)
            fail(ErrorCode::TooFewSamples, "stratified split needs at least 2 rows of each class");
        auto alloc = apportion(n_test, {classes[0].size(), classes[1].size()}, {1, 1},
                               {classes[0].size() - 1, classes[1].size() - 1});
        for (int c = 0; c < 2; ++c) {
            std::vector<std::size_t>& members = classes[c];
            shuffle(std::span(members), rng);
            out.test.insert(out.test.end(), members.begin(), members.begin() + static_cast<std::ptrdiff_t>(alloc[c]));
            out.train.insert(out.train.end(), members.begin() + static_cast<std::ptrdiff_t>(alloc[c]), members.end());
        }
    } else {
        std::vector<std::size_t> all = classes[0];
        all.insert(all.end(), classes[1].begin(), classes[1].end());
        std::sort(all.begin(), all.end());
        shuffle(std::span(all), rng);
        out.test.assign(all.begin(), all.begin() + static_cast<std::ptrdiff_t>(n_test));
        out.train.assign(all.begin() + static_cast<std::ptrdiff_t>(n_test), all.end());
    }
    std::sort(out.train.begin(), out.train.end());
    std::sort(out.test.begin(), out.test.end());
    return out;
}

TrainTestSplit train_test_split(const FeatureMatrix& matrix, const SplitSpec& spec) {
    return train_test_split(matrix, matrix.labeled_rows(), spec);
}

std::vector<std::size_t> stratified_subsample(const FeatureMatrix& matrix, std::span<const std::size_t> rows,
                                              std::size_t size, Rng& rng) {
    ClassRows classes = by_class(matrix, rows);
    const std::size_t n = classes[0].size() + classes[1].size();
    if (size > n)
        fail(ErrorCode::SizeExceedsDataset,
             "subsample size " + std::to_string(size) + " exceeds " + std::to_string(n) + " labeled rows");
    auto alloc = apportion(size, {classes[0].size(), classes[1].size()},
                           {std::min<std::size_t>(2, classes[0].size()), std::min<std::size_t>(2, classes[1].size())},
                           {classes[0].size(), classes[1].size()});
    std::vector<std::size_t> out;
    for (int c = 0; c < 2; ++c) {
        shuffle(std::span(classes[c]), rng);
        out.insert(out.end(), classes[c].begin(), classes[c].begin() + static_cast<std::ptrdiff_t>(alloc[c]));
    }
    std::sort(out.begin(), out.end());
    return out;
}

double accuracy(std::span<const Phenotype> predictions, std::span<const Phenotype> labels) {
    if (predictions.size() != labels.size() || labels.empty())
        fail(ErrorCode::LengthMismatch, "accuracy needs equal-length, non-empty inputs");
    std::size_t hits = 0;
    for (std::size_t i = 0; i < labels.size(); ++i) hits += predictions[i] == labels[i];
    return static_cast<double>(hits) / static_cast<double>(labels.size());
}

RocCurve roc_curve(std::span<const double> scores, std::span<const Phenotype> labels) {
    if (scores.size() != labels.size()) fail(ErrorCode::LengthMismatch, "one score per label required");
    std::uint64_t positives = 0;
    for (Phenotype p : labels) positives += p == Phenotype::RES;
    const std::uint64_t negatives = labels.size() - positives;
    if (positives == 0 || negatives == 0)
        fail(ErrorCode::SingleClassEval, "ROC needs both SUS and RES labels");
    for (double s : scores)
        if (!std::isfinite(s)) fail(ErrorCode::InvalidParameter, "non-finite score");

    std::vector<std::size_t> order(scores.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return scores[a] > scores[b]; });

    RocCurve roc;
    roc.points.push_back({0.0, 0.0});
    std::uint64_t tp = 0, fp = 0;
    // Twice the area in units of one (positive, negative) pair; exact in integers.
    std::uint64_t twice_area = 0;
    for (std::size_t i = 0; i < order.size();) {
        const double s = scores[order[i]];
        std::uint64_t group_tp = 0, group_fp = 0;
        for (; i < order.size() && scores[order[i]] == s; ++i)
            (labels[order[i]] == Phenotype::RES ? group_tp : group_fp) += 1;
        twice_area += group_fp * (2 * tp + group_tp);
        tp += group_tp;
        fp += group_fp;
        roc.points.push_back({static_cast<double>(fp) / static_cast<double>(negatives),
                              static_cast<double>(tp) / static_cast<double>(positives)});
    }
    roc.auc = static_cast<double>(twice_area) / (2.0 * static_cast<double>(positives) * static_cast<double>(negatives));
    return roc;
}

std::string_view to_string(Algorithm a) {
    switch (a) {
        case Algorithm::Forest: return "forest";
        case Algorithm::AdaBoost: return "adaboost";
        case Algorithm::Lasso: return "lasso";
    }
    return "forest";
}

Algorithm parse_algorithm(std::string_view name) {
    if (name == "forest") return Algorithm::Forest;
    if (name == "adaboost") return Algorithm::AdaBoost;
    if (name == "lasso") return Algorithm::Lasso;
    fail(ErrorCode::InvalidParameter, "unknown algorithm '" + std::string(name) + "'");
}

Model train_model(const TrainingSet& data, const LearnerConfig& config, unsigned threads) {
    switch (config.algorithm) {
        case Algorithm::Forest: return fit_forest(data, config.forest, threads);
        case Algorithm::AdaBoost: return fit_adaboost(data, config.boost);
        case Algorithm::Lasso: return fit_l1_linear(data, config.linear);
    }
    fail(ErrorCode::InvalidParameter, "unknown algorithm");
}

namespace {

void score_rows(const Model& model, const FeatureMatrix& matrix, std::span<const std::size_t> rows,
                EvalReport& report) {
    std::vector<double> scores;
    std::vector<Phenotype> predicted, truth;
    for (std::size_t r : rows) {
        if (!matrix.labels[r]) continue;
        const double s = predict_score(model, matrix.rows[r]);
        scores.push_back(s);
        predicted.push_back(classify(s));
        truth.push_back(*matrix.labels[r]);
    }
    report.n_test = truth.size();
    report.accuracy = accuracy(predicted, truth);
    report.roc = roc_curve(scores, truth);
}

EvalReport base_report(const FeatureMatrix& matrix, std::string_view algorithm) {
    EvalReport r;
    r.k = matrix.vocabulary.spec().k;
    r.canonical = matrix.vocabulary.spec().canonical;
    r.n_isolates = matrix.n_rows();
    r.n_features = matrix.n_features();
    r.algorithm = std::string(algorithm);
    return r;
}

}  // namespace

EvalReport evaluate_holdout(const FeatureMatrix& matrix, std::span<const std::size_t> rows,
                            const LearnerConfig& learner, const SplitSpec& split, unsigned threads) {
    TrainTestSplit parts = train_test_split(matrix, rows, split);
    TrainingSet train(matrix, parts.train);
    Model model = train_model(train, learner, threads);
    EvalReport report = base_report(matrix, to_string(learner.algorithm));
    report.seed = split.seed;
    report.n_train = parts.train.size();
    score_rows(model, matrix, parts.test, report);
    return report;
}

EvalReport evaluate_holdout(const FeatureMatrix& matrix, const LearnerConfig& learner, const SplitSpec& split,
                            unsigned threads) {
    return evaluate_holdout(matrix, matrix.labeled_rows(), learner, split, threads);
}

EvalReport evaluate_model(const Model& model, const FeatureMatrix& matrix, std::span<const std::size_t> rows) {
    if (model_n_features(model) != matrix.n_features())
        fail(ErrorCode::FeatureCountMismatch, "model expects " + std::to_string(model_n_features(model)) +
                                                  " features, matrix has " + std::to_string(matrix.n_features()));
    EvalReport report = base_report(matrix, model_kind(model));
    score_rows(model, matrix, rows, report);
    return report;
}

EvalReport cross_dataset_eval(const FeatureMatrix& train, const FeatureMatrix& test, const LearnerConfig& learner,
                              unsigned threads) {
    if (!(train.vocabulary == test.vocabulary))
        fail(ErrorCode::VocabularyMismatch, "train and test matrices use different vocabularies");
    TrainingSet data(train);
    Model model = train_model(data, learner, threads);
    EvalReport report = base_report(test, to_string(learner.algorithm));
    report.n_train = data.n_samples();
    score_rows(model, test, test.labeled_rows(), report);
    return report;
}

std::vector<CurveStats> LearningCurve::stats() const {
    std::vector<CurveStats> out;
    for (std::size_t i = 0; i < sizes.size(); ++i) out.push_back({sizes[i], mean_accuracy[i], std_accuracy[i]});
    return out;
}

LearningCurve learning_curve(const FeatureMatrix& matrix, const CurveSpec& spec, const ForestParams& params,
                             unsigned threads) {
    if (spec.sizes.empty()) fail(ErrorCode::InvalidParameter, "no subsample sizes given");
    if (spec.repeats < 1) fail(ErrorCode::InvalidParameter, "repeats must be >= 1");
    if (!std::is_sorted(spec.sizes.begin(), spec.sizes.end()))
        fail(ErrorCode::InvalidParameter, "sizes must be ascending");

    const std::vector<std::size_t> labeled = matrix.labeled_rows();
    const SplitSpec base_split{spec.test_fraction, true, spec.seed};
    TrainTestSplit fixed;
    std::span<const std::size_t> pool = labeled;
    if (spec.protocol == CurveProtocol::FixedTestSet) {
        fixed = train_test_split(matrix, labeled, base_split);
        pool = fixed.train;
    }
    if (spec.sizes.back() > pool.size())
        fail(ErrorCode::SizeExceedsDataset, "size " + std::to_string(spec.sizes.back()) + " exceeds the " +
                                                std::to_string(pool.size()) + " available rows");

    LearningCurve curve;
    curve.sizes = spec.sizes;
    curve.repeats = spec.repeats;
    curve.seed = spec.seed;
    curve.accuracies.assign(spec.sizes.size(), std::vector<double>(spec.repeats, 0.0));

    parallel_for(spec.sizes.size() * spec.repeats, threads, [&](std::size_t cell) {
        const std::size_t si = cell / spec.repeats;
        const std::size_t rep = cell % spec.repeats;
        const std::uint64_t seed = cell_seed(spec.seed, spec.sizes[si], rep);
        Rng rng(derive_seed(seed, {1}));
        std::vector<std::size_t> subset = stratified_subsample(matrix, pool, spec.sizes[si], rng);

        LearnerConfig learner;
        learner.forest = params;
        learner.forest.seed = seed;
        double acc;
        if (spec.protocol == CurveProtocol::SubsampleThenSplit) {
            acc = evaluate_holdout(matrix, subset, learner, SplitSpec{spec.test_fraction, true, seed}).accuracy;
        } else {
            Model model = train_model(TrainingSet(matrix, subset), learner);
            acc = evaluate_model(model, matrix, fixed.test).accuracy;
        }
        curve.accuracies[si][rep] = acc;
    });

    for (const auto& accs : curve.accuracies) {
        const double n = static_cast<double>(accs.size());
        double mean = std::accumulate(accs.begin(), accs.end(), 0.0) / n;
        double var = 0;
        for (double a : accs) var += (a - mean) * (a - mean);
        curve.mean_accuracy.push_back(mean);
        curve.std_accuracy.push_back(std::sqrt(var / n));
    }
    return curve;
}

}  // namespace amrkit
