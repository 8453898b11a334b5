#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "amrkit/feature_matrix.hpp"
#include "amrkit/model_io.hpp"
#include "amrkit/random.hpp"

namespace amrkit {

struct SplitSpec {
    double test_fraction = 0.2;
    bool stratified = true;
    std::uint64_t seed = 0;

    void validate() const;
};

struct TrainTestSplit {
    std::vector<std::size_t> train;  // matrix row indices, ascending
    std::vector<std::size_t> test;
};

// Partitions `rows` (all labeled rows when omitted). The test side gets
// ceil(test_fraction * n) rows; stratified mode apportions them by class with
// at least one train and one test row per class. Throws TooFewSamples.
TrainTestSplit train_test_split(const FeatureMatrix& matrix, std::span<const std::size_t> rows, const SplitSpec& spec);
TrainTestSplit train_test_split(const FeatureMatrix& matrix, const SplitSpec& spec);

// Class-stratified draw of `size` rows out of `rows`, returned ascending.
// Each class keeps at least min(2, class size) rows. Throws SizeExceedsDataset.
std::vector<std::size_t> stratified_subsample(const FeatureMatrix& matrix, std::span<const std::size_t> rows,
                                              std::size_t size, Rng& rng);

// Throws LengthMismatch (including empty input).
double accuracy(std::span<const Phenotype> predictions, std::span<const Phenotype> labels);

struct RocPoint {
    double fpr = 0.0;
    double tpr = 0.0;
};

struct RocCurve {
    std::vector<RocPoint> points;  // (0,0) ... (1,1), one vertex per distinct score
    double auc = 0.0;              // trapezoidal area
};

// RES is the positive class. Throws SingleClassEval, LengthMismatch,
// InvalidParameter (non-finite score).
RocCurve roc_curve(std::span<const double> scores, std::span<const Phenotype> labels);

enum class Algorithm { Forest, AdaBoost, Lasso };

std::string_view to_string(Algorithm a);
Algorithm parse_algorithm(std::string_view name);

struct LearnerConfig {
    Algorithm algorithm = Algorithm::Forest;
    ForestParams forest;
    BoostParams boost;
    LinearParams linear;
};

Model train_model(const TrainingSet& data, const LearnerConfig& config, unsigned threads = 1);

struct CurveStats {
    std::size_t size = 0;
    double mean_accuracy = 0.0;
    double std_accuracy = 0.0;
};

struct RegionScore {
    std::string region_id;
    double importance = 0.0;

    bool operator==(const RegionScore&) const = default;
};

using RegionRanking = std::vector<RegionScore>;

struct EvalReport {
    int k = 0;
    bool canonical = true;
    std::size_t n_isolates = 0;
    std::size_t n_features = 0;
    std::uint64_t seed = 0;
    std::string algorithm;
    std::size_t n_train = 0;
    std::size_t n_test = 0;
    double accuracy = 0.0;
    RocCurve roc;
    std::vector<CurveStats> curve;
    RegionRanking top_regions;
};

// Splits `rows`, trains on the train side and scores the test side.
EvalReport evaluate_holdout(const FeatureMatrix& matrix, std::span<const std::size_t> rows,
                            const LearnerConfig& learner, const SplitSpec& split, unsigned threads = 1);
EvalReport evaluate_holdout(const FeatureMatrix& matrix, const LearnerConfig& learner, const SplitSpec& split,
                            unsigned threads = 1);

// Scores an already trained model on `rows`. Throws FeatureCountMismatch.
EvalReport evaluate_model(const Model& model, const FeatureMatrix& matrix, std::span<const std::size_t> rows);

// Trains on every labeled row of `train` and evaluates on every labeled row of
// `test`. Both must share one vocabulary; throws VocabularyMismatch.
EvalReport cross_dataset_eval(const FeatureMatrix& train, const FeatureMatrix& test, const LearnerConfig& learner,
                              unsigned threads = 1);

enum class CurveProtocol {
    SubsampleThenSplit,  // draw a subset of the given size, then split it 80/20
    FixedTestSet,        // hold out one test set; subsample training rows only
};

struct CurveSpec {
    std::vector<std::size_t> sizes;
    std::size_t repeats = 10;
    double test_fraction = 0.2;
    CurveProtocol protocol = CurveProtocol::SubsampleThenSplit;
    std::uint64_t seed = 0;
};

struct LearningCurve {
    std::vector<std::size_t> sizes;
    std::vector<double> mean_accuracy;
    std::vector<double> std_accuracy;  // population standard deviation over repeats
    std::vector<std::vector<double>> accuracies;  // [size][repeat]
    std::size_t repeats = 0;
    std::uint64_t seed = 0;

    std::vector<CurveStats> stats() const;
};

// Seed for one (size, repeat) cell; drives the subsample, the split and the forest.
inline std::uint64_t cell_seed(std::uint64_t seed, std::size_t size, std::size_t repeat) {
    return derive_seed(seed, {size, repeat});
}

// Random-forest accuracy per subsample size. Cells are independent and run on
// up to `threads` workers. Throws SizeExceedsDataset.
LearningCurve learning_curve(const FeatureMatrix& matrix, const CurveSpec& spec, const ForestParams& params,
                             unsigned threads = 1);

}  // namespace amrkit
