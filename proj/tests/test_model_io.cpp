#include <gtest/gtest.h>

#include "amrkit/error.hpp"
#include "amrkit/model_io.hpp"
#include "oracles.hpp"
#include "temp_dir.hpp"

using namespace amrkit;

namespace {

FeatureMatrix random_fixture(Rng& rng) {
    fixture::DenseData d = fixture::random_dense(rng, 30 + uniform_index(rng, 30), 3 + uniform_index(rng, 10), 3);
    return fixture::dense_matrix(d.x, d.y);
}

ErrorCode code_of(const std::function<void()>& fn) {
    try {
        fn();
    } catch (const Error& e) {
        return e.code();
    }
    ADD_FAILURE() << "no amrkit::Error thrown";
    return ErrorCode::IoError;
}

void expect_truncations_rejected(const std::string& bytes, const std::function<void(std::string_view)>& load) {
    for (std::size_t cut = 0; cut < bytes.size(); cut += std::max<std::size_t>(1, bytes.size() / 97))
        EXPECT_EQ(code_of([&] { load(std::string_view(bytes).substr(0, cut)); }), ErrorCode::CorruptModelFile)
            << "cut at " << cut;
    EXPECT_EQ(code_of([&] { load(bytes + '\0'); }), ErrorCode::CorruptModelFile);
}

}  // namespace

TEST(ModelIo, ForestRoundTrip) {
    Rng rng(51);
    for (int trial = 0; trial < 5; ++trial) {
        ForestParams params;
        params.n_trees = 7;
        params.max_depth = trial;
        params.seed = trial;
        ForestModel model = fit_forest(random_fixture(rng), params);
        const std::string bytes = serialize_forest(model);
        EXPECT_EQ(bytes.substr(0, 5), "KFOR1");
        EXPECT_EQ(deserialize_forest(bytes), model);
        expect_truncations_rejected(bytes, [](std::string_view b) { deserialize_forest(b); });
    }
}

TEST(ModelIo, BoostRoundTrip) {
    Rng rng(52);
    for (int trial = 0; trial < 5; ++trial) {
        BoostModel model;
        try {
            model = fit_adaboost(random_fixture(rng), BoostParams{10, static_cast<std::uint64_t>(trial)});
        } catch (const Error&) {
            continue;
        }
        const std::string bytes = serialize_boost(model);
        EXPECT_EQ(bytes.substr(0, 5), "KADA1");
        EXPECT_EQ(deserialize_boost(bytes), model);
        expect_truncations_rejected(bytes, [](std::string_view b) { deserialize_boost(b); });
    }
}

TEST(ModelIo, LinearRoundTrip) {
    Rng rng(53);
    for (int trial = 0; trial < 5; ++trial) {
        LinearModel model = fit_l1_linear(random_fixture(rng), LinearParams{0.01 * (trial + 1)});
        const std::string bytes = serialize_linear(model);
        EXPECT_EQ(bytes.substr(0, 5), "KLIN1");
        EXPECT_EQ(deserialize_linear(bytes), model);
        expect_truncations_rejected(bytes, [](std::string_view b) { deserialize_linear(b); });
    }
}

TEST(ModelIo, FilesDispatchOnMagic) {
    TempDir dir("models");
    Rng rng(54);
    FeatureMatrix m = random_fixture(rng);
    ForestParams fp;
    fp.n_trees = 3;
    const std::vector<Model> models{fit_forest(m, fp), fit_l1_linear(m, LinearParams{})};
    for (const Model& model : models) {
        save_model(model, dir / "m.bin");
        Model back = load_model(dir / "m.bin");
        EXPECT_EQ(back.index(), model.index());
        EXPECT_EQ(back, model);
        EXPECT_EQ(model_n_features(back), m.n_features());
        for (const SparseRow& row : m.rows) EXPECT_EQ(predict_score(back, row), predict_score(model, row));
    }
    dir.write("junk.bin", "KXXX1 nothing here");
    EXPECT_EQ(code_of([&] { load_model(dir / "junk.bin"); }), ErrorCode::CorruptModelFile);
    EXPECT_EQ(code_of([&] { load_model(dir / "missing.bin"); }), ErrorCode::IoError);
    EXPECT_EQ(model_kind(models[0]), "forest");
    EXPECT_EQ(model_kind(models[1]), "lasso");
}
