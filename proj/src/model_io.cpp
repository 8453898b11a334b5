#include "amrkit/model_io.hpp"

#include <cmath>

#include "amrkit/error.hpp"
#include "byte_io.hpp"

namespace amrkit {

using detail::ByteReader;
using detail::ByteWriter;

namespace {

constexpr ErrorCode kCorrupt = ErrorCode::CorruptModelFile;

void check_finite(ByteReader& in, double v, const char* what) {
    if (!std::isfinite(v)) in.corrupt(std::string("non-finite ") + what);
}

}  // namespace

std::string serialize_forest(const ForestModel& m) {
    ByteWriter out;
    out.raw("KFOR1");
    out.u64(m.n_features);
    const ForestParams& p = m.params;
    out.u32(p.n_trees);
    out.u8(static_cast<std::uint8_t>(p.max_features.rule));
    out.u64(p.max_features.m);
    out.u8(p.bootstrap ? 1 : 0);
    out.u32(p.max_depth);
    out.u32(p.min_samples_split);
    out.u64(p.seed);
    out.u64(m.trees.size());
    for (const auto& tree : m.trees) {
        out.u64(tree.nodes.size());
        for (const auto& n : tree.nodes) {
            out.i32(n.feature);
            out.f64(n.threshold);
            out.u32(n.left);
            out.u32(n.right);
            out.u32(n.n_sus);
            out.u32(n.n_res);
        }
    }
    for (double v : m.importances) out.f64(v);
    return out.bytes();
}

ForestModel deserialize_forest(std::string_view bytes) {
    ByteReader in(bytes, kCorrupt);
    in.expect_magic("KFOR1");
    ForestModel m;
    m.n_features = in.u64();
    ForestParams& p = m.params;
    p.n_trees = in.u32();
    std::uint8_t rule = in.u8();
    if (rule > 2) in.corrupt("unknown max_features rule");
    p.max_features.rule = static_cast<MaxFeatures::Rule>(rule);
    p.max_features.m = in.u64();
    std::uint8_t bootstrap = in.u8();
    if (bootstrap > 1) in.corrupt("invalid bootstrap flag");
    p.bootstrap = bootstrap == 1;
    p.max_depth = in.u32();
    p.min_samples_split = in.u32();
    p.seed = in.u64();

    std::uint64_t n_trees = in.u64();
    if (n_trees == 0) in.corrupt("forest without trees");
    in.check_count(n_trees, 8);
    m.trees.resize(n_trees);
    for (auto& tree : m.trees) {
        std::uint64_t n_nodes = in.u64();
        if (n_nodes == 0) in.corrupt("tree without nodes");
        in.check_count(n_nodes, 28);
        tree.nodes.resize(n_nodes);
        for (std::uint64_t i = 0; i < n_nodes; ++i) {
            TreeNode& n = tree.nodes[i];
            n.feature = in.i32();
            n.threshold = in.f64();
            n.left = in.u32();
            n.right = in.u32();
            n.n_sus = in.u32();
            n.n_res = in.u32();
            check_finite(in, n.threshold, "threshold");
            if (n.is_leaf()) {
                if (n.feature != -1) in.corrupt("invalid feature index");
                if (n.n_sus + n.n_res == 0) in.corrupt("empty leaf");
            } else {
                if (static_cast<std::uint64_t>(n.feature) >= m.n_features) in.corrupt("split feature out of range");
                if (n.left <= i || n.right <= i || n.left >= n_nodes || n.right >= n_nodes)
                    in.corrupt("child reference out of range");
            }
        }
    }
    in.check_count(m.n_features, 8);
    m.importances.resize(m.n_features);
    for (double& v : m.importances) {
        v = in.f64();
        if (!(v >= 0) || !std::isfinite(v)) in.corrupt("invalid importance");
    }
    in.expect_end();
    return m;
}

std::string serialize_boost(const BoostModel& m) {
    ByteWriter out;
    out.raw("KADA1");
    out.u64(m.n_features);
    out.u32(m.params.n_rounds);
    out.u64(m.params.seed);
    out.u64(m.stumps.size());
    for (std::size_t i = 0; i < m.stumps.size(); ++i) {
        out.u32(m.stumps[i].feature);
        out.f64(m.stumps[i].threshold);
        out.i32(m.stumps[i].polarity);
        out.f64(m.alphas[i]);
    }
    return out.bytes();
}

BoostModel deserialize_boost(std::string_view bytes) {
    ByteReader in(bytes, kCorrupt);
    in.expect_magic("KADA1");
    BoostModel m;
    m.n_features = in.u64();
    m.params.n_rounds = in.u32();
    m.params.seed = in.u64();
    std::uint64_t n = in.u64();
    in.check_count(n, 24);
    m.stumps.resize(n);
    m.alphas.resize(n);
    for (std::uint64_t i = 0; i < n; ++i) {
        Stump& s = m.stumps[i];
        s.feature = in.u32();
        s.threshold = in.f64();
        s.polarity = in.i32();
        m.alphas[i] = in.f64();
        if (s.feature >= m.n_features) in.corrupt("stump feature out of range");
        if (s.polarity != 1 && s.polarity != -1) in.corrupt("invalid stump polarity");
        check_finite(in, s.threshold, "threshold");
        check_finite(in, m.alphas[i], "alpha");
    }
    in.expect_end();
    return m;
}

std::string serialize_linear(const LinearModel& m) {
    ByteWriter out;
    out.raw("KLIN1");
    out.u64(m.weights.size());
    out.f64(m.lambda);
    out.f64(m.intercept);
    out.f64(m.objective);
    out.u32(m.iterations);
    out.u8(m.converged ? 1 : 0);
    for (double w : m.weights) out.f64(w);
    return out.bytes();
}

LinearModel deserialize_linear(std::string_view bytes) {
    ByteReader in(bytes, kCorrupt);
    in.expect_magic("KLIN1");
    LinearModel m;
    std::uint64_t n_features = in.u64();
    m.lambda = in.f64();
    m.intercept = in.f64();
    m.objective = in.f64();
    m.iterations = in.u32();
    std::uint8_t converged = in.u8();
    if (converged > 1) in.corrupt("invalid converged flag");
    m.converged = converged == 1;
    check_finite(in, m.lambda, "lambda");
    check_finite(in, m.intercept, "intercept");
    in.check_count(n_features, 8);
    m.weights.resize(n_features);
    for (double& w : m.weights) {
        w = in.f64();
        check_finite(in, w, "weight");
    }
    in.expect_end();
    return m;
}

void save_model(const Model& model, const std::filesystem::path& path) {
    std::string bytes = std::visit(
        [](const auto& m) -> std::string {
            using T = std::decay_t<decltype(m)>;
            if constexpr (std::is_same_v<T, ForestModel>) return serialize_forest(m);
            else if constexpr (std::is_same_v<T, BoostModel>) return serialize_boost(m);
            else return serialize_linear(m);
        },
        model);
    detail::write_file(path, bytes);
}

Model load_model(const std::filesystem::path& path) {
    std::string bytes = detail::read_file(path);
    std::string_view magic = std::string_view(bytes).substr(0, 5);
    if (magic == "KFOR1") return deserialize_forest(bytes);
    if (magic == "KADA1") return deserialize_boost(bytes);
    if (magic == "KLIN1") return deserialize_linear(bytes);
    fail(kCorrupt, "'" + path.string() + "' is not a model file");
}

std::size_t model_n_features(const Model& model) {
    return std::visit(
        [](const auto& m) -> std::size_t {
            using T = std::decay_t<decltype(m)>;
            if constexpr (std::is_same_v<T, LinearModel>) return m.weights.size();
            else return m.n_features;
        },
        model);
}

double predict_score(const Model& model, const SparseRow& row) {
    return std::visit(
        [&](const auto& m) -> double {
            using T = std::decay_t<decltype(m)>;
            if constexpr (std::is_same_v<T, ForestModel>) return forest_predict_proba(m, row);
            else if constexpr (std::is_same_v<T, BoostModel>) return boost_predict_proba(m, row);
            else return linear_predict_score(m, row);
        },
        model);
}

std::string_view model_kind(const Model& model) {
    switch (model.index()) {
        case 0: return "forest";
        case 1: return "adaboost";
        default: return "lasso";
    }
}

}  // namespace amrkit
