#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <variant>

#include "amrkit/adaboost.hpp"
#include "amrkit/forest.hpp"
#include "amrkit/linear.hpp"

namespace amrkit {

using Model = std::variant<ForestModel, BoostModel, LinearModel>;

// Binary model files, little-endian throughout. Layouts are listed in
// README.md ("File formats"). Every reader throws CorruptModelFile on bad
// magic, truncation, trailing bytes or out-of-range references.
std::string serialize_forest(const ForestModel& model);
ForestModel deserialize_forest(std::string_view bytes);

std::string serialize_boost(const BoostModel& model);
BoostModel deserialize_boost(std::string_view bytes);

std::string serialize_linear(const LinearModel& model);
LinearModel deserialize_linear(std::string_view bytes);

void save_model(const Model& model, const std::filesystem::path& path);
// Dispatches on the magic bytes.
Model load_model(const std::filesystem::path& path);

std::size_t model_n_features(const Model& model);

// RES score in [0, 1] for any model kind.
double predict_score(const Model& model, const SparseRow& row);

std::string_view model_kind(const Model& model);

}  // namespace amrkit
