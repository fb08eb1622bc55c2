#pragma once

#include "codelab/nn/tensor.hpp"

#include <json.hpp>

#include <filesystem>

namespace codelab::nn {

/// {"format": "codelab-tensors", "version": 1, "tensors": [{"name", "shape", "data"}]}.
/// Doubles are written in shortest round-trip form, so load(save(x)) is bit-exact.
nlohmann::json tensors_to_json(const ParamRefs& params);

/// Loads values by name; every parameter must be present with a matching shape.
void tensors_from_json(const nlohmann::json& doc, const ParamRefs& params);

void save_checkpoint(const std::filesystem::path& path, const ParamRefs& params);
void load_checkpoint(const std::filesystem::path& path, const ParamRefs& params);

}  // namespace codelab::nn
