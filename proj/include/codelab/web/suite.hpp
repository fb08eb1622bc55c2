#pragma once

#include "codelab/web/design.hpp"

#include <filesystem>
#include <map>
#include <string>
#include <vector>

namespace codelab::web {

/// Environment names in table order.
const std::vector<std::string>& suite_envs();

using SuiteDesigns = std::map<int, std::map<std::string, WebsiteDesign>>;

/// Builds the versioned evaluation suite (levels 1..4 x five environments).
SuiteDesigns build_suite();

/// Serialised form written to the fixture file.
nlohmann::json suite_to_json(const SuiteDesigns& suite);
SuiteDesigns suite_from_json(const nlohmann::json& doc);

/// Hex SHA-256 of the shipped fixture.
extern const char* const kSuiteSha256;

std::string sha256_hex(const std::string& bytes);

/// Loads the fixture and checks it against the pinned hash. Throws IoError.
SuiteDesigns load_suite(const std::filesystem::path& path);

/// The suite from the default data directory.
const SuiteDesigns& test_suite();

std::filesystem::path default_suite_path();

}  // namespace codelab::web
