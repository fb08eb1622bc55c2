#include "codelab/web/suite.hpp"

#include "codelab/errors.hpp"

#include <openssl/evp.h>

#include <cmath>
#include <fstream>
#include <iomanip>
#include <sstream>

namespace codelab::web {

const std::vector<std::string>& suite_envs() {
  static const std::vector<std::string> envs{"login", "address", "payment", "shopping", "flight"};
  return envs;
}

namespace {

struct EnvRecipe {
  std::vector<std::string> fields;
  std::vector<std::string> distractors;
};

const std::map<std::string, EnvRecipe>& recipes() {
  static const std::map<std::string, EnvRecipe> r{
      {"login",
       {{"username", "password", "rememberme", "stayloggedin", "captcha"},
        {"header_login", "forgotusername", "forgotpassword"}}},
      {"address",
       {{"firstname", "lastname", "addressline1", "addressline2", "city", "state", "zipcode"},
        {"header", "navbar", "footer"}}},
      {"payment",
       {{"cc", "ccnumber", "cccvv", "ccexpdate", "fullname"}, {"header", "next_checkout", "footer"}}},
      {"flight",
       {{"departureairport", "destinationairport", "departuredate", "destinationdate", "flighttype",
         "cabin", "numberofpeople"},
        {"header", "navbar", "footer"}}},
      {"shopping",
       {{"username", "password", "rememberme", "stayloggedin", "captcha", "firstname", "lastname",
         "addressline1", "addressline2", "city", "state", "zipcode"},
        {"navbar", "carousel", "deck"}}},
  };
  return r;
}

std::size_t truncated(int level, std::size_t full) {
  return static_cast<std::size_t>(std::ceil(level / 4.0 * static_cast<double>(full)));
}

WebsiteDesign single_page(const EnvRecipe& r, int level) {
  WebsiteDesign d;
  d.num_pages = 1;
  const std::size_t f = truncated(level, r.fields.size());
  for (std::size_t i = 0; i < f; ++i) d.placements.push_back({r.fields[i], 0});
  for (int i = 0; i < level - 1; ++i) d.placements.push_back({r.distractors[static_cast<std::size_t>(i)], 0});
  return d;
}

/// Home page of passives, then the login fields, then the address fields.
WebsiteDesign shopping(const EnvRecipe& r, int level) {
  WebsiteDesign d;
  d.placements.push_back({"header_select_items", 0});
  for (int i = 0; i < level - 1; ++i) d.placements.push_back({r.distractors[static_cast<std::size_t>(i)], 0});
  const std::size_t f = truncated(level, r.fields.size());
  const std::size_t login_fields = 5;
  for (std::size_t i = 0; i < f; ++i) d.placements.push_back({r.fields[i], i < login_fields ? 1u : 2u});
  d.num_pages = f > login_fields ? 3 : 2;
  return d;
}

}  // namespace

SuiteDesigns build_suite() {
  SuiteDesigns suite;
  for (int level = 1; level <= 4; ++level)
    for (const std::string& env : suite_envs()) {
      const EnvRecipe& r = recipes().at(env);
      suite[level][env] = env == "shopping" ? shopping(r, level) : single_page(r, level);
    }
  return suite;
}

nlohmann::json suite_to_json(const SuiteDesigns& suite) {
  nlohmann::json entries = nlohmann::json::array();
  for (const auto& [level, envs] : suite)
    for (const std::string& env : suite_envs()) {
      auto it = envs.find(env);
      if (it == envs.end()) continue;
      entries.push_back({{"level", level}, {"env", env}, {"design", to_json(it->second)}});
    }
  return {{"format", "codelab-suite"}, {"version", 1}, {"designs", std::move(entries)}};
}

SuiteDesigns suite_from_json(const nlohmann::json& doc) {
  if (doc.value("format", "") != "codelab-suite" || doc.value("version", 0) != 1)
    throw IoError("not a codelab suite file (format/version mismatch)");
  SuiteDesigns suite;
  for (const auto& e : doc.at("designs"))
    suite[e.at("level").get<int>()][e.at("env").get<std::string>()] = design_from_json(e.at("design"));
  return suite;
}

const char* const kSuiteSha256 = "d723748703a01355d0fd00c378b250107e54ddf5e0a2f81868f6671a5ea6fb4b";

std::string sha256_hex(const std::string& bytes) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(bytes.data(), bytes.size(), digest, &len, EVP_sha256(), nullptr) != 1)
    throw IoError("sha256 failed");
  std::ostringstream out;
  for (unsigned int i = 0; i < len; ++i)
    out << std::hex << std::setw(2) << std::setfill('0') << static_cast<int>(digest[i]);
  return out.str();
}

SuiteDesigns load_suite(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open suite fixture " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  const std::string bytes = buf.str();
  const std::string hash = sha256_hex(bytes);
  if (hash != kSuiteSha256)
    throw IoError("suite fixture " + path.string() + " hash " + hash + " does not match the pinned " +
                  kSuiteSha256);
  try {
    return suite_from_json(nlohmann::json::parse(bytes));
  } catch (const nlohmann::json::exception& e) {
    throw IoError("malformed suite fixture " + path.string() + ": " + e.what());
  }
}

std::filesystem::path default_suite_path() {
  return std::filesystem::path(CODELAB_DATA_DIR) / "test_suite.json";
}

const SuiteDesigns& test_suite() {
  static const SuiteDesigns suite = load_suite(default_suite_path());
  return suite;
}

}  // namespace codelab::web
