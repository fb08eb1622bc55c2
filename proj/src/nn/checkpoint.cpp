#include "codelab/nn/checkpoint.hpp"

#include "codelab/errors.hpp"

#include <fstream>
#include <map>

namespace codelab::nn {

nlohmann::json tensors_to_json(const ParamRefs& params) {
  nlohmann::json tensors = nlohmann::json::array();
  for (const Parameter* p : params) {
    nlohmann::json t;
    t["name"] = p->name;
    t["shape"] = p->value.shape();
    const auto d = p->value.data();
    t["data"] = std::vector<double>(d.begin(), d.end());
    tensors.push_back(std::move(t));
  }
  return {{"format", "codelab-tensors"}, {"version", 1}, {"tensors", std::move(tensors)}};
}

void tensors_from_json(const nlohmann::json& doc, const ParamRefs& params) {
  if (doc.value("format", "") != "codelab-tensors" || doc.value("version", 0) != 1)
    throw IoError("not a codelab tensor container (format/version mismatch)");
  std::map<std::string, const nlohmann::json*> by_name;
  for (const auto& t : doc.at("tensors")) by_name[t.at("name").get<std::string>()] = &t;
  for (Parameter* p : params) {
    auto it = by_name.find(p->name);
    if (it == by_name.end()) throw IoError("checkpoint lacks tensor '" + p->name + "'");
    Tensor loaded(it->second->at("shape").get<std::vector<std::size_t>>(),
                  it->second->at("data").get<std::vector<double>>());
    if (!loaded.same_shape(p->value))
      throw DimensionError("checkpoint tensor '" + p->name + "' has a different shape");
    p->value = std::move(loaded);
    p->grad = p->value;
    p->grad.set_zero();
  }
}

void save_checkpoint(const std::filesystem::path& path, const ParamRefs& params) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write checkpoint " + path.string());
  out << tensors_to_json(params).dump();
  if (!out) throw IoError("failed writing checkpoint " + path.string());
}

void load_checkpoint(const std::filesystem::path& path, const ParamRefs& params) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open checkpoint " + path.string());
  nlohmann::json doc;
  try {
    in >> doc;
  } catch (const nlohmann::json::exception& e) {
    throw IoError("malformed checkpoint " + path.string() + ": " + e.what());
  }
  tensors_from_json(doc, params);
}

}  // namespace codelab::nn
