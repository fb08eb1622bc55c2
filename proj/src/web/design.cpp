#include "codelab/web/design.hpp"

#include "codelab/errors.hpp"
#include "codelab/web/catalog.hpp"

namespace codelab::web {

void check_design(const WebsiteDesign& design, std::size_t max_pages, std::size_t budget) {
  if (design.num_pages > max_pages)
    throw ValidityError("design has " + std::to_string(design.num_pages) + " pages, limit " +
                        std::to_string(max_pages));
  if (design.placements.size() > budget)
    throw ValidityError("design has " + std::to_string(design.placements.size()) +
                        " placements, budget " + std::to_string(budget));
  for (const Placement& p : design.placements) {
    if (p.skip()) continue;
    find_primitive(p.primitive);
    if (p.page >= design.num_pages)
      throw ValidityError("placement of '" + p.primitive + "' on page " + std::to_string(p.page) +
                          " but the design has " + std::to_string(design.num_pages) + " pages");
  }
}

std::size_t non_skip_count(const WebsiteDesign& design) {
  std::size_t n = 0;
  for (const Placement& p : design.placements) n += !p.skip();
  return n;
}

std::size_t active_count(const WebsiteDesign& design) {
  std::size_t n = 0;
  for (const Placement& p : design.placements)
    if (!p.skip() && find_primitive(p.primitive).active) ++n;
  return n;
}

std::size_t passive_count(const WebsiteDesign& design) {
  return non_skip_count(design) - active_count(design);
}

nlohmann::json to_json(const WebsiteDesign& design) {
  nlohmann::json placements = nlohmann::json::array();
  for (const Placement& p : design.placements)
    if (!p.skip()) placements.push_back({{"primitive", p.primitive}, {"page", p.page}});
  return {{"pages", design.num_pages}, {"placements", std::move(placements)}};
}

WebsiteDesign design_from_json(const nlohmann::json& doc) {
  WebsiteDesign d;
  try {
    d.num_pages = doc.at("pages").get<std::size_t>();
    for (const auto& p : doc.at("placements")) {
      Placement pl;
      pl.primitive = p.at("primitive").get<std::string>();
      pl.page = pl.skip() ? 0 : p.at("page").get<std::size_t>();
      d.placements.push_back(std::move(pl));
    }
  } catch (const nlohmann::json::exception& e) {
    throw IoError(std::string("malformed website design: ") + e.what());
  }
  return d;
}

}  // namespace codelab::web
