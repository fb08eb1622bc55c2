#pragma once

#include <json.hpp>

#include <cstddef>
#include <string>
#include <vector>

namespace codelab::web {

inline const std::string kSkip = "SKIP";

struct Placement {
  std::string primitive;  // catalog name or kSkip
  std::size_t page = 0;

  bool skip() const noexcept { return primitive == kSkip; }
  bool operator==(const Placement&) const = default;
};

struct WebsiteDesign {
  std::size_t num_pages = 0;
  std::vector<Placement> placements;

  bool operator==(const WebsiteDesign&) const = default;
};

/// Checks page indices against num_pages, num_pages <= max_pages, the placement
/// budget, and catalog membership. Throws ValidityError / CatalogError.
void check_design(const WebsiteDesign& design, std::size_t max_pages, std::size_t budget);

std::size_t non_skip_count(const WebsiteDesign& design);
std::size_t active_count(const WebsiteDesign& design);
std::size_t passive_count(const WebsiteDesign& design);

/// {"pages": k, "placements": [{"primitive", "page"}]}; SKIPs are omitted on write.
nlohmann::json to_json(const WebsiteDesign& design);
/// Accepts SKIP entries (with or without a page).
WebsiteDesign design_from_json(const nlohmann::json& doc);

}  // namespace codelab::web
