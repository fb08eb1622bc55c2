#pragma once

#include <optional>
#include <string>
#include <vector>

namespace codelab::web {

enum class Template {
  Input,
  MultiSelection,
  Selection,
  Button,
  Link,
  Label,
  NavBar,
  Carousel,
  Deck,
  Cart,
  Media,
  Footer
};

std::string to_string(Template t);

struct PrimitiveSpec {
  std::string name;
  Template tmpl = Template::Label;
  bool active = false;
  /// Instruction key; present exactly when the primitive is active.
  std::optional<std::string> field_key;
  std::string description;
};

/// The 40 design primitives, in table order.
const std::vector<PrimitiveSpec>& catalog();

/// Throws CatalogError for unknown names.
const PrimitiveSpec& find_primitive(const std::string& name);
bool has_primitive(const std::string& name);

/// Subset of the catalog by name, in the order given. Throws CatalogError on unknown
/// or repeated names.
std::vector<std::string> restricted_catalog(const std::vector<std::string>& names);

/// All catalog names in table order.
std::vector<std::string> catalog_names();

}  // namespace codelab::web
