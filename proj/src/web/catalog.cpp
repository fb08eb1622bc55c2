#include "codelab/web/catalog.hpp"

#include "codelab/errors.hpp"

#include <algorithm>
#include <set>

namespace codelab::web {

std::string to_string(Template t) {
  switch (t) {
    case Template::Input: return "input";
    case Template::MultiSelection: return "multi-selection";
    case Template::Selection: return "selection";
    case Template::Button: return "button";
    case Template::Link: return "link";
    case Template::Label: return "label";
    case Template::NavBar: return "navbar";
    case Template::Carousel: return "carousel";
    case Template::Deck: return "deck";
    case Template::Cart: return "cart";
    case Template::Media: return "media";
    case Template::Footer: return "footer";
  }
  return "label";
}

namespace {

PrimitiveSpec act(std::string name, Template t, std::string desc) {
  PrimitiveSpec s{name, t, true, name, std::move(desc)};
  return s;
}

PrimitiveSpec pas(std::string name, Template t, std::string desc) {
  return {std::move(name), t, false, std::nullopt, std::move(desc)};
}

std::vector<PrimitiveSpec> build() {
  using T = Template;
  std::vector<PrimitiveSpec> c{
      act("addressline1", T::Input, "Main address information"),
      act("addressline2", T::Input, "Secondary address information"),
      act("cabin", T::MultiSelection, "Multiple cabin options"),
      act("captcha", T::Input, "Captcha information"),
      pas("carousel", T::Carousel, "Items with images in a carousel with previous and next buttons"),
      // Promo-code box; counted active (see README, catalog notes).
      {"cart", T::Cart, true, "promocode", "Items in a product cart with promo code information"},
      act("cc", T::MultiSelection, "Multiple credit card type options"),
      act("cccvv", T::Input, "Credit card CVV information"),
      act("ccexpdate", T::Input, "Credit card expiration date information"),
      act("ccnumber", T::Input, "Credit card number information"),
      act("city", T::Input, "City address information"),
      pas("dealmedia", T::Media, "Product media with image, label, and link"),
      pas("deck", T::Deck, "Multiple product decks with image, label, and link"),
      act("departureairport", T::Input, "Departure airport information"),
      act("departuredate", T::Input, "Departure date information"),
      act("destinationairport", T::Input, "Destination airport information"),
      act("destinationdate", T::Input, "Destination date information"),
      act("firstname", T::Input, "First name information"),
      act("flighttype", T::MultiSelection, "Multiple flight type options"),
      pas("footer", T::Footer, "Footer with links and information"),
      pas("forgotpassword", T::Link, "Link with forgot password context"),
      pas("forgotusername", T::Link, "Link with forgot username context"),
      act("fullname", T::Input, "First and last name information"),
      pas("header", T::Label, "Generic header"),
      pas("header_login", T::Label, "Header for login form"),
      pas("header_select_items", T::Label, "Header for item selection"),
      // Search box; counted active (see README, catalog notes).
      {"inpgroup", T::Input, true, "search", "Generic input with default search context"},
      act("lastname", T::Input, "Last name information"),
      pas("navbar", T::NavBar, "A navigation bar with a menu"),
      pas("next_checkout", T::Button, "Next button with checkout context"),
      pas("next_login", T::Button, "Next button with login context"),
      pas("next_login_page", T::Button, "Next button with login context"),
      act("numberofpeople", T::MultiSelection, "Multiple number of people options"),
      act("password", T::Input, "Password information"),
      act("rememberme", T::Selection, "Checkbox with remember me context"),
      act("state", T::Input, "State information"),
      act("stayloggedin", T::Selection, "Checkbox with stay logged in context"),
      pas("submit", T::Button, "Submit button"),
      act("username", T::Input, "Username information"),
      act("zipcode", T::Input, "Zipcode information"),
  };
  return c;
}

}  // namespace

const std::vector<PrimitiveSpec>& catalog() {
  static const std::vector<PrimitiveSpec> c = build();
  return c;
}

const PrimitiveSpec& find_primitive(const std::string& name) {
  const auto& c = catalog();
  auto it = std::find_if(c.begin(), c.end(), [&](const PrimitiveSpec& s) { return s.name == name; });
  if (it == c.end()) throw CatalogError("unknown primitive '" + name + "'");
  return *it;
}

bool has_primitive(const std::string& name) {
  const auto& c = catalog();
  return std::any_of(c.begin(), c.end(), [&](const PrimitiveSpec& s) { return s.name == name; });
}

std::vector<std::string> restricted_catalog(const std::vector<std::string>& names) {
  std::set<std::string> seen;
  for (const std::string& n : names) {
    find_primitive(n);
    if (!seen.insert(n).second) throw CatalogError("primitive '" + n + "' listed twice");
  }
  if (names.empty()) throw CatalogError("restricted catalog is empty");
  return names;
}

std::vector<std::string> catalog_names() {
  std::vector<std::string> out;
  for (const PrimitiveSpec& s : catalog()) out.push_back(s.name);
  return out;
}

}  // namespace codelab::web
