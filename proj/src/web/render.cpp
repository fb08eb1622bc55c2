#include "codelab/web/render.hpp"

#include "codelab/errors.hpp"
#include "codelab/web/catalog.hpp"

#include <algorithm>
#include <set>

namespace codelab::web {

std::size_t DomTree::add(DomNode node, std::optional<std::size_t> parent) {
  nodes.push_back(std::move(node));
  const std::size_t id = nodes.size() - 1;
  if (parent) nodes.at(*parent).children.push_back(id);
  return id;
}

std::vector<std::pair<std::size_t, std::size_t>> DomTree::dfs() const {
  std::vector<std::pair<std::size_t, std::size_t>> out;
  if (nodes.empty()) return out;
  std::vector<std::pair<std::size_t, std::size_t>> stack{{0, 0}};
  while (!stack.empty()) {
    auto [n, d] = stack.back();
    stack.pop_back();
    out.emplace_back(n, d);
    const auto& ch = nodes[n].children;
    for (auto it = ch.rbegin(); it != ch.rend(); ++it) stack.emplace_back(*it, d + 1);
  }
  return out;
}

std::optional<std::size_t> Instruction::find(const std::string& key) const {
  for (std::size_t i = 0; i < fields.size(); ++i)
    if (fields[i].first == key) return i;
  return std::nullopt;
}

const std::vector<std::string>& value_vocabulary(const std::string& key) {
  static const std::map<std::string, std::vector<std::string>> vocab{
      {"username", {"jdoe", "asmith", "mchen", "lgarcia", "rpatel"}},
      {"password", {"hunter2", "s3cret!", "pa55word", "letmein9", "qwerty77"}},
      {"captcha", {"x7gk2", "mq9pz", "b4tty", "r2d2c", "k8wln"}},
      {"rememberme", {"checked", "unchecked"}},
      {"stayloggedin", {"checked", "unchecked"}},
      {"firstname", {"Alice", "Bruno", "Chen", "Dana", "Emeka"}},
      {"lastname", {"Nguyen", "Okafor", "Schmidt", "Tanaka", "Silva"}},
      {"fullname", {"Alice Nguyen", "Bruno Okafor", "Chen Schmidt", "Dana Tanaka"}},
      {"addressline1", {"12 Oak St", "400 Pine Ave", "7 Elm Rd", "88 Lake Dr"}},
      {"addressline2", {"Apt 3", "Suite 210", "Unit B", "Floor 4"}},
      {"city", {"Springfield", "Riverton", "Fairview", "Lakeside"}},
      {"state", {"CA", "NY", "TX", "WA", "IL"}},
      {"zipcode", {"94110", "10001", "73301", "98101"}},
      {"cc", {"visa", "mastercard", "amex"}},
      {"ccnumber", {"4111111111111111", "5500000000000004", "340000000000009"}},
      {"cccvv", {"123", "987", "4567"}},
      {"ccexpdate", {"04/27", "11/26", "08/29"}},
      {"departureairport", {"SFO", "JFK", "ORD", "SEA"}},
      {"destinationairport", {"LAX", "BOS", "MIA", "DEN"}},
      {"departuredate", {"Friday", "Monday", "2024-05-03"}},
      {"destinationdate", {"Sunday", "Thursday", "2024-05-10"}},
      {"flighttype", {"oneway", "roundtrip"}},
      {"cabin", {"economy", "business", "first"}},
      {"numberofpeople", {"1", "2", "3", "4"}},
      {"search", {"shoes", "laptop", "headphones"}},
      {"promocode", {"SAVE10", "FREESHIP", "WELCOME"}},
  };
  static const std::vector<std::string> fallback{"alpha", "beta", "gamma"};
  auto it = vocab.find(key);
  return it == vocab.end() ? fallback : it->second;
}

namespace {

std::size_t node(DomTree& dom, std::size_t parent, std::string tag,
                 std::map<std::string, std::string> attrs = {}, std::string text = {}) {
  return dom.add({std::move(tag), std::move(attrs), std::move(text), {}, std::nullopt}, parent);
}

/// Appends a primitive's subtree under `parent` and returns its actionable node.
std::size_t render_template(DomTree& dom, std::size_t parent, const PrimitiveSpec& spec) {
  const std::string& n = spec.name;
  const std::string key = spec.field_key.value_or(n);
  switch (spec.tmpl) {
    case Template::Input: {
      const std::size_t g = node(dom, parent, "div", {{"class", "form-group"}});
      node(dom, g, "label", {{"for", key}}, key);
      return node(dom, g, "input", {{"type", "text"}, {"name", key}, {"id", n}});
    }
    case Template::MultiSelection: {
      const std::size_t g = node(dom, parent, "div", {{"class", "form-group"}});
      node(dom, g, "label", {{"for", key}}, key);
      const std::size_t s = node(dom, g, "select", {{"name", key}, {"id", n}});
      for (const std::string& v : value_vocabulary(key)) node(dom, s, "option", {{"value", v}}, v);
      return s;
    }
    case Template::Selection: {
      const std::size_t g = node(dom, parent, "div", {{"class", "form-check"}});
      const std::size_t box = node(dom, g, "input", {{"type", "checkbox"}, {"name", key}, {"id", n}});
      node(dom, g, "label", {{"for", n}}, key);
      return box;
    }
    case Template::Button:
      return node(dom, parent, "button", {{"type", "button"}, {"name", n}}, n);
    case Template::Link:
      return node(dom, parent, "a", {{"href", "#"}, {"name", n}}, n);
    case Template::Label:
      return node(dom, parent, "h2", {{"name", n}}, n);
    case Template::NavBar: {
      const std::size_t nav = node(dom, parent, "nav", {{"name", n}});
      const std::size_t ul = node(dom, nav, "ul");
      for (const char* item : {"home", "deals", "account"}) {
        const std::size_t li = node(dom, ul, "li");
        node(dom, li, "a", {{"href", "#"}}, item);
      }
      return nav;
    }
    case Template::Carousel: {
      const std::size_t c = node(dom, parent, "div", {{"class", "carousel"}, {"name", n}});
      node(dom, c, "img", {{"src", "item.png"}});
      node(dom, c, "button", {{"class", "prev"}}, "prev");
      node(dom, c, "button", {{"class", "next"}}, "next");
      return c;
    }
    case Template::Deck: {
      const std::size_t d = node(dom, parent, "div", {{"class", "deck"}, {"name", n}});
      for (int i = 0; i < 2; ++i) {
        const std::size_t card = node(dom, d, "div", {{"class", "card"}});
        node(dom, card, "img", {{"src", "product.png"}});
        node(dom, card, "a", {{"href", "#"}}, "product");
      }
      return d;
    }
    case Template::Cart: {
      const std::size_t c = node(dom, parent, "div", {{"class", "cart"}});
      const std::size_t ul = node(dom, c, "ul");
      node(dom, ul, "li", {}, "item");
      node(dom, ul, "li", {}, "item");
      node(dom, c, "label", {{"for", key}}, key);
      return node(dom, c, "input", {{"type", "text"}, {"name", key}, {"id", n}});
    }
    case Template::Media: {
      const std::size_t m = node(dom, parent, "div", {{"class", "media"}, {"name", n}});
      node(dom, m, "img", {{"src", "deal.png"}});
      node(dom, m, "span", {}, "deal");
      node(dom, m, "a", {{"href", "#"}}, "view");
      return m;
    }
    case Template::Footer: {
      const std::size_t f = node(dom, parent, "footer", {{"name", n}});
      node(dom, f, "a", {{"href", "#"}}, "about");
      node(dom, f, "a", {{"href", "#"}}, "contact");
      node(dom, f, "p", {}, "copyright");
      return f;
    }
  }
  return parent;
}

struct Slot {
  const PrimitiveSpec* spec;
  bool active;              // gate predecessor in the net
  std::optional<std::size_t> alias;  // index of the net primitive this element shares
};

}  // namespace

RenderedSite render(const WebsiteDesign& design, RandomStream& values, RenderOptions options) {
  for (const Placement& p : design.placements) {
    if (p.skip()) continue;
    find_primitive(p.primitive);
    if (p.page >= design.num_pages)
      throw ValidityError("placement of '" + p.primitive + "' on missing page " + std::to_string(p.page));
  }

  // Group non-SKIP placements by design page, keeping placement order.
  std::vector<std::vector<const PrimitiveSpec*>> by_page(design.num_pages);
  for (const Placement& p : design.placements)
    if (!p.skip()) by_page[p.page].push_back(&find_primitive(p.primitive));
  std::vector<std::vector<const PrimitiveSpec*>> pages;
  for (auto& pg : by_page)
    if (!pg.empty()) pages.push_back(std::move(pg));
  if (pages.empty()) pages.emplace_back();

  RenderedSite site;
  site.design = design;

  std::vector<petri::PrimitiveNet> prims;
  std::vector<std::size_t> page_ends;
  std::vector<std::vector<Slot>> slots(pages.size());
  std::map<std::string, std::pair<std::size_t, std::size_t>> owner;  // key -> (page, net index)
  std::vector<std::size_t> fields_on_page(pages.size(), 0);
  for (std::size_t pi = 0; pi < pages.size(); ++pi) {
    for (const PrimitiveSpec* spec : pages[pi]) {
      Slot slot{spec, false, std::nullopt};
      if (spec->active) {
        auto it = owner.find(*spec->field_key);
        if (it == owner.end()) {
          owner[*spec->field_key] = {pi, prims.size()};
          slot.active = true;
          ++fields_on_page[pi];
          site.instruction.fields.emplace_back(*spec->field_key, "");
        } else if (it->second.first == pi) {
          slot.alias = it->second.second;
        }
      }
      if (!slot.alias) {
        petri::PrimitiveNet pn;
        pn.name = spec->name;
        pn.active = slot.active;
        if (slot.active) pn.color = spec->field_key;
        prims.push_back(std::move(pn));
      }
      slots[pi].push_back(slot);
    }
    page_ends.push_back(prims.size());
  }

  for (auto& [key, value] : site.instruction.fields) {
    const auto& vocab = value_vocabulary(key);
    value = vocab[values.uniform_index(vocab.size())];
    site.bindings[key] = value;
  }

  site.net = petri::compose(prims, page_ends, site.bindings);
  const petri::ValidationReport report = petri::validate(site.net);
  if (!report.ok())
    throw ValidityError("rendered net is invalid: " + report.violations.front().code);
  site.warnings = report.warnings;

  std::size_t net_index = 0;
  for (std::size_t pi = 0; pi < pages.size(); ++pi) {
    Page page;
    page.dom.add({"form", {{"id", "page" + std::to_string(pi)}}, "", {}, std::nullopt}, std::nullopt);
    for (const Slot& slot : slots[pi]) {
      const std::size_t prim = slot.alias ? *slot.alias : net_index++;
      Element el;
      el.id = site.elements.size();
      el.page = pi;
      el.primitive = slot.spec->name;
      if (slot.active || slot.alias) el.field_key = slot.spec->field_key;
      el.transition = site.net.primitives[prim].transitions.front();
      el.node = render_template(page.dom, 0, *slot.spec);
      page.dom.nodes[el.node].element = el.id;
      page.elements.push_back(el.id);
      site.elements.push_back(std::move(el));
    }
    Element gate;
    gate.id = site.elements.size();
    gate.page = pi;
    gate.primitive = "gate";
    gate.gate = true;
    gate.transition = site.net.gates[pi];
    const bool last = pi + 1 == pages.size();
    gate.node = node(page.dom, 0, "button", {{"type", "submit"}, {"name", last ? "submit" : "next"}},
                     last ? "Submit" : "Next");
    page.dom.nodes[gate.node].element = gate.id;
    page.elements.push_back(gate.id);
    site.elements.push_back(std::move(gate));
    site.pages.push_back(std::move(page));
    site.horizon += options.base_steps + options.steps_per_field * fields_on_page[pi];
  }
  return site;
}

}  // namespace codelab::web
