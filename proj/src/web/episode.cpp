#include "codelab/web/episode.hpp"

#include "codelab/errors.hpp"

#include <set>

namespace codelab::web {

WebEpisode::WebEpisode(const RenderedSite& site, petri::RewardContract contract,
                       std::optional<std::size_t> horizon)
    : site_(&site),
      env_(petri::to_pomdp(site.net, contract, horizon.value_or(site.horizon), site.bindings)),
      typed_(site.elements.size()) {}

Observation WebEpisode::observe() const {
  Observation obs;
  obs.page = current_page();
  obs.version = version_;
  obs.fields = site_->instruction.fields;
  if (obs.page >= site_->pages.size()) return obs;
  const DomTree& dom = site_->pages[obs.page].dom;
  for (auto [n, depth] : dom.dfs()) {
    const DomNode& dn = dom.nodes[n];
    ObsNode o;
    o.tag = dn.tag;
    if (auto it = dn.attrs.find("name"); it != dn.attrs.end())
      o.key = it->second;
    else if (auto c = dn.attrs.find("class"); c != dn.attrs.end())
      o.key = c->second;
    o.text = dn.text;
    o.depth = depth;
    if (dn.element) {
      o.value = typed_[*dn.element];
      o.element = obs.elements.size();
      obs.elements.push_back(*dn.element);
      obs.element_nodes.push_back(obs.nodes.size());
    }
    obs.nodes.push_back(std::move(o));
  }
  return obs;
}

WebStep WebEpisode::step(const NavAction& action) {
  if (done()) throw ContractViolation("step on a finished web episode");
  if (action.element >= site_->elements.size())
    throw ContractViolation("unknown element " + std::to_string(action.element));
  const Element& el = site_->elements[action.element];
  if (el.page != current_page())
    throw ContractViolation("element " + std::to_string(el.id) + " is on page " +
                            std::to_string(el.page) + ", current page is " +
                            std::to_string(current_page()));
  if (action.field && *action.field >= site_->instruction.size())
    throw ContractViolation("field index out of range");

  WebStep out;
  if (!action.field) {
    // Click-only: gates and passive elements fire; an active element needs a value.
    if (el.field_key)
      out.outcome = env_.idle();
    else
      out.outcome = env_.step(el.transition);
  } else {
    const auto& [key, value] = site_->instruction.fields[*action.field];
    if (!el.field_key || *el.field_key != key) {
      out.outcome = env_.idle();
    } else {
      out.outcome = env_.step(el.transition, value);
      if (out.outcome.fired) {
        typed_[el.id] = value;
        // Aliased copies on the page show the same value.
        for (const Element& other : site_->elements)
          if (other.page == el.page && other.transition == el.transition) typed_[other.id] = value;
      }
    }
  }
  if (out.outcome.fired) ++version_;
  return out;
}

std::vector<NavAction> optimal_page_actions(const WebEpisode& episode) {
  std::vector<NavAction> out;
  const RenderedSite& site = episode.site();
  const std::size_t page = episode.current_page();
  if (page >= site.pages.size()) return out;
  std::set<petri::TransitionId> done;
  const auto enabled = petri::enabled(site.net, episode.marking());
  const std::set<petri::TransitionId> live(enabled.begin(), enabled.end());
  for (std::size_t id : site.pages[page].elements) {
    const Element& el = site.elements[id];
    if (el.gate || !el.field_key) continue;
    if (!live.count(el.transition) || !done.insert(el.transition).second) continue;
    out.push_back({id, site.instruction.find(*el.field_key)});
  }
  out.push_back({site.pages[page].elements.back(), std::nullopt});
  return out;
}

}  // namespace codelab::web
