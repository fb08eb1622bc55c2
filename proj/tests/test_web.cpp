#include "codelab/errors.hpp"
#include "codelab/web/catalog.hpp"
#include "codelab/web/episode.hpp"
#include "codelab/web/html.hpp"
#include "codelab/web/suite.hpp"

#include <catch_amalgamated.hpp>

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>

using namespace codelab;
using namespace codelab::web;

namespace {

WebsiteDesign design(std::size_t pages, std::vector<Placement> placements) { return {pages, std::move(placements)}; }

/// Plays the scripted optimal policy; returns (sum of potential rewards, outcome list).
std::pair<double, std::vector<petri::StepOutcome>> play_optimal(WebEpisode& ep) {
  double potential = 0.0;
  std::vector<petri::StepOutcome> outs;
  while (!ep.done()) {
    for (const NavAction& a : optimal_page_actions(ep)) {
      auto s = ep.step(a);
      potential += s.outcome.potential;
      outs.push_back(s.outcome);
      if (s.done()) break;
    }
  }
  return {potential, outs};
}

std::size_t first_element(const RenderedSite& site, const std::string& name) {
  for (const Element& e : site.elements)
    if (e.primitive == name) return e.id;
  FAIL("no element " << name);
  return 0;
}

}  // namespace

TEST_CASE("catalog fidelity") {
  const auto& c = catalog();
  CHECK(c.size() == 40);
  CHECK(std::count_if(c.begin(), c.end(), [](const PrimitiveSpec& s) { return s.active; }) == 26);
  CHECK(find_primitive("username").active);
  CHECK(find_primitive("username").tmpl == Template::Input);
  CHECK_FALSE(find_primitive("footer").active);
  std::set<std::string> names;
  for (const PrimitiveSpec& s : c) {
    CHECK(names.insert(s.name).second);
    CHECK(s.active == s.field_key.has_value());
  }
  CHECK_THROWS_AS(find_primitive("banner"), CatalogError);
  CHECK_THROWS_AS(restricted_catalog({"username", "username"}), CatalogError);
}

TEST_CASE("render examples") {
  RandomStream rng(1);
  SECTION("one page with two actives and a SKIP") {
    auto site = render(design(1, {{"username", 0}, {"password", 0}, {kSkip, 0}}), rng);
    REQUIRE(site.pages.size() == 1);
    CHECK(site.pages[0].elements.size() == 3);
    CHECK(site.elements.back().gate);
    CHECK(site.instruction.size() == 2);
    CHECK(site.instruction.fields[0].first == "username");
    CHECK(site.instruction.fields[1].first == "password");
  }
  SECTION("all-SKIP design is a single gate page solved by one click") {
    auto site = render(design(2, {{kSkip, 0}, {kSkip, 0}}), rng);
    REQUIRE(site.pages.size() == 1);
    CHECK(site.instruction.size() == 0);
    WebEpisode ep(site);
    auto s = ep.step({site.pages[0].elements[0], std::nullopt});
    CHECK(s.done());
    CHECK(s.outcome.success);
    CHECK(s.outcome.terminal == 1.0);
  }
  SECTION("two pages with one active each") {
    auto site = render(design(2, {{"firstname", 0}, {"lastname", 1}}), rng);
    REQUIRE(site.pages.size() == 2);
    WebEpisode ep(site);
    auto [potential, outs] = play_optimal(ep);
    CHECK(ep.success());
    CHECK(potential == 1.0);
    CHECK(outs.size() == 4);
  }
  SECTION("unknown primitive") {
    CHECK_THROWS_AS(render(design(1, {{"banner", 0}}), rng), CatalogError);
  }
  SECTION("element order follows placement order") {
    auto site = render(design(1, {{"footer", 0}, {"username", 0}, {"header", 0}}), rng);
    std::vector<std::string> order;
    for (std::size_t id : site.pages[0].elements) order.push_back(site.elements[id].primitive);
    CHECK(order == std::vector<std::string>{"footer", "username", "header", "gate"});
  }
  SECTION("empty design pages are dropped") {
    auto site = render(design(3, {{"username", 2}}), rng);
    CHECK(site.pages.size() == 1);
  }
  SECTION("passive exits are reported as dangling warnings") {
    auto site = render(design(1, {{"footer", 0}, {"username", 0}}), rng);
    CHECK(site.warnings.size() == 1);
  }
}

TEST_CASE("step examples") {
  RandomStream rng(2);
  SECTION("F = 2: a correct entry pays 1/2 plus the step penalty") {
    auto site = render(design(1, {{"departureairport", 0}, {"destinationairport", 0}}), rng);
    WebEpisode ep(site);
    const std::size_t el = first_element(site, "destinationairport");
    auto s = ep.step({el, site.instruction.find("destinationairport")});
    CHECK(s.outcome.potential == 0.5);
    CHECK(s.outcome.penalty == -0.01);
    CHECK(s.reward() == 0.5 - 0.01);
  }
  SECTION("timeout pays -1") {
    auto site = render(design(1, {{"username", 0}}), rng);
    WebEpisode ep(site);
    const std::size_t el = first_element(site, "username");
    WebStep s;
    for (std::size_t t = 0; t < ep.horizon(); ++t) s = ep.step({el, std::nullopt});
    CHECK(s.done());
    CHECK(s.outcome.terminal == -1.0);
    CHECK_FALSE(ep.success());
  }
  SECTION("a wrong field leaves the marking unchanged") {
    auto site = render(design(1, {{"username", 0}, {"password", 0}}), rng);
    WebEpisode ep(site);
    const auto before = ep.marking();
    auto s = ep.step({first_element(site, "username"), site.instruction.find("password")});
    CHECK_FALSE(s.outcome.fired);
    CHECK(s.outcome.potential == 0.0);
    CHECK(s.reward() == -0.01);
    CHECK(ep.marking() == before);
  }
  SECTION("the gate does not fire before the page is complete") {
    auto site = render(design(1, {{"username", 0}}), rng);
    WebEpisode ep(site);
    auto s = ep.step({site.pages[0].elements.back(), std::nullopt});
    CHECK_FALSE(s.outcome.fired);
    CHECK_FALSE(s.done());
  }
  SECTION("acting on another page's element is a contract violation") {
    auto site = render(design(2, {{"username", 0}, {"password", 1}}), rng);
    WebEpisode ep(site);
    CHECK_THROWS_AS(ep.step({first_element(site, "password"), site.instruction.find("password")}),
                    ContractViolation);
  }
  SECTION("passive elements take clicks only and never pay") {
    auto site = render(design(1, {{"forgotpassword", 0}, {"username", 0}}), rng);
    WebEpisode ep(site);
    auto s = ep.step({first_element(site, "forgotpassword"), std::nullopt});
    CHECK(s.outcome.fired);
    CHECK(s.outcome.potential == 0.0);
  }
  SECTION("duplicate active placements share one field") {
    auto site = render(design(1, {{"username", 0}, {"username", 0}, {"password", 0}}), rng);
    CHECK(site.instruction.size() == 2);
    WebEpisode ep(site);
    std::size_t second = 0;
    for (const Element& e : site.elements)
      if (e.primitive == "username") second = e.id;
    auto s = ep.step({second, site.instruction.find("username")});
    CHECK(s.outcome.potential == 0.5);
    auto again = ep.step({first_element(site, "username"), site.instruction.find("username")});
    CHECK_FALSE(again.outcome.fired);
  }
  SECTION("observation reflects typed values and the version counter") {
    auto site = render(design(1, {{"username", 0}}), rng);
    WebEpisode ep(site);
    auto o1 = ep.observe();
    ep.step({first_element(site, "username"), std::size_t{0}});
    auto o2 = ep.observe();
    CHECK(o2.version != o1.version);
    CHECK(o2.nodes[o2.element_nodes[0]].value == site.instruction.fields[0].second);
    CHECK(o1.elements.size() == 2);
  }
}

TEST_CASE("reward invariants over random designs") {
  RandomStream rng(5);
  const auto names = catalog_names();
  for (int trial = 0; trial < 200; ++trial) {
    WebsiteDesign d;
    d.num_pages = 1 + rng.uniform_index(3);
    const std::size_t n = rng.uniform_index(10);
    for (std::size_t i = 0; i < n; ++i)
      d.placements.push_back({names[rng.uniform_index(names.size())], rng.uniform_index(d.num_pages)});
    RandomStream values(trial);
    auto site = render(d, values);
    WebEpisode ep(site);
    auto [potential, outs] = play_optimal(ep);
    CHECK(ep.success());
    if (site.instruction.size() > 0) {
      CHECK(potential == 1.0);
      for (const auto& o : outs)
        if (o.potential != 0.0)
          CHECK(std::abs(o.potential - 1.0 / static_cast<double>(site.instruction.size())) <= 1e-12);
    }
    double ret = 0.0;
    for (const auto& o : outs) ret += o.reward;
    CHECK(ret <= 2.0);
    CHECK(ret >= -1.0 - 0.01 * static_cast<double>(site.horizon));

    // Adding a passive primitive leaves F and the rewarded transitions alone.
    WebsiteDesign more = d;
    more.placements.push_back({"footer", rng.uniform_index(d.num_pages)});
    RandomStream values2(trial);
    auto site2 = render(more, values2);
    CHECK(site2.instruction.fields == site.instruction.fields);
    CHECK(site2.net.colors == site.net.colors);
  }
}

TEST_CASE("rendering is a pure function of design and seed") {
  auto d = design(2, {{"username", 0}, {"navbar", 0}, {"city", 1}, {"cabin", 1}});
  RandomStream a(9), b(9);
  auto s1 = render(d, a), s2 = render(d, b);
  CHECK(export_html(s1) == export_html(s2));
  CHECK(s1.instruction.fields == s2.instruction.fields);
  CHECK(petri::to_json(s1.net).dump() == petri::to_json(s2.net).dump());
}

TEST_CASE("design JSON") {
  auto d = design(2, {{"username", 0}, {kSkip, 0}, {"city", 1}});
  auto j = to_json(d);
  CHECK(j["placements"].size() == 2);
  auto back = design_from_json(j);
  CHECK(back.placements.size() == 2);
  auto with_skip = nlohmann::json::parse(R"({"pages":1,"placements":[{"primitive":"SKIP"},{"primitive":"username","page":0}]})");
  auto read = design_from_json(with_skip);
  CHECK(read.placements[0].skip());
  CHECK_THROWS_AS(check_design(design(2, {{"username", 3}}), 3, 10), ValidityError);
  CHECK_THROWS_AS(check_design(design(4, {}), 3, 10), ValidityError);
  CHECK_THROWS_AS(check_design(design(1, std::vector<Placement>(11, {kSkip, 0})), 3, 10), ValidityError);
}

TEST_CASE("test suite") {
  const auto& suite = test_suite();
  SECTION("fixture matches the builder") {
    CHECK(suite_to_json(suite).dump() == suite_to_json(build_suite()).dump());
  }
  SECTION("level-4 instruction sizes") {
    const std::map<std::string, std::size_t> expect{
        {"login", 5}, {"address", 7}, {"payment", 5}, {"flight", 7}, {"shopping", 12}};
    for (const auto& [env, f] : expect) {
      RandomStream rng(0);
      CHECK(render(suite.at(4).at(env), rng).instruction.size() == f);
    }
  }
  SECTION("levels are nested") {
    for (const std::string& env : suite_envs())
      for (int level = 1; level < 4; ++level) {
        std::multiset<std::string> lo, hi;
        for (const auto& p : suite.at(level).at(env).placements) lo.insert(p.primitive);
        for (const auto& p : suite.at(level + 1).at(env).placements) hi.insert(p.primitive);
        CHECK(std::includes(hi.begin(), hi.end(), lo.begin(), lo.end()));
      }
  }
  SECTION("every design validates, shopping is multi-page, scripted agent succeeds") {
    for (const auto& [level, envs] : suite)
      for (const auto& [env, d] : envs) {
        RandomStream rng(level);
        auto site = render(d, rng);
        CHECK(petri::validate(site.net).ok());
        if (env == "shopping") CHECK(site.pages.size() >= 2);
        WebEpisode ep(site);
        auto [potential, outs] = play_optimal(ep);
        CHECK(potential == 1.0);
        CHECK(ep.success());
      }
  }
  SECTION("a tampered fixture is rejected") {
    const auto path = std::filesystem::temp_directory_path() / "codelab_suite_tampered.json";
    std::ifstream in(default_suite_path());
    std::stringstream buf;
    buf << in.rdbuf();
    std::ofstream(path) << buf.str() << " ";
    CHECK_THROWS_AS(load_suite(path), IoError);
    std::filesystem::remove(path);
  }
}

TEST_CASE("export_html") {
  SECTION("empty page is a skeleton") {
    Page empty;
    const std::string html = export_html(empty);
    CHECK(html.find("<body>") != std::string::npos);
    CHECK(html.find("<form") == std::string::npos);
  }
  SECTION("login page has two input tags in element order") {
    RandomStream rng(3);
    auto site = render(design(1, {{"username", 0}, {"password", 0}}), rng);
    const std::string html = export_html(site.pages[0]);
    std::size_t count = 0;
    for (std::size_t at = html.find("<input"); at != std::string::npos; at = html.find("<input", at + 1)) ++count;
    CHECK(count == 2);
    CHECK(html.find("name=\"username\"") < html.find("name=\"password\""));
  }
  SECTION("byte-identical across runs") {
    RandomStream a(4), b(4);
    auto d = design(1, {{"carousel", 0}, {"cc", 0}, {"footer", 0}});
    CHECK(export_html(render(d, a)) == export_html(render(d, b)));
  }
}
