#include "codelab/web/html.hpp"

#include <sstream>

namespace codelab::web {

namespace {

std::string escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

bool is_void(const std::string& tag) { return tag == "input" || tag == "img"; }

void emit(std::ostringstream& out, const DomTree& dom, std::size_t n, std::size_t depth) {
  const DomNode& node = dom.nodes[n];
  out << std::string(2 * depth, ' ') << '<' << node.tag;
  for (const auto& [k, v] : node.attrs) out << ' ' << k << "=\"" << escape(v) << '"';
  if (node.element) out << " data-element=\"" << *node.element << '"';
  if (is_void(node.tag)) {
    out << ">\n";
    return;
  }
  out << '>';
  if (node.children.empty()) {
    out << escape(node.text) << "</" << node.tag << ">\n";
    return;
  }
  out << escape(node.text) << '\n';
  for (std::size_t c : node.children) emit(out, dom, c, depth + 1);
  out << std::string(2 * depth, ' ') << "</" << node.tag << ">\n";
}

}  // namespace

std::string export_html(const Page& page) {
  std::ostringstream out;
  out << "<!DOCTYPE html>\n<html>\n<head><meta charset=\"utf-8\"><title>page</title></head>\n<body>\n";
  if (!page.dom.nodes.empty()) emit(out, page.dom, 0, 1);
  out << "</body>\n</html>\n";
  return out.str();
}

std::string export_html(const RenderedSite& site) {
  std::string out;
  for (std::size_t i = 0; i < site.pages.size(); ++i) {
    out += "<!-- page " + std::to_string(i) + " -->\n";
    out += export_html(site.pages[i]);
  }
  return out;
}

}  // namespace codelab::web
