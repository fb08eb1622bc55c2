#pragma once

#include "codelab/web/render.hpp"

#include <string>

namespace codelab::web {

/// Deterministic HTML for one page; elements appear in document order.
std::string export_html(const Page& page);
/// All pages, separated by a comment line per page.
std::string export_html(const RenderedSite& site);

}  // namespace codelab::web
