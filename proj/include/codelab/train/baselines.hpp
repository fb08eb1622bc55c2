#pragma once

#include "codelab/grid/grid.hpp"
#include "codelab/random.hpp"
#include "codelab/web/design.hpp"

#include <string>
#include <vector>

namespace codelab::train {

/// k ~ U{0..max_pages}; each of `budget` steps picks uniformly among primitives
/// and SKIP, then a page uniformly in [0,k). k = 0 gives an all-SKIP design.
web::WebsiteDesign dr_design(RandomStream& rng, const std::vector<std::string>& primitives, std::size_t max_pages,
                             std::size_t budget);
/// Each step picks uniformly among subtasks and SKIP; the result is closed.
grid::GridDesign dr_grid_design(RandomStream& rng, const std::vector<std::string>& subtasks, std::size_t budget);

/// Linear from p0 at the first iteration to 1.0 at the last.
double cl_probability(std::size_t iteration, std::size_t total_iterations, double p0);

/// Every primitive is included independently with probability p on a uniform page
/// in [0, max_pages). The design budget does not apply.
web::WebsiteDesign cl_design(RandomStream& rng, const std::vector<std::string>& primitives, std::size_t max_pages,
                             double p);
grid::GridDesign cl_grid_design(RandomStream& rng, const std::vector<std::string>& subtasks, double p);

}  // namespace codelab::train
