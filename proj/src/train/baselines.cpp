#include "codelab/train/baselines.hpp"

#include "codelab/errors.hpp"

#include <algorithm>

namespace codelab::train {

web::WebsiteDesign dr_design(RandomStream& rng, const std::vector<std::string>& primitives, std::size_t max_pages,
                             std::size_t budget) {
  if (primitives.empty()) throw ConfigError("dr_design needs primitives");
  web::WebsiteDesign d;
  d.num_pages = rng.uniform_index(max_pages + 1);
  for (std::size_t i = 0; i < budget; ++i) {
    if (d.num_pages == 0) {
      d.placements.push_back({web::kSkip, 0});
      continue;
    }
    const std::size_t a = rng.uniform_index(primitives.size() + 1);
    if (a == primitives.size())
      d.placements.push_back({web::kSkip, 0});
    else
      d.placements.push_back({primitives[a], rng.uniform_index(d.num_pages)});
  }
  return d;
}

grid::GridDesign dr_grid_design(RandomStream& rng, const std::vector<std::string>& subtasks, std::size_t budget) {
  grid::GridDesign d;
  for (std::size_t i = 0; i < budget; ++i) {
    const std::size_t a = rng.uniform_index(subtasks.size() + 1);
    if (a < subtasks.size()) d.subtasks.insert(grid::parse_subtask(subtasks[a]));
  }
  return grid::closure(d);
}

double cl_probability(std::size_t iteration, std::size_t total_iterations, double p0) {
  if (total_iterations <= 1) return 1.0;
  const double frac = std::min(1.0, static_cast<double>(iteration) / static_cast<double>(total_iterations - 1));
  return p0 + (1.0 - p0) * frac;
}

web::WebsiteDesign cl_design(RandomStream& rng, const std::vector<std::string>& primitives, std::size_t max_pages,
                             double p) {
  web::WebsiteDesign d;
  d.num_pages = max_pages;
  for (const auto& name : primitives)
    if (rng.bernoulli(p)) d.placements.push_back({name, rng.uniform_index(max_pages)});
  return d;
}

grid::GridDesign cl_grid_design(RandomStream& rng, const std::vector<std::string>& subtasks, double p) {
  grid::GridDesign d;
  for (const auto& name : subtasks)
    if (rng.bernoulli(p)) d.subtasks.insert(grid::parse_subtask(name));
  return grid::closure(d);
}

}  // namespace codelab::train
