#pragma once

// Serial, formula-by-formula versions of the projection kernels. They evaluate
// max_{j != i} separately for every part instead of the single top-two scan
// used in production. Kept for testing and benchmarking.

#include <vector>

#include "optpart/grid.hpp"
#include "optpart/projection.hpp"

namespace optpart::reference {

std::vector<Field> positivity_step(const std::vector<Field>& parts);
std::vector<Field> ortho_step_ratio(const std::vector<Field>& parts);
std::vector<Field> ortho_pos_step_linear(const std::vector<Field>& parts);
std::vector<Field> ortho_pos_step_geometric(const std::vector<Field>& parts);
std::vector<Field> ortho_step(const std::vector<Field>& parts, Projection variant);
std::vector<Field> norm_step(const std::vector<Field>& parts);

}  // namespace optpart::reference
