#include "optpart/reference.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "optpart/errors.hpp"

namespace optpart::reference {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

double max_other(const std::vector<Field>& parts, std::size_t node, std::size_t skip) {
  double m = kNegInf;
  for (std::size_t j = 0; j < parts.size(); ++j)
    if (j != skip) m = std::max(m, parts[j][node]);
  return m;
}

template <typename Rule>
std::vector<Field> per_part(const std::vector<Field>& parts, Rule rule) {
  const GridSpec grid = parts.front().grid();
  std::vector<std::vector<double>> out(parts.size(), std::vector<double>(grid.size(), 0.0));
  for (std::size_t node = 0; node < grid.size(); ++node)
    for (std::size_t i = 0; i < parts.size(); ++i) out[i][node] = rule(node, i);
  std::vector<Field> result;
  for (auto& v : out) result.emplace_back(grid, std::move(v));
  return result;
}

}  // namespace

std::vector<Field> positivity_step(const std::vector<Field>& parts) {
  return per_part(parts, [&](std::size_t node, std::size_t i) {
    const double v = parts[i][node];
    return v > 0.0 ? v : 0.0;
  });
}

std::vector<Field> ortho_step_ratio(const std::vector<Field>& parts) {
  return per_part(parts, [&](std::size_t node, std::size_t i) {
    const double ui = parts[i][node];
    const double other = std::max(max_other(parts, node, i), 0.0);
    if (ui > other) return std::max(0.0, ui - other * other / ui);
    return 0.0;
  });
}

std::vector<Field> ortho_pos_step_linear(const std::vector<Field>& parts) {
  return per_part(parts, [&](std::size_t node, std::size_t i) {
    const double ui = parts[i][node];
    const double other = max_other(parts, node, i);
    if (ui > 0.0 && ui > other) return ui - std::max(other, 0.0);
    return 0.0;
  });
}

std::vector<Field> ortho_pos_step_geometric(const std::vector<Field>& parts) {
  return per_part(parts, [&](std::size_t node, std::size_t i) {
    std::size_t argmax = 0;
    for (std::size_t j = 1; j < parts.size(); ++j)
      if (parts[j][node] > parts[argmax][node]) argmax = j;
    const double ui = parts[i][node];
    if (i != argmax || !(ui > 0.0)) return 0.0;
    return ui - std::sqrt(ui * std::max(max_other(parts, node, i), 0.0));
  });
}

std::vector<Field> ortho_step(const std::vector<Field>& parts, Projection variant) {
  switch (variant) {
    case Projection::ratio: return reference::ortho_step_ratio(parts);
    case Projection::linear: return reference::ortho_pos_step_linear(parts);
    case Projection::geometric: return reference::ortho_pos_step_geometric(parts);
  }
  throw std::logic_error("unknown projection");
}

std::vector<Field> norm_step(const std::vector<Field>& parts) {
  std::vector<Field> result;
  for (std::size_t i = 0; i < parts.size(); ++i) {
    const double norm = discrete_l2_norm(parts[i]);
    if (!(norm > kDegenerateNorm)) throw DegeneratePart(static_cast<int>(i), 0);
    std::vector<double> v(parts[i].values().begin(), parts[i].values().end());
    for (double& x : v) x *= 1.0 / norm;
    result.emplace_back(parts[i].grid(), std::move(v));
  }
  return result;
}

}  // namespace optpart::reference
