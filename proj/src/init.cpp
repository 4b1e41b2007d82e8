#include "optpart/init.hpp"

#include <algorithm>
#include <functional>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>
#include <string>

#include "optpart/errors.hpp"
#include "optpart/projection.hpp"

namespace optpart {

namespace {

using Point = std::array<double, 2>;

bool inside_polygon(const std::vector<Point>& poly, double x, double y) {
  bool in = false;
  for (std::size_t i = 0, j = poly.size() - 1; i < poly.size(); j = i++) {
    const auto [xi, yi] = poly[i];
    const auto [xj, yj] = poly[j];
    if ((yi > y) != (yj > y) && x < (xj - xi) * (y - yi) / (yj - yi) + xi) in = !in;
  }
  return in;
}

/// Vertices on alternating radii, first vertex pointing up.
std::vector<Point> star_polygon(int points, double r_outer, double r_inner) {
  std::vector<Point> v;
  const int count = r_inner > 0.0 ? 2 * points : points;
  for (int i = 0; i < count; ++i) {
    const double r = (r_inner > 0.0 && i % 2 == 1) ? r_inner : r_outer;
    const double a = std::numbers::pi / 2 + 2.0 * std::numbers::pi * i / count;
    v.push_back({r * std::cos(a), r * std::sin(a)});
  }
  return v;
}

std::vector<double> parse_params(std::string_view text, std::string_view shape) {
  std::vector<double> out;
  while (!text.empty()) {
    const auto comma = text.find(',');
    const std::string item(text.substr(0, comma));
    try {
      std::size_t used = 0;
      out.push_back(std::stod(item, &used));
      if (used != item.size()) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      throw ConfigError("mask '" + std::string(shape) + "': bad parameter '" + item + "'");
    }
    if (comma == std::string_view::npos) break;
    text.remove_prefix(comma + 1);
  }
  return out;
}

double param(const std::vector<double>& p, std::size_t i, double fallback) {
  return i < p.size() ? p[i] : fallback;
}

}  // namespace

std::vector<std::uint8_t> admissible_nodes(const GridSpec& grid, Boundary bc,
                                           const DomainMask* mask) {
  if (mask && !(mask->grid() == grid)) throw std::invalid_argument("mask grid differs");
  std::vector<std::uint8_t> ok(grid.size(), 1);
  for (std::size_t j = 0; j < grid.size(); ++j) {
    if (mask && !mask->contains(j)) ok[j] = 0;
    if (bc == Boundary::dirichlet && grid.on_boundary(j)) ok[j] = 0;
  }
  return ok;
}

std::vector<int> voronoi_labels(const GridSpec& grid, const std::vector<std::array<int, 3>>& seeds,
                                Boundary bc, const DomainMask* mask) {
  const std::vector<std::uint8_t> ok = admissible_nodes(grid, bc, mask);
  const int n = grid.n();
  const int dim = grid.dim();
  const bool torus = bc == Boundary::periodic;
  std::vector<int> labels(grid.size(), kNoLabel);
#pragma omp parallel for schedule(static)
  for (std::size_t j = 0; j < grid.size(); ++j) {
    if (!ok[j]) continue;
    const auto idx = grid.unravel(j);
    long best = std::numeric_limits<long>::max();
    int who = kNoLabel;
    for (std::size_t s = 0; s < seeds.size(); ++s) {
      long d2 = 0;
      for (int a = 0; a < dim; ++a) {
        long d = std::labs(static_cast<long>(idx[a]) - seeds[s][a]);
        if (torus) d = std::min(d, n - d);
        d2 += d * d;
      }
      if (d2 < best) {
        best = d2;
        who = static_cast<int>(s);
      }
    }
    labels[j] = who;
  }
  return labels;
}

PartitionState voronoi_from_seeds(const GridSpec& grid,
                                  const std::vector<std::array<int, 3>>& seeds, Boundary bc,
                                  const DomainMask* mask) {
  const std::vector<int> labels = voronoi_labels(grid, seeds, bc, mask);
  const std::size_t k = seeds.size();
  std::vector<std::vector<double>> ind(k, std::vector<double>(grid.size(), 0.0));
  std::vector<std::size_t> counts(k, 0);
  for (std::size_t j = 0; j < grid.size(); ++j) {
    if (labels[j] == kNoLabel) continue;
    ind[static_cast<std::size_t>(labels[j])][j] = 1.0;
    ++counts[static_cast<std::size_t>(labels[j])];
  }
  std::vector<Field> parts;
  parts.reserve(k);
  for (std::size_t i = 0; i < k; ++i) {
    if (counts[i] == 0) throw InitFailed("Voronoi cell " + std::to_string(i) + " is empty");
    parts.emplace_back(grid, std::move(ind[i]));
  }
  return PartitionState(norm_step(parts));
}

PartitionState voronoi_init(const GridSpec& grid, int k, std::uint64_t seed, Boundary bc,
                            const DomainMask* mask) {
  if (k < 1) throw std::invalid_argument("k must be positive");
  const std::vector<std::uint8_t> ok = admissible_nodes(grid, bc, mask);
  std::vector<std::size_t> pool;
  for (std::size_t j = 0; j < ok.size(); ++j)
    if (ok[j]) pool.push_back(j);
  if (pool.size() < static_cast<std::size_t>(k))
    throw InitFailed("only " + std::to_string(pool.size()) + " admissible nodes for k = " +
                     std::to_string(k));

  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<std::size_t> pick(0, pool.size() - 1);
  constexpr int kAttempts = 100;
  for (int attempt = 0; attempt < kAttempts; ++attempt) {
    std::vector<std::size_t> chosen;
    while (chosen.size() < static_cast<std::size_t>(k)) {
      const std::size_t node = pool[pick(rng)];
      if (std::find(chosen.begin(), chosen.end(), node) == chosen.end()) chosen.push_back(node);
    }
    std::vector<std::array<int, 3>> seeds;
    for (std::size_t node : chosen) seeds.push_back(grid.unravel(node));
    try {
      return voronoi_from_seeds(grid, seeds, bc, mask);
    } catch (const InitFailed&) {
    }
  }
  throw InitFailed("no Voronoi draw without empty cells after 100 attempts (k = " +
                   std::to_string(k) + ")");
}

DomainMask make_mask(const GridSpec& grid, std::string_view shape) {
  const auto colon = shape.find(':');
  const std::string_view name = shape.substr(0, colon);
  const std::vector<double> p =
      colon == std::string_view::npos ? std::vector<double>{} : parse_params(shape.substr(colon + 1), name);

  for (double v : p)
    if (!(v > 0.0) || !std::isfinite(v))
      throw ConfigError("mask '" + std::string(shape) + "': parameters must be positive");

  std::function<bool(double, double)> inside;
  constexpr double pi = std::numbers::pi;
  if (name == "box") {
    inside = [](double, double) { return true; };
  } else if (grid.dim() != 2) {
    throw ConfigError("mask '" + std::string(name) + "' is only defined in 2D");
  } else if (name == "disk") {
    const double r = param(p, 0, 2.5);
    inside = [r](double x, double y) { return x * x + y * y <= r * r; };
  } else if (name == "ellipse") {
    const double a = param(p, 0, 2.8), b = param(p, 1, 1.8);
    inside = [a, b](double x, double y) { return (x / a) * (x / a) + (y / b) * (y / b) <= 1.0; };
  } else if (name == "polygon" || name == "star") {
    const bool star = name == "star";
    const double count = param(p, 0, star ? 5 : 0);
    if (count < 3 || count != std::floor(count))
      throw ConfigError("mask '" + std::string(name) + "' needs an integer vertex count >= 3");
    const auto poly = star_polygon(static_cast<int>(count), param(p, 1, 2.8),
                                   star ? param(p, 2, 1.2) : 0.0);
    inside = [poly](double x, double y) { return inside_polygon(poly, x, y); };
  } else if (name == "sector") {
    const double r = param(p, 0, 2.8), opening = param(p, 1, 1.5 * pi);
    inside = [r, opening](double x, double y) {
      double a = std::atan2(y, x);
      if (a < 0) a += 2 * pi;
      return x * x + y * y <= r * r && a <= opening;
    };
  } else if (name == "square-holes") {
    const double a = param(p, 0, 2.5), rh = param(p, 1, 0.7);
    const double cx = a / 2;
    inside = [a, rh, cx](double x, double y) {
      if (std::abs(x) > a || std::abs(y) > a) return false;
      const double d1 = (x - cx) * (x - cx) + y * y;
      const double d2 = (x + cx) * (x + cx) + y * y;
      return d1 > rh * rh && d2 > rh * rh;
    };
  } else {
    throw ConfigError("unknown mask shape '" + std::string(name) +
                      "' (expected box, disk, ellipse, polygon, star, sector, square-holes)");
  }

  std::vector<std::uint8_t> ind(grid.size());
  std::size_t hits = 0;
  for (std::size_t j = 0; j < grid.size(); ++j) {
    const auto idx = grid.unravel(j);
    ind[j] = inside(grid.coord(idx[1]), grid.coord(idx[0])) ? 1 : 0;  // idx is (iy, ix)
    hits += ind[j];
  }
  if (hits == 0) throw ConfigError("mask '" + std::string(shape) + "' contains no grid nodes");
  return DomainMask(grid, std::move(ind));
}

}  // namespace optpart
