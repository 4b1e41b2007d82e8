#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string_view>
#include <vector>

#include "optpart/grid.hpp"

namespace optpart {

/// Nodes eligible to carry mass: inside the mask, and off the box boundary
/// under Dirichlet conditions.
std::vector<std::uint8_t> admissible_nodes(const GridSpec& grid, Boundary bc,
                                           const DomainMask* mask = nullptr);

/// Nearest-seed label per node (kNoLabel outside the admissible set). Seeds
/// are grid indices in GridSpec::unravel order (slowest axis first); distance is toroidal under periodic bc and Euclidean
/// otherwise; ties go to the lowest seed index.
std::vector<int> voronoi_labels(const GridSpec& grid, const std::vector<std::array<int, 3>>& seeds,
                                Boundary bc, const DomainMask* mask = nullptr);

/// Normalized cell indicators for the given seeds. Throws InitFailed when a
/// cell is empty.
PartitionState voronoi_from_seeds(const GridSpec& grid,
                                  const std::vector<std::array<int, 3>>& seeds, Boundary bc,
                                  const DomainMask* mask = nullptr);

/// k distinct node-snapped seeds drawn uniformly from the admissible nodes
/// with a 64-bit Mersenne twister, redrawn until no cell is empty.
/// Throws InitFailed after 100 attempts.
PartitionState voronoi_init(const GridSpec& grid, int k, std::uint64_t seed, Boundary bc,
                            const DomainMask* mask = nullptr);

/// Analytic masks, written `name[:p1,p2,...]` with lengths in box units
/// (the box is [-pi, pi)^d):
///   box                          every node
///   disk[:r]                     |x| <= r                      (r = 2.5)
///   ellipse[:a,b]                (x/a)^2 + (y/b)^2 <= 1        (2.8, 1.8)
///   polygon:n[:r]                regular n-gon, circumradius r (2.8)
///   star:m[:ro,ri]               m-fold star, outer/inner radii (2.8, 1.2)
///   sector[:r,angle]             disk sector opening at +x     (2.8, 3pi/2)
///   square-holes[:a,rh]          |x|,|y| <= a minus two disks   (2.5, 0.7)
/// Everything except `box` is two-dimensional. Throws ConfigError on an
/// unknown name, bad parameters, or an empty result.
DomainMask make_mask(const GridSpec& grid, std::string_view shape);

}  // namespace optpart
