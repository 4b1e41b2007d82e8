#pragma once

// Grid geometry, scalar fields and the partition container.
//
// Nodes sit at x_a = -pi + i_a * h, i_a = 0..n-1, h = 2*pi/n on every axis.
// Storage is row-major with the last axis fastest, so in 2D the linear index
// is iy * n + ix and in 3D ((iz * n) + iy) * n + ix.

#include <array>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <numbers>
#include <optional>
#include <span>
#include <vector>

namespace optpart {

enum class Boundary { periodic, dirichlet };

class GridSpec {
 public:
  GridSpec(int dim, int n_per_axis);

  int dim() const { return dim_; }
  int n() const { return n_; }
  double spacing() const { return h_; }
  std::size_t size() const { return size_; }
  /// h^dim, the quadrature weight of one node.
  double cell_volume() const { return cell_volume_; }

  double coord(int index) const { return -std::numbers::pi + index * h_; }

  /// Per-axis indices of a linear node index; unused trailing axes are 0.
  std::array<int, 3> unravel(std::size_t linear) const;
  std::size_t ravel(std::array<int, 3> idx) const;

  /// True for nodes with index 0 along some axis (the box boundary under
  /// the sine layout; index n would be the opposite face).
  bool on_boundary(std::size_t linear) const;

  friend bool operator==(const GridSpec& a, const GridSpec& b) {
    return a.dim_ == b.dim_ && a.n_ == b.n_;
  }

 private:
  int dim_;
  int n_;
  double h_;
  std::size_t size_;
  double cell_volume_;
};

/// One real value per grid node. Immutable once constructed.
class Field {
 public:
  explicit Field(GridSpec grid);  // zeros
  Field(GridSpec grid, std::vector<double> values);

  static Field constant(GridSpec grid, double value);
  /// Samples f at node coordinates (x, y, z); unused coordinates are 0.
  static Field sample(GridSpec grid,
                      const std::function<double(double, double, double)>& f);

  const GridSpec& grid() const { return grid_; }
  std::span<const double> values() const { return values_; }
  double operator[](std::size_t i) const { return values_[i]; }
  std::size_t size() const { return values_.size(); }

  /// Moves the storage out; the field is left empty.
  std::vector<double> release() && { return std::move(values_); }

 private:
  GridSpec grid_;
  std::vector<double> values_;
};

/// Indicator of the active region inside the box.
class DomainMask {
 public:
  DomainMask(GridSpec grid, std::vector<std::uint8_t> indicator);
  static DomainMask full(GridSpec grid);

  const GridSpec& grid() const { return grid_; }
  std::span<const std::uint8_t> indicator() const { return indicator_; }
  bool contains(std::size_t node) const { return indicator_[node] != 0; }
  std::size_t count() const;

 private:
  GridSpec grid_;
  std::vector<std::uint8_t> indicator_;
};

/// k fields on a shared grid.
class PartitionState {
 public:
  explicit PartitionState(std::vector<Field> parts);

  int k() const { return static_cast<int>(parts_.size()); }
  const GridSpec& grid() const { return parts_.front().grid(); }
  const Field& part(int i) const { return parts_[static_cast<std::size_t>(i)]; }
  const std::vector<Field>& parts() const { return parts_; }

 private:
  std::vector<Field> parts_;
};

/// Label used for nodes where every part vanishes.
inline constexpr int kNoLabel = -1;

/// sqrt(h^dim * sum f^2).
double discrete_l2_norm(const Field& f);
double discrete_l2_norm(const GridSpec& grid, std::span<const double> values);

/// 1/2 sum_i ||grad u_i||^2. Spectral for periodic, sine-series for
/// Dirichlet, forward differences with zero extension when a mask is given.
double dirichlet_energy(const PartitionState& s, Boundary bc,
                        const DomainMask* mask = nullptr);

/// Per-node min-index argmax; kNoLabel where all parts are zero.
std::vector<int> label_map(const PartitionState& s);

struct InvariantReport {
  double min_value = 0.0;
  double max_norm_deviation = 0.0;
  /// Number of nodes where more than one part is nonzero.
  std::size_t overlapping_nodes = 0;
  /// Largest |value| found outside the mask (0 without a mask).
  double max_outside_mask = 0.0;

  bool holds(double norm_tol = 1e-12) const {
    return min_value >= 0.0 && max_norm_deviation <= norm_tol &&
           overlapping_nodes == 0 && max_outside_mask == 0.0;
  }
};

InvariantReport check_invariants(const PartitionState& s,
                                 const DomainMask* mask = nullptr);

}  // namespace optpart
