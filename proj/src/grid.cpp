#include "optpart/grid.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

#include "fft.hpp"

namespace optpart {

GridSpec::GridSpec(int dim, int n_per_axis) : dim_(dim), n_(n_per_axis) {
  if (dim < 1 || dim > 3) throw std::invalid_argument("grid dimension must be 1, 2 or 3");
  if (n_per_axis < 4 || n_per_axis % 2 != 0)
    throw std::invalid_argument("grid resolution must be even and at least 4, got " +
                                std::to_string(n_per_axis));
  h_ = 2.0 * std::numbers::pi / n_;
  size_ = 1;
  cell_volume_ = 1.0;
  for (int a = 0; a < dim_; ++a) {
    size_ *= static_cast<std::size_t>(n_);
    cell_volume_ *= h_;
  }
}

std::array<int, 3> GridSpec::unravel(std::size_t linear) const {
  std::array<int, 3> idx{0, 0, 0};
  for (int a = dim_ - 1; a >= 0; --a) {
    idx[static_cast<std::size_t>(a)] = static_cast<int>(linear % static_cast<std::size_t>(n_));
    linear /= static_cast<std::size_t>(n_);
  }
  return idx;
}

std::size_t GridSpec::ravel(std::array<int, 3> idx) const {
  std::size_t linear = 0;
  for (int a = 0; a < dim_; ++a)
    linear = linear * static_cast<std::size_t>(n_) + static_cast<std::size_t>(idx[static_cast<std::size_t>(a)]);
  return linear;
}

bool GridSpec::on_boundary(std::size_t linear) const {
  for (int a = 0; a < dim_; ++a) {
    if (linear % static_cast<std::size_t>(n_) == 0) return true;
    linear /= static_cast<std::size_t>(n_);
  }
  return false;
}

// ------------------------------------------------------------------ Field

Field::Field(GridSpec grid) : grid_(grid), values_(grid.size(), 0.0) {}

Field::Field(GridSpec grid, std::vector<double> values) : grid_(grid), values_(std::move(values)) {
  if (values_.size() != grid_.size())
    throw std::invalid_argument("field size " + std::to_string(values_.size()) +
                                " does not match grid size " + std::to_string(grid_.size()));
}

Field Field::constant(GridSpec grid, double value) {
  return Field(grid, std::vector<double>(grid.size(), value));
}

Field Field::sample(GridSpec grid, const std::function<double(double, double, double)>& f) {
  std::vector<double> v(grid.size());
  const int d = grid.dim();
  for (std::size_t i = 0; i < v.size(); ++i) {
    const auto idx = grid.unravel(i);
    double c[3] = {0.0, 0.0, 0.0};  // x, y, z
    for (int a = 0; a < d; ++a) c[a] = grid.coord(idx[static_cast<std::size_t>(d - 1 - a)]);
    v[i] = f(c[0], c[1], c[2]);
  }
  return Field(grid, std::move(v));
}

// ------------------------------------------------------------- DomainMask

DomainMask::DomainMask(GridSpec grid, std::vector<std::uint8_t> indicator)
    : grid_(grid), indicator_(std::move(indicator)) {
  if (indicator_.size() != grid_.size()) throw std::invalid_argument("mask size does not match grid");
  bool any = false;
  for (auto v : indicator_) {
    if (v > 1) throw std::invalid_argument("mask values must be 0 or 1");
    any = any || v == 1;
  }
  if (!any) throw std::invalid_argument("mask is empty");
}

DomainMask DomainMask::full(GridSpec grid) {
  return DomainMask(grid, std::vector<std::uint8_t>(grid.size(), 1));
}

std::size_t DomainMask::count() const {
  return static_cast<std::size_t>(std::count(indicator_.begin(), indicator_.end(), std::uint8_t{1}));
}

// --------------------------------------------------------- PartitionState

PartitionState::PartitionState(std::vector<Field> parts) : parts_(std::move(parts)) {
  if (parts_.empty()) throw std::invalid_argument("partition needs at least one part");
  for (const auto& p : parts_)
    if (!(p.grid() == parts_.front().grid())) throw std::invalid_argument("parts live on different grids");
}

// ------------------------------------------------------------ norms/energy

double discrete_l2_norm(const GridSpec& grid, std::span<const double> values) {
  double sum = 0.0;
  for (double v : values) sum += v * v;
  return std::sqrt(grid.cell_volume() * sum);
}

double discrete_l2_norm(const Field& f) { return discrete_l2_norm(f.grid(), f.values()); }

namespace {

double gradient_sq_periodic(const Field& f) {
  const auto& t = detail::PeriodicTransform::for_grid(f.grid());
  detail::FftwBuffer<double> real(f.size());
  detail::FftwBuffer<fftw_complex> spec(t.spectrum_size());
  std::copy(f.values().begin(), f.values().end(), real.data());
  t.forward(real.data(), spec.data());
  const auto& k2 = t.wavenumber_sq();
  const auto& mult = t.multiplicity();
  double sum = 0.0;
  for (std::size_t i = 0; i < t.spectrum_size(); ++i) {
    const double re = spec[i][0], im = spec[i][1];
    sum += mult[i] * k2[i] * (re * re + im * im);
  }
  // Parseval on the box of volume (2 pi)^d with N = n^d samples.
  const double n_total = static_cast<double>(f.size());
  const double volume = std::pow(2.0 * std::numbers::pi, f.grid().dim());
  return volume * sum / (n_total * n_total);
}

double gradient_sq_sine(const Field& f) {
  const auto& t = detail::SineTransform::for_grid(f.grid());
  detail::FftwBuffer<double> buf(t.size());
  t.gather(f.values().data(), buf.data());
  t.apply(buf.data());
  // Y = n^d b, and each sine mode carries pi^d of squared L2 mass.
  const double n_d = std::pow(static_cast<double>(f.grid().n()), f.grid().dim());
  const auto& lam = t.eigenvalue();
  double sum = 0.0;
  for (std::size_t i = 0; i < t.size(); ++i) {
    const double b = buf[i] / n_d;
    sum += lam[i] * b * b;
  }
  return sum * std::pow(std::numbers::pi, f.grid().dim());
}

// Forward differences on Z^d with the field extended by zero off the box.
double gradient_sq_forward(const Field& f) {
  const GridSpec& g = f.grid();
  const int d = g.dim();
  const std::size_t n = static_cast<std::size_t>(g.n());
  const auto v = f.values();
  double sum = 0.0;
  for (std::size_t i = 0; i < v.size(); ++i) {
    std::size_t stride = 1;
    std::size_t rest = i;
    for (int a = d - 1; a >= 0; --a) {
      const std::size_t ia = rest % n;
      rest /= n;
      const double next = ia + 1 < n ? v[i + stride] : 0.0;
      const double diff = next - v[i];
      sum += diff * diff;
      if (ia == 0) sum += v[i] * v[i];
      stride *= n;
    }
  }
  const double h = g.spacing();
  return sum * g.cell_volume() / (h * h);
}

}  // namespace

double dirichlet_energy(const PartitionState& s, Boundary bc, const DomainMask* mask) {
  double total = 0.0;
  for (const auto& part : s.parts()) {
    if (mask)
      total += gradient_sq_forward(part);
    else if (bc == Boundary::periodic)
      total += gradient_sq_periodic(part);
    else
      total += gradient_sq_sine(part);
  }
  return 0.5 * total;
}

std::vector<int> label_map(const PartitionState& s) {
  const std::size_t size = s.grid().size();
  std::vector<int> labels(size, kNoLabel);
  const int k = s.k();
#pragma omp parallel for schedule(static)
  for (std::size_t node = 0; node < size; ++node) {
    double best = 0.0;
    int label = kNoLabel;
    for (int i = 0; i < k; ++i) {
      const double v = s.part(i)[node];
      if (v > best) {
        best = v;
        label = i;
      }
    }
    labels[node] = label;
  }
  return labels;
}

InvariantReport check_invariants(const PartitionState& s, const DomainMask* mask) {
  InvariantReport r;
  r.min_value = std::numeric_limits<double>::infinity();
  for (const auto& p : s.parts()) {
    for (double v : p.values()) r.min_value = std::min(r.min_value, v);
    r.max_norm_deviation = std::max(r.max_norm_deviation, std::abs(discrete_l2_norm(p) - 1.0));
  }
  const std::size_t size = s.grid().size();
  for (std::size_t node = 0; node < size; ++node) {
    int nonzero = 0;
    for (const auto& p : s.parts()) {
      if (p[node] != 0.0) ++nonzero;
      if (mask && !mask->contains(node))
        r.max_outside_mask = std::max(r.max_outside_mask, std::abs(p[node]));
    }
    if (nonzero > 1) ++r.overlapping_nodes;
  }
  return r;
}

}  // namespace optpart
