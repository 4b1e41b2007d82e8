#pragma once

// FFTW plans for the periodic (r2c/c2r) and Dirichlet (DST-I) transforms.
// Plans are created once per grid under a lock and executed through the
// new-array interface, so concurrent callers only share read-only plans.

#include <complex>
#include <cstddef>
#include <memory>
#include <vector>

#include <fftw3.h>

#include "optpart/grid.hpp"

namespace optpart::detail {

template <typename T>
class FftwBuffer {
 public:
  explicit FftwBuffer(std::size_t count)
      : data_(static_cast<T*>(fftw_malloc(sizeof(T) * count))), size_(count) {
    if (!data_) throw std::bad_alloc();
  }
  ~FftwBuffer() { fftw_free(data_); }
  FftwBuffer(const FftwBuffer&) = delete;
  FftwBuffer& operator=(const FftwBuffer&) = delete;

  T* data() { return data_; }
  const T* data() const { return data_; }
  std::size_t size() const { return size_; }
  T& operator[](std::size_t i) { return data_[i]; }

 private:
  T* data_;
  std::size_t size_;
};

/// Real-to-complex transforms over the full periodic grid.
class PeriodicTransform {
 public:
  static const PeriodicTransform& for_grid(const GridSpec& grid);
  ~PeriodicTransform();

  const GridSpec& grid() const { return grid_; }
  /// n^(d-1) * (n/2 + 1)
  std::size_t spectrum_size() const { return k2_.size(); }
  /// |m|^2 for each half-spectrum slot.
  const std::vector<double>& wavenumber_sq() const { return k2_; }
  /// Multiplicity of each slot in the full spectrum (1 or 2).
  const std::vector<double>& multiplicity() const { return mult_; }

  /// Unnormalized forward DFT. `in` is preserved.
  void forward(double* in, fftw_complex* out) const;
  /// Unnormalized inverse DFT; `in` is overwritten.
  void backward(fftw_complex* in, double* out) const;

 private:
  explicit PeriodicTransform(const GridSpec& grid);
  GridSpec grid_;
  fftw_plan fwd_ = nullptr;
  fftw_plan bwd_ = nullptr;
  std::vector<double> k2_;
  std::vector<double> mult_;
};

/// DST-I over the interior nodes (indices 1..n-1 on each axis).
class SineTransform {
 public:
  static const SineTransform& for_grid(const GridSpec& grid);
  ~SineTransform();

  const GridSpec& grid() const { return grid_; }
  /// (n-1)^d
  std::size_t size() const { return lambda_.size(); }
  /// Dirichlet eigenvalue sum_a (m_a / 2)^2 for each sine mode.
  const std::vector<double>& eigenvalue() const { return lambda_; }
  /// Applying twice multiplies by (2n)^d.
  double roundtrip_scale() const { return scale_; }

  /// In-place unnormalized DST-I.
  void apply(double* data) const;

  /// Copies interior nodes of a full-grid array into the compact layout.
  void gather(const double* full, double* interior) const;
  /// Inverse of gather; boundary nodes are set to zero.
  void scatter(const double* interior, double* full) const;

 private:
  explicit SineTransform(const GridSpec& grid);
  GridSpec grid_;
  fftw_plan plan_ = nullptr;
  std::vector<double> lambda_;
  std::vector<std::size_t> interior_to_full_;
  double scale_ = 1.0;
};

}  // namespace optpart::detail
