#include "fft.hpp"

#include <algorithm>
#include <array>
#include <map>
#include <mutex>
#include <utility>

namespace optpart::detail {

namespace {

// The FFTW planner is not re-entrant.
std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

template <typename T>
const T& cached(const GridSpec& grid, std::map<std::pair<int, int>, std::unique_ptr<T>>& cache,
                T* (*make)(const GridSpec&)) {
  std::lock_guard lock(planner_mutex());
  auto key = std::make_pair(grid.dim(), grid.n());
  auto it = cache.find(key);
  if (it == cache.end()) it = cache.emplace(key, std::unique_ptr<T>(make(grid))).first;
  return *it->second;
}

int signed_frequency(int j, int n) { return j <= n / 2 ? j : j - n; }

}  // namespace

// ---------------------------------------------------------------- periodic

PeriodicTransform::PeriodicTransform(const GridSpec& grid) : grid_(grid) {
  const int d = grid.dim();
  const int n = grid.n();
  std::vector<int> dims(static_cast<std::size_t>(d), n);
  const std::size_t half = static_cast<std::size_t>(n / 2 + 1);
  std::size_t outer = 1;
  for (int a = 0; a + 1 < d; ++a) outer *= static_cast<std::size_t>(n);

  FftwBuffer<double> real(grid.size());
  FftwBuffer<fftw_complex> spec(outer * half);
  fwd_ = fftw_plan_dft_r2c(d, dims.data(), real.data(), spec.data(), FFTW_ESTIMATE);
  bwd_ = fftw_plan_dft_c2r(d, dims.data(), spec.data(), real.data(), FFTW_ESTIMATE);

  k2_.resize(outer * half);
  mult_.resize(outer * half);
  for (std::size_t o = 0; o < outer; ++o) {
    double k2_outer = 0.0;
    std::size_t rest = o;
    for (int a = d - 2; a >= 0; --a) {
      const int j = static_cast<int>(rest % static_cast<std::size_t>(n));
      rest /= static_cast<std::size_t>(n);
      const double m = signed_frequency(j, n);
      k2_outer += m * m;
    }
    for (std::size_t j = 0; j < half; ++j) {
      const double m = static_cast<double>(j);
      k2_[o * half + j] = k2_outer + m * m;
      mult_[o * half + j] = (j == 0 || 2 * j == static_cast<std::size_t>(n)) ? 1.0 : 2.0;
    }
  }
}

PeriodicTransform::~PeriodicTransform() {
  fftw_destroy_plan(fwd_);
  fftw_destroy_plan(bwd_);
}

const PeriodicTransform& PeriodicTransform::for_grid(const GridSpec& grid) {
  static std::map<std::pair<int, int>, std::unique_ptr<PeriodicTransform>> cache;
  return cached<PeriodicTransform>(grid, cache, [](const GridSpec& g) {
    return new PeriodicTransform(g);
  });
}

void PeriodicTransform::forward(double* in, fftw_complex* out) const {
  fftw_execute_dft_r2c(fwd_, in, out);
}

void PeriodicTransform::backward(fftw_complex* in, double* out) const {
  fftw_execute_dft_c2r(bwd_, in, out);
}

// --------------------------------------------------------------- dirichlet

SineTransform::SineTransform(const GridSpec& grid) : grid_(grid) {
  const int d = grid.dim();
  const int n = grid.n();
  const int m = n - 1;
  std::vector<int> dims(static_cast<std::size_t>(d), m);
  std::vector<fftw_r2r_kind> kinds(static_cast<std::size_t>(d), FFTW_RODFT00);

  std::size_t count = 1;
  for (int a = 0; a < d; ++a) count *= static_cast<std::size_t>(m);
  FftwBuffer<double> buf(count);
  plan_ = fftw_plan_r2r(d, dims.data(), buf.data(), buf.data(), kinds.data(), FFTW_ESTIMATE);

  lambda_.resize(count);
  interior_to_full_.resize(count);
  for (std::size_t c = 0; c < count; ++c) {
    std::array<int, 3> idx{0, 0, 0};
    std::size_t rest = c;
    double lam = 0.0;
    for (int a = d - 1; a >= 0; --a) {
      const int j = static_cast<int>(rest % static_cast<std::size_t>(m));
      rest /= static_cast<std::size_t>(m);
      idx[static_cast<std::size_t>(a)] = j + 1;
      const double freq = 0.5 * (j + 1);
      lam += freq * freq;
    }
    lambda_[c] = lam;
    interior_to_full_[c] = grid.ravel(idx);
  }
  scale_ = 1.0;
  for (int a = 0; a < d; ++a) scale_ *= 2.0 * n;
}

SineTransform::~SineTransform() { fftw_destroy_plan(plan_); }

const SineTransform& SineTransform::for_grid(const GridSpec& grid) {
  static std::map<std::pair<int, int>, std::unique_ptr<SineTransform>> cache;
  return cached<SineTransform>(grid, cache, [](const GridSpec& g) {
    return new SineTransform(g);
  });
}

void SineTransform::apply(double* data) const { fftw_execute_r2r(plan_, data, data); }

void SineTransform::gather(const double* full, double* interior) const {
  for (std::size_t c = 0; c < interior_to_full_.size(); ++c) interior[c] = full[interior_to_full_[c]];
}

void SineTransform::scatter(const double* interior, double* full) const {
  std::fill(full, full + grid_.size(), 0.0);
  for (std::size_t c = 0; c < interior_to_full_.size(); ++c) full[interior_to_full_[c]] = interior[c];
}

}  // namespace optpart::detail
