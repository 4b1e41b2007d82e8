#include "optpart/diffusion.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "fft.hpp"

namespace optpart {

namespace {

void check_tau(double tau) {
  if (!(tau > 0.0) || !std::isfinite(tau))
    throw std::invalid_argument("diffusion time step must be positive");
}

void clamp_ringing(std::vector<double>& v) {
  for (double& x : v)
    if (x < 0.0 && x > -kRingingClamp) x = 0.0;
}

}  // namespace

Field heat_semigroup_periodic(const Field& f, double tau) {
  check_tau(tau);
  const auto& t = detail::PeriodicTransform::for_grid(f.grid());
  detail::FftwBuffer<double> real(f.size());
  detail::FftwBuffer<fftw_complex> spec(t.spectrum_size());
  std::copy(f.values().begin(), f.values().end(), real.data());
  t.forward(real.data(), spec.data());

  const auto& k2 = t.wavenumber_sq();
  const double inv_n = 1.0 / static_cast<double>(f.size());
  for (std::size_t i = 0; i < t.spectrum_size(); ++i) {
    const double damp = std::exp(-tau * k2[i]) * inv_n;
    spec[i][0] *= damp;
    spec[i][1] *= damp;
  }
  t.backward(spec.data(), real.data());

  std::vector<double> out(real.data(), real.data() + f.size());
  clamp_ringing(out);
  return Field(f.grid(), std::move(out));
}

Field heat_semigroup_dirichlet(const Field& f, double tau) {
  check_tau(tau);
  const GridSpec& g = f.grid();
  for (std::size_t i = 0; i < f.size(); ++i)
    if (g.on_boundary(i) && f[i] != 0.0)
      throw std::invalid_argument("Dirichlet diffusion needs zero boundary values");

  const auto& t = detail::SineTransform::for_grid(g);
  detail::FftwBuffer<double> buf(t.size());
  t.gather(f.values().data(), buf.data());
  t.apply(buf.data());
  const auto& lam = t.eigenvalue();
  const double inv_scale = 1.0 / t.roundtrip_scale();
  for (std::size_t i = 0; i < t.size(); ++i) buf[i] *= std::exp(-tau * lam[i]) * inv_scale;
  t.apply(buf.data());

  std::vector<double> out(g.size());
  t.scatter(buf.data(), out.data());
  clamp_ringing(out);
  return Field(g, std::move(out));
}

Field heat_semigroup(const Field& f, double tau, Boundary bc) {
  return bc == Boundary::periodic ? heat_semigroup_periodic(f, tau) : heat_semigroup_dirichlet(f, tau);
}

Field mask_restrict(const Field& f, const DomainMask& m) {
  if (!(f.grid() == m.grid())) throw std::invalid_argument("mask and field live on different grids");
  std::vector<double> out(f.values().begin(), f.values().end());
  const auto ind = m.indicator();
#pragma omp parallel for schedule(static)
  for (std::size_t i = 0; i < out.size(); ++i)
    if (!ind[i]) out[i] = 0.0;
  return Field(f.grid(), std::move(out));
}

}  // namespace optpart
