#pragma once

#include "optpart/grid.hpp"

namespace optpart {

/// Nodal values in (-kRingingClamp, 0) are flushed to zero after a heat step.
inline constexpr double kRingingClamp = 1e-12;

/// e^{tau Laplacian} on the periodic box: Fourier mode m is damped by
/// e^{-tau |m|^2}. Throws std::invalid_argument for tau <= 0.
Field heat_semigroup_periodic(const Field& f, double tau);

/// e^{tau Laplacian} with homogeneous Dirichlet data: sine mode m (frequency
/// m/2 on the 2 pi box) is damped by e^{-tau sum_a (m_a/2)^2}.
/// Throws std::invalid_argument for tau <= 0 or nonzero boundary values.
Field heat_semigroup_dirichlet(const Field& f, double tau);

Field heat_semigroup(const Field& f, double tau, Boundary bc);

/// Nodewise product with the indicator.
Field mask_restrict(const Field& f, const DomainMask& m);

}  // namespace optpart
