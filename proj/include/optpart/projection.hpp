#pragma once

// Constraint-enforcing splitting steps.
//
// Each step is a nodewise map on the k-tuple (u_1(x), ..., u_k(x)). The
// orthogonality variants keep at most one part alive per node:
//   ratio     (after clamping)  u_m - u_q^2 / u_m   if u_m is a strict maximizer
//   linear                      u_m - max(u_q, 0)    if u_m > 0 is a strict maximizer
//   geometric                   u_m - sqrt(u_m * max(u_q, 0))
//                               for the min-index maximizer m when u_m > 0
// where u_q is the runner-up. Everything else is set to zero.

#include <cstddef>
#include <span>
#include <vector>

#include "optpart/grid.hpp"

namespace optpart {

enum class Projection { ratio, linear, geometric };

/// Norms at or below this are treated as a vanished part.
inline constexpr double kDegenerateNorm = 1e-14;

std::vector<Field> positivity_step(const std::vector<Field>& parts);
std::vector<Field> ortho_step_ratio(const std::vector<Field>& parts);
std::vector<Field> ortho_pos_step_linear(const std::vector<Field>& parts);
std::vector<Field> ortho_pos_step_geometric(const std::vector<Field>& parts);
std::vector<Field> ortho_step(const std::vector<Field>& parts, Projection variant);

/// u_i / ||u_i||. Throws DegeneratePart when a norm is <= kDegenerateNorm.
std::vector<Field> norm_step(const std::vector<Field>& parts);

namespace node {
// Single-node versions; `in` and `out` hold one value per part.
void ortho_ratio(std::span<const double> in, std::span<double> out);
void ortho_linear(std::span<const double> in, std::span<double> out);
void ortho_geometric(std::span<const double> in, std::span<double> out);
void ortho(Projection variant, std::span<const double> in, std::span<double> out);
}  // namespace node

/// Lagrange multipliers reconstructing one node of a projection step.
///
/// The update identity checked is
///   after_i - before_i = tau * (lambda_i + sum_{j != i} eta_ij * c_j)
/// with coupling c_j = max(before_j, 0) (ratio, positivity folded into
/// lambda), before_j (linear), or (after_j + before_j) / 2 (geometric).
/// Multipliers grow like max_{i,j} before_i / before_j, so they are carried
/// in extended precision.
struct NodeMultipliers {
  int k = 0;
  std::vector<long double> eta;     // k*k, row-major, symmetric, zero diagonal
  std::vector<long double> lambda;  // k

  long double eta_at(int i, int j) const { return eta[static_cast<std::size_t>(i * k + j)]; }
};

NodeMultipliers recover_node_multipliers(std::span<const double> before,
                                         std::span<const double> after, double tau,
                                         Projection variant);

/// max_i |after_i - before_i - tau * (lambda_i + sum_j eta_ij c_j)| / tau
double node_update_residual(std::span<const double> before, std::span<const double> after,
                            const NodeMultipliers& m, double tau, Projection variant);

struct MultiplierDiagnostics {
  int k = 0;
  std::size_t nodes = 0;
  std::vector<double> eta;     // nodes*k*k
  std::vector<double> lambda;  // nodes*k
  std::vector<double> xi;      // k, (1 - ||after_i||) / tau
  double max_residual = 0.0;
  double min_lambda = 0.0;
  double max_complementarity = 0.0;  // max |lambda_i * after_i|
  double max_asymmetry = 0.0;        // max |eta_ij - eta_ji|

  double eta_at(std::size_t node, int i, int j) const {
    return eta[(node * static_cast<std::size_t>(k) + static_cast<std::size_t>(i)) *
                   static_cast<std::size_t>(k) +
               static_cast<std::size_t>(j)];
  }
  double lambda_at(std::size_t node, int i) const {
    return lambda[node * static_cast<std::size_t>(k) + static_cast<std::size_t>(i)];
  }
};

/// Diagnostic only; the stepping code uses the closed forms directly.
MultiplierDiagnostics recover_multipliers(const std::vector<Field>& before,
                                          const std::vector<Field>& after, double tau,
                                          Projection variant);

}  // namespace optpart
