#pragma once

// Time-stepping drivers for the constrained gradient flow.
//
// Every step diffuses each part with the heat semigroup (then restricts to the
// mask, if any) and projects back onto the constraint set:
//   four_step             clamp -> ratio orthogonality -> normalize
//   three_step_linear     linear orthogonality/positivity -> normalize
//   three_step_geometric  geometric orthogonality/positivity -> normalize
// The *_ed variants additionally shift the result by a scalar sigma, found by
// a secant iteration, until the discrete energy no longer increases.

#include <cstdint>
#include <functional>
#include <limits>
#include <optional>
#include <string_view>
#include <utility>
#include <vector>

#include "optpart/grid.hpp"
#include "optpart/projection.hpp"

namespace optpart {

enum class Variant {
  four_step,
  three_step_linear,
  three_step_geometric,
  three_step_linear_ed,
  three_step_geometric_ed,
};

Projection projection_of(Variant v);
bool decreases_energy(Variant v);
std::string_view variant_name(Variant v);
std::optional<Variant> parse_variant(std::string_view name);

/// Per-iteration time steps: the warm-up entries first, then `steady`.
class TauSchedule {
 public:
  TauSchedule(double steady = 0.1);  // NOLINT(google-explicit-constructor)
  TauSchedule(std::vector<double> warmup, double steady);

  /// The default for masked domains: 1/128, 1/64, 1/32, 1/16, then 1/8.
  static TauSchedule masked_default();

  double at(int step) const;
  const std::vector<double>& warmup() const { return warmup_; }
  double steady() const { return steady_; }

 private:
  std::vector<double> warmup_;
  double steady_;
};

struct SecantOptions {
  int max_iters = 50;
  /// |F| <= residual_tol * max(1, E^n) counts as a converged root.
  double residual_tol = 1e-10;
  /// Restart from (-tau^2, 0) every step instead of carrying the last pair.
  bool reset_per_step = true;
};

enum class SecantFailurePolicy { freeze, abort };

struct SchemeConfig {
  Variant variant = Variant::four_step;
  TauSchedule tau{0.1};
  Boundary bc = Boundary::periodic;
  std::optional<DomainMask> mask;
  int n_max = 2000;
  SecantOptions secant;
  SecantFailurePolicy on_secant_failure = SecantFailurePolicy::freeze;
  /// Stop as soon as two consecutive label maps agree.
  bool stop_on_fixed_labels = true;

  const DomainMask* mask_ptr() const { return mask ? &*mask : nullptr; }
};

/// Heat step for every part, followed by the mask restriction.
std::vector<Field> diffuse(const PartitionState& s, const SchemeConfig& cfg, double tau);

PartitionState step_four(const PartitionState& s, const SchemeConfig& cfg, int step = 0);
PartitionState step_three_linear(const PartitionState& s, const SchemeConfig& cfg, int step = 0);
PartitionState step_three_geometric(const PartitionState& s, const SchemeConfig& cfg, int step = 0);

/// E(candidate) - E(previous) + (1/tau) sum_i ||cand_i - prev_i||^2
double residual_F(const PartitionState& candidate, const PartitionState& previous, double tau,
                  Boundary bc, const DomainMask* mask = nullptr);

/// sigma_s - F_s (sigma_s - sigma_prev) / (F_s - F_prev). Throws SecantStall
/// when |F_s - F_prev| <= 1e-300.
double secant_update(double sigma_s, double sigma_prev, double F_s, double F_prev);

/// (u + Psi sigma) / ||u + Psi sigma|| per part, where Psi = 1 on nodes with
/// u > 0 and u + sigma > 0. Nodes with u + sigma <= 0 are zeroed.
std::vector<Field> apply_sigma(const std::vector<Field>& parts_hat, double sigma);

/// The Psi indicator per part: 1 where u > 0 and u + sigma > 0.
std::vector<std::vector<std::uint8_t>> psi_indicator(const std::vector<Field>& parts_hat, double sigma);

struct EnergyDecreaseState {
  double sigma = 0.0;
  int secant_iters = 0;
  std::vector<std::pair<double, double>> secant_history;  // (sigma_s, F(sigma_s))
  /// Last two secant abscissae, used as the next seeds when carried over.
  std::pair<double, double> last_pair{0.0, 0.0};
};

/// Returns a state with E <= E(prev). `next` comes out unchanged when it
/// already satisfies that. Throws SecantFailed when the secant iteration
/// cannot reach the energy bound.
PartitionState energy_decrease_wrap(const PartitionState& next, const PartitionState& prev,
                                    const SchemeConfig& cfg, double tau,
                                    EnergyDecreaseState* diag = nullptr,
                                    std::optional<std::pair<double, double>> seeds = std::nullopt);

/// True iff both states have the same label map at every node.
bool stopping_check(const PartitionState& s_n, const PartitionState& s_np1);

struct EnergyRecord {
  int iter = 0;
  double energy = 0.0;
  std::vector<double> norms;
  double min_value = 0.0;
  double max_norm_deviation = 0.0;
  double sigma = std::numeric_limits<double>::quiet_NaN();
  int secant_iters = 0;
  bool stopped = false;
  bool frozen = false;
};

using EnergyTrace = std::vector<EnergyRecord>;

/// A frozen step repeats the previous state, so its labels are fixed too;
/// `frozen` marks that case.
enum class StopReason { labels_fixed, frozen, max_iters };

struct RunResult {
  PartitionState state;
  EnergyTrace trace;
  StopReason reason = StopReason::max_iters;
};

/// Called after every completed iteration with its index (1-based).
using StepObserver = std::function<void(int, const PartitionState&, const EnergyRecord&)>;

/// Iterates the configured scheme from `init`. DegeneratePart (and
/// SecantFailed under the abort policy) propagate with the iteration index.
RunResult run(const SchemeConfig& cfg, const PartitionState& init, const StepObserver& observer = {});

}  // namespace optpart
