#include "optpart/scheme.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "optpart/diffusion.hpp"
#include "optpart/errors.hpp"

namespace optpart {

namespace {

constexpr std::pair<Variant, std::string_view> kVariantNames[] = {
    {Variant::four_step, "four-step"},
    {Variant::three_step_linear, "three-step-1"},
    {Variant::three_step_geometric, "three-step-2"},
    {Variant::three_step_linear_ed, "three-step-1-ed"},
    {Variant::three_step_geometric_ed, "three-step-2-ed"},
};

double sum_sq_distance(const PartitionState& a, const PartitionState& b) {
  const GridSpec& g = a.grid();
  double total = 0.0;
  for (int i = 0; i < a.k(); ++i) {
    auto x = a.part(i).values();
    auto y = b.part(i).values();
    double acc = 0.0;
#pragma omp parallel for reduction(+ : acc) schedule(static)
    for (std::size_t j = 0; j < x.size(); ++j) {
      const double d = x[j] - y[j];
      acc += d * d;
    }
    total += acc;
  }
  return total * g.cell_volume();
}

double energy(const PartitionState& s, const SchemeConfig& cfg) {
  return dirichlet_energy(s, cfg.bc, cfg.mask_ptr());
}

EnergyRecord record_for(int iter, const PartitionState& s, double e) {
  EnergyRecord r;
  r.iter = iter;
  r.energy = e;
  const InvariantReport inv = check_invariants(s);
  r.min_value = inv.min_value;
  r.max_norm_deviation = inv.max_norm_deviation;
  r.norms.reserve(static_cast<std::size_t>(s.k()));
  for (const Field& f : s.parts()) r.norms.push_back(discrete_l2_norm(f));
  return r;
}

PartitionState project_and_normalize(std::vector<Field> diffused, Projection p) {
  if (p == Projection::ratio) diffused = positivity_step(diffused);
  return PartitionState(norm_step(ortho_step(diffused, p)));
}

}  // namespace

Projection projection_of(Variant v) {
  switch (v) {
    case Variant::four_step: return Projection::ratio;
    case Variant::three_step_linear:
    case Variant::three_step_linear_ed: return Projection::linear;
    case Variant::three_step_geometric:
    case Variant::three_step_geometric_ed: return Projection::geometric;
  }
  throw std::invalid_argument("unknown variant");
}

bool decreases_energy(Variant v) {
  return v == Variant::three_step_linear_ed || v == Variant::three_step_geometric_ed;
}

std::string_view variant_name(Variant v) {
  for (const auto& [var, name] : kVariantNames)
    if (var == v) return name;
  throw std::invalid_argument("unknown variant");
}

std::optional<Variant> parse_variant(std::string_view name) {
  for (const auto& [var, n] : kVariantNames)
    if (n == name) return var;
  return std::nullopt;
}

TauSchedule::TauSchedule(double steady) : TauSchedule({}, steady) {}

TauSchedule::TauSchedule(std::vector<double> warmup, double steady)
    : warmup_(std::move(warmup)), steady_(steady) {
  auto valid = [](double t) { return std::isfinite(t) && t > 0.0; };
  if (!valid(steady_) || !std::all_of(warmup_.begin(), warmup_.end(), valid))
    throw std::invalid_argument("time steps must be positive and finite");
}

TauSchedule TauSchedule::masked_default() {
  return TauSchedule({1.0 / 128, 1.0 / 64, 1.0 / 32, 1.0 / 16}, 1.0 / 8);
}

double TauSchedule::at(int step) const {
  if (step >= 0 && static_cast<std::size_t>(step) < warmup_.size())
    return warmup_[static_cast<std::size_t>(step)];
  return steady_;
}

std::vector<Field> diffuse(const PartitionState& s, const SchemeConfig& cfg, double tau) {
  std::vector<Field> out;
  out.reserve(static_cast<std::size_t>(s.k()));
  for (const Field& f : s.parts()) {
    Field u = heat_semigroup(f, tau, cfg.bc);
    out.push_back(cfg.mask ? mask_restrict(u, *cfg.mask) : std::move(u));
  }
  return out;
}

PartitionState step_four(const PartitionState& s, const SchemeConfig& cfg, int step) {
  return project_and_normalize(diffuse(s, cfg, cfg.tau.at(step)), Projection::ratio);
}

PartitionState step_three_linear(const PartitionState& s, const SchemeConfig& cfg, int step) {
  return project_and_normalize(diffuse(s, cfg, cfg.tau.at(step)), Projection::linear);
}

PartitionState step_three_geometric(const PartitionState& s, const SchemeConfig& cfg, int step) {
  return project_and_normalize(diffuse(s, cfg, cfg.tau.at(step)), Projection::geometric);
}

double residual_F(const PartitionState& candidate, const PartitionState& previous, double tau,
                  Boundary bc, const DomainMask* mask) {
  if (candidate.k() != previous.k() || !(candidate.grid() == previous.grid()))
    throw std::invalid_argument("residual_F: states differ in shape");
  return dirichlet_energy(candidate, bc, mask) - dirichlet_energy(previous, bc, mask) +
         sum_sq_distance(candidate, previous) / tau;
}

double secant_update(double sigma_s, double sigma_prev, double F_s, double F_prev) {
  const double dF = F_s - F_prev;
  if (!(std::abs(dF) > 1e-300)) throw SecantStall("secant denominator vanished");
  return sigma_s - F_s * (sigma_s - sigma_prev) / dF;
}

std::vector<std::vector<std::uint8_t>> psi_indicator(const std::vector<Field>& parts_hat, double sigma) {
  std::vector<std::vector<std::uint8_t>> psi;
  psi.reserve(parts_hat.size());
  for (const Field& f : parts_hat) {
    auto src = f.values();
    std::vector<std::uint8_t> p(src.size());
    for (std::size_t j = 0; j < src.size(); ++j) p[j] = src[j] > 0.0 && src[j] + sigma > 0.0;
    psi.push_back(std::move(p));
  }
  return psi;
}

std::vector<Field> apply_sigma(const std::vector<Field>& parts_hat, double sigma) {
  std::vector<Field> shifted;
  shifted.reserve(parts_hat.size());
  for (const Field& f : parts_hat) {
    auto src = f.values();
    std::vector<double> v(src.size());
#pragma omp parallel for schedule(static)
    for (std::size_t j = 0; j < src.size(); ++j) {
      const double t = src[j] + sigma;
      v[j] = (src[j] > 0.0 && t > 0.0) ? t : 0.0;
    }
    shifted.emplace_back(f.grid(), std::move(v));
  }
  return norm_step(shifted);
}

PartitionState energy_decrease_wrap(const PartitionState& next, const PartitionState& prev,
                                    const SchemeConfig& cfg, double tau,
                                    EnergyDecreaseState* diag,
                                    std::optional<std::pair<double, double>> seeds) {
  EnergyDecreaseState local;
  EnergyDecreaseState& d = diag ? *diag : local;
  d = EnergyDecreaseState{};

  const double e_prev = energy(prev, cfg);
  const double e_next = energy(next, cfg);
  if (e_next <= e_prev) return next;

  const double dist_scale = 1.0 / tau;
  // F(sigma) for the shifted candidate; nullopt when a part is annihilated.
  auto evaluate = [&](double sigma, std::optional<PartitionState>& cand, double& e) {
    cand.emplace(sigma == 0.0 ? next : PartitionState(apply_sigma(next.parts(), sigma)));
    e = energy(*cand, cfg);
    return e - e_prev + sum_sq_distance(*cand, prev) * dist_scale;
  };

  auto [sigma_a, sigma_b] = seeds.value_or(std::pair{-tau * tau, 0.0});
  std::optional<PartitionState> cand;
  double e = 0.0;
  double f_a = 0.0;
  double f_b = 0.0;
  try {
    f_a = evaluate(sigma_a, cand, e);
    if (e <= e_prev) {
      d.sigma = sigma_a;
      d.last_pair = {sigma_b, sigma_a};
      return std::move(*cand);
    }
    f_b = evaluate(sigma_b, cand, e);
    if (e <= e_prev) {
      d.sigma = sigma_b;
      d.last_pair = {sigma_a, sigma_b};
      return std::move(*cand);
    }
  } catch (const DegeneratePart& err) {
    throw SecantFailed(std::string("secant seed annihilated a part: ") + err.what());
  }
  d.secant_history = {{sigma_a, f_a}, {sigma_b, f_b}};

  const double tol = cfg.secant.residual_tol * std::max(1.0, e_prev);
  for (int s = 1; s <= cfg.secant.max_iters; ++s) {
    double sigma_c = 0.0;
    double f_c = 0.0;
    try {
      sigma_c = secant_update(sigma_b, sigma_a, f_b, f_a);
      d.secant_iters = s;
      f_c = evaluate(sigma_c, cand, e);
    } catch (const SecantStall&) {
      throw SecantFailed("secant stalled after " + std::to_string(s - 1) + " updates");
    } catch (const DegeneratePart& err) {
      throw SecantFailed(std::string("secant step annihilated a part: ") + err.what());
    }
    d.secant_history.emplace_back(sigma_c, f_c);
    if (e <= e_prev) {
      d.sigma = sigma_c;
      d.last_pair = {sigma_b, sigma_c};
      return std::move(*cand);
    }
    if (std::abs(f_c) <= tol)
      throw SecantFailed("secant converged without restoring energy decrease");
    sigma_a = sigma_b;
    f_a = f_b;
    sigma_b = sigma_c;
    f_b = f_c;
  }
  throw SecantFailed("secant did not converge in " + std::to_string(cfg.secant.max_iters) +
                     " iterations");
}

bool stopping_check(const PartitionState& s_n, const PartitionState& s_np1) {
  return label_map(s_n) == label_map(s_np1);
}

RunResult run(const SchemeConfig& cfg, const PartitionState& init, const StepObserver& observer) {
  if (cfg.n_max < 0) throw std::invalid_argument("n_max must be nonnegative");
  if (cfg.mask && !(cfg.mask->grid() == init.grid()))
    throw std::invalid_argument("mask grid differs from state grid");

  const Projection proj = projection_of(cfg.variant);
  const bool ed = decreases_energy(cfg.variant);

  RunResult result{init, {}, StopReason::max_iters};
  result.trace.push_back(record_for(0, init, energy(init, cfg)));
  std::vector<int> labels = label_map(init);
  std::optional<std::pair<double, double>> carried;

  for (int it = 1; it <= cfg.n_max; ++it) {
    const double tau = cfg.tau.at(it - 1);
    const PartitionState& cur = result.state;
    std::optional<PartitionState> next;
    EnergyDecreaseState ed_state;
    bool frozen = false;
    try {
      next.emplace(project_and_normalize(diffuse(cur, cfg, tau), proj));
      if (ed) {
        std::optional<std::pair<double, double>> seeds;
        if (!cfg.secant.reset_per_step) seeds = carried;
        try {
          next.emplace(energy_decrease_wrap(*next, cur, cfg, tau, &ed_state, seeds));
          carried = ed_state.last_pair;
        } catch (const SecantFailed& err) {
          if (cfg.on_secant_failure == SecantFailurePolicy::abort)
            throw SecantFailed(std::string(err.what()) + " at iteration " + std::to_string(it), it);
          next.emplace(cur);
          frozen = true;
          carried.reset();
        }
      }
    } catch (const DegeneratePart& err) {
      throw err.at_iteration(it);
    }

    const double e_next = energy(*next, cfg);
    EnergyRecord rec = record_for(it, *next, e_next);
    if (ed) {
      rec.sigma = frozen ? std::numeric_limits<double>::quiet_NaN() : ed_state.sigma;
      rec.secant_iters = ed_state.secant_iters;
    }
    rec.frozen = frozen;

    std::vector<int> next_labels = label_map(*next);
    const bool fixed = next_labels == labels;
    rec.stopped = fixed && cfg.stop_on_fixed_labels;

    result.state = std::move(*next);
    labels = std::move(next_labels);
    result.trace.push_back(std::move(rec));
    if (observer) observer(it, result.state, result.trace.back());
    if (result.trace.back().stopped) {
      result.reason = frozen ? StopReason::frozen : StopReason::labels_fixed;
      break;
    }
  }
  return result;
}

}  // namespace optpart
