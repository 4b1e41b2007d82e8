#include "optpart/projection.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "optpart/errors.hpp"

namespace optpart {

namespace {

struct TopTwo {
  int m = -1;         // min-index maximizer
  double first = 0.0;
  double second = -std::numeric_limits<double>::infinity();  // runner-up
};

template <typename Get>
TopTwo top_two(int k, Get get) {
  TopTwo t;
  t.m = 0;
  t.first = get(0);
  for (int i = 1; i < k; ++i) {
    const double v = get(i);
    if (v > t.first) {
      t.second = t.first;
      t.first = v;
      t.m = i;
    } else if (v > t.second) {
      t.second = v;
    }
  }
  return t;
}

// Surviving value for the maximizer, 0 when the node is emptied.
double survivor_ratio(const TopTwo& t) {
  const double q = std::max(t.second, 0.0);
  if (!(t.first > q)) return 0.0;
  return std::max(0.0, t.first - q * q / t.first);
}

double survivor_linear(const TopTwo& t) {
  if (!(t.first > 0.0) || !(t.first > t.second)) return 0.0;
  return t.first - std::max(t.second, 0.0);
}

double survivor_geometric(const TopTwo& t) {
  if (!(t.first > 0.0)) return 0.0;
  return t.first - std::sqrt(t.first * std::max(t.second, 0.0));
}

using Survivor = double (*)(const TopTwo&);

Survivor survivor_for(Projection v) {
  switch (v) {
    case Projection::ratio: return survivor_ratio;
    case Projection::linear: return survivor_linear;
    case Projection::geometric: return survivor_geometric;
  }
  throw std::logic_error("unknown projection");
}

void check_parts(const std::vector<Field>& parts) {
  if (parts.empty()) throw std::invalid_argument("no parts given");
  for (const auto& p : parts)
    if (!(p.grid() == parts.front().grid())) throw std::invalid_argument("parts live on different grids");
}

std::vector<Field> project(const std::vector<Field>& parts, Survivor survivor) {
  check_parts(parts);
  const GridSpec grid = parts.front().grid();
  const int k = static_cast<int>(parts.size());
  const std::size_t size = grid.size();

  std::vector<const double*> in(parts.size());
  for (std::size_t i = 0; i < parts.size(); ++i) in[i] = parts[i].values().data();
  std::vector<std::vector<double>> out(parts.size(), std::vector<double>(size, 0.0));
  std::vector<double*> out_ptr(parts.size());
  for (std::size_t i = 0; i < parts.size(); ++i) out_ptr[i] = out[i].data();

#pragma omp parallel for schedule(static)
  for (std::size_t node = 0; node < size; ++node) {
    const TopTwo t = top_two(k, [&](int i) { return in[static_cast<std::size_t>(i)][node]; });
    out_ptr[static_cast<std::size_t>(t.m)][node] = survivor(t);
  }

  std::vector<Field> result;
  result.reserve(parts.size());
  for (auto& v : out) result.emplace_back(grid, std::move(v));
  return result;
}

}  // namespace

std::vector<Field> positivity_step(const std::vector<Field>& parts) {
  check_parts(parts);
  std::vector<Field> result;
  result.reserve(parts.size());
  for (const auto& p : parts) {
    std::vector<double> v(p.values().begin(), p.values().end());
#pragma omp parallel for schedule(static)
    for (std::size_t i = 0; i < v.size(); ++i) v[i] = v[i] > 0.0 ? v[i] : 0.0;
    result.emplace_back(p.grid(), std::move(v));
  }
  return result;
}

std::vector<Field> ortho_step_ratio(const std::vector<Field>& parts) {
  return project(parts, survivor_ratio);
}

std::vector<Field> ortho_pos_step_linear(const std::vector<Field>& parts) {
  return project(parts, survivor_linear);
}

std::vector<Field> ortho_pos_step_geometric(const std::vector<Field>& parts) {
  return project(parts, survivor_geometric);
}

std::vector<Field> ortho_step(const std::vector<Field>& parts, Projection variant) {
  return project(parts, survivor_for(variant));
}

std::vector<Field> norm_step(const std::vector<Field>& parts) {
  check_parts(parts);
  const std::size_t k = parts.size();
  std::vector<double> norms(k);
#pragma omp parallel for schedule(static)
  for (std::size_t i = 0; i < k; ++i) norms[i] = discrete_l2_norm(parts[i]);

  for (std::size_t i = 0; i < k; ++i) {
    if (!(norms[i] > kDegenerateNorm)) {
      const auto vals = parts[i].values();
      const auto support = static_cast<std::size_t>(
          std::count_if(vals.begin(), vals.end(), [](double v) { return v != 0.0; }));
      throw DegeneratePart(static_cast<int>(i), support);
    }
  }

  std::vector<std::vector<double>> out(k);
#pragma omp parallel for schedule(static)
  for (std::size_t i = 0; i < k; ++i) {
    const auto vals = parts[i].values();
    out[i].resize(vals.size());
    const double inv = 1.0 / norms[i];
    for (std::size_t n = 0; n < vals.size(); ++n) out[i][n] = vals[n] * inv;
  }
  std::vector<Field> result;
  result.reserve(k);
  for (std::size_t i = 0; i < k; ++i) result.emplace_back(parts[i].grid(), std::move(out[i]));
  return result;
}

// ------------------------------------------------------------ single node

namespace node {

namespace {
void apply(Survivor survivor, std::span<const double> in, std::span<double> out) {
  if (in.size() != out.size() || in.empty()) throw std::invalid_argument("node tuple size mismatch");
  const TopTwo t = top_two(static_cast<int>(in.size()), [&](int i) { return in[static_cast<std::size_t>(i)]; });
  std::fill(out.begin(), out.end(), 0.0);
  out[static_cast<std::size_t>(t.m)] = survivor(t);
}
}  // namespace

void ortho_ratio(std::span<const double> in, std::span<double> out) { apply(survivor_ratio, in, out); }
void ortho_linear(std::span<const double> in, std::span<double> out) { apply(survivor_linear, in, out); }
void ortho_geometric(std::span<const double> in, std::span<double> out) {
  apply(survivor_geometric, in, out);
}
void ortho(Projection variant, std::span<const double> in, std::span<double> out) {
  apply(survivor_for(variant), in, out);
}

}  // namespace node

// ------------------------------------------------------------- multipliers

namespace {

struct Ranked {
  int m = -1;  // min-index maximizer among positive entries, -1 if none
  int q = -1;  // min-index runner-up among the remaining positive entries
};

Ranked rank_positive(std::span<const double> v) {
  Ranked r;
  for (int i = 0; i < static_cast<int>(v.size()); ++i) {
    const double x = v[static_cast<std::size_t>(i)];
    if (!(x > 0.0)) continue;
    if (r.m < 0 || x > v[static_cast<std::size_t>(r.m)]) {
      r.q = r.m;
      r.m = i;
    } else if (r.q < 0 || x > v[static_cast<std::size_t>(r.q)]) {
      r.q = i;
    }
  }
  return r;
}

void set_sym(NodeMultipliers& mp, int i, int j, long double value) {
  mp.eta[static_cast<std::size_t>(i * mp.k + j)] = value;
  mp.eta[static_cast<std::size_t>(j * mp.k + i)] = value;
}

long double coupling(Projection variant, std::span<const double> before, std::span<const double> after,
                     std::size_t j) {
  switch (variant) {
    case Projection::ratio: return std::max(before[j], 0.0);
    case Projection::linear: return before[j];
    case Projection::geometric: return 0.5L * (static_cast<long double>(after[j]) + before[j]);
  }
  return 0.0L;
}

// Four-step scheme: lambda carries the clamp, eta acts on the clamped values.
// Non-top parts in the positive set split their cancellation evenly between
// the top two parts; this reduces to the two- and three-part constructions.
void recover_ratio(std::span<const double> before, long double tau, NodeMultipliers& mp) {
  const int k = mp.k;
  std::vector<double> c(static_cast<std::size_t>(k));
  for (int i = 0; i < k; ++i) {
    const auto u = static_cast<std::size_t>(i);
    c[u] = std::max(before[u], 0.0);
    mp.lambda[u] = (static_cast<long double>(c[u]) - before[u]) / tau;
  }
  const Ranked r = rank_positive(c);
  if (r.q < 0) return;
  const long double cm = c[static_cast<std::size_t>(r.m)];
  const long double cp = c[static_cast<std::size_t>(r.q)];
  long double rest = 0.0L;
  for (int i = 0; i < k; ++i) {
    const long double ci = c[static_cast<std::size_t>(i)];
    if (i == r.m || i == r.q || !(ci > 0.0L)) continue;
    rest += ci * ci;
    set_sym(mp, i, r.m, -ci / (2.0L * tau * cm));
    set_sym(mp, i, r.q, -ci / (2.0L * tau * cp));
  }
  set_sym(mp, r.m, r.q, -(2.0L * cp * cp - rest) / (2.0L * tau * cm * cp));
}

// Three-step schemes. eta pairs the maximizer m only with the runner-up q;
// other positive pairs get -(scale / tau) * max ratio with scale 1 (linear)
// or 2 (geometric). lambda_m = 0 and every other lambda_i closes row i.
void recover_three_step(std::span<const double> before, std::span<const double> after, long double tau,
                        Projection variant, NodeMultipliers& mp) {
  const int k = mp.k;
  const auto b = [&](int i) -> long double { return before[static_cast<std::size_t>(i)]; };
  const Ranked r = rank_positive(before);
  const long double scale = variant == Projection::geometric ? 2.0L : 1.0L;

  if (r.q >= 0) {
    const long double top_pair = variant == Projection::geometric
                                     ? -(2.0L / tau) * std::sqrt(b(r.m) / b(r.q))
                                     : -1.0L / tau;
    set_sym(mp, r.m, r.q, top_pair);
    for (int i = 0; i < k; ++i) {
      if (i == r.m || !(b(i) > 0.0L)) continue;
      for (int j = i + 1; j < k; ++j) {
        if (j == r.m || !(b(j) > 0.0L)) continue;
        set_sym(mp, i, j, -(scale / tau) * std::max(b(i) / b(j), b(j) / b(i)));
      }
    }
  }

  for (int i = 0; i < k; ++i) {
    if (i == r.m) continue;
    long double sum = 0.0L;
    for (int j = 0; j < k; ++j)
      if (j != i) sum += mp.eta_at(i, j) * coupling(variant, before, after, static_cast<std::size_t>(j));
    mp.lambda[static_cast<std::size_t>(i)] = -(b(i) + tau * sum) / tau;
  }
}

}  // namespace

NodeMultipliers recover_node_multipliers(std::span<const double> before,
                                         std::span<const double> after, double tau,
                                         Projection variant) {
  if (before.size() != after.size() || before.empty())
    throw std::invalid_argument("node tuple size mismatch");
  if (!(tau > 0.0)) throw std::invalid_argument("tau must be positive");
  NodeMultipliers mp;
  mp.k = static_cast<int>(before.size());
  mp.eta.assign(static_cast<std::size_t>(mp.k * mp.k), 0.0);
  mp.lambda.assign(static_cast<std::size_t>(mp.k), 0.0);
  if (variant == Projection::ratio)
    recover_ratio(before, tau, mp);
  else
    recover_three_step(before, after, tau, variant, mp);
  return mp;
}

double node_update_residual(std::span<const double> before, std::span<const double> after,
                            const NodeMultipliers& mp, double tau, Projection variant) {
  const long double t = tau;
  long double worst = 0.0L;
  for (int i = 0; i < mp.k; ++i) {
    long double sum = mp.lambda[static_cast<std::size_t>(i)];
    for (int j = 0; j < mp.k; ++j)
      if (j != i) sum += mp.eta_at(i, j) * coupling(variant, before, after, static_cast<std::size_t>(j));
    const long double res =
        (static_cast<long double>(after[static_cast<std::size_t>(i)]) - before[static_cast<std::size_t>(i)] - t * sum) / t;
    worst = std::max(worst, std::abs(res));
  }
  return static_cast<double>(worst);
}

MultiplierDiagnostics recover_multipliers(const std::vector<Field>& before,
                                          const std::vector<Field>& after, double tau,
                                          Projection variant) {
  check_parts(before);
  check_parts(after);
  if (before.size() != after.size() || !(before.front().grid() == after.front().grid()))
    throw std::invalid_argument("before/after shapes differ");

  MultiplierDiagnostics d;
  d.k = static_cast<int>(before.size());
  d.nodes = before.front().size();
  const std::size_t k = before.size();
  d.eta.resize(d.nodes * k * k);
  d.lambda.resize(d.nodes * k);
  d.min_lambda = std::numeric_limits<double>::infinity();

  std::vector<double> b(k), a(k);
  for (std::size_t n = 0; n < d.nodes; ++n) {
    for (std::size_t i = 0; i < k; ++i) {
      b[i] = before[i][n];
      a[i] = after[i][n];
    }
    const NodeMultipliers mp = recover_node_multipliers(b, a, tau, variant);
    std::transform(mp.eta.begin(), mp.eta.end(), d.eta.begin() + static_cast<std::ptrdiff_t>(n * k * k),
                   [](long double x) { return static_cast<double>(x); });
    std::transform(mp.lambda.begin(), mp.lambda.end(), d.lambda.begin() + static_cast<std::ptrdiff_t>(n * k),
                   [](long double x) { return static_cast<double>(x); });
    d.max_residual = std::max(d.max_residual, node_update_residual(b, a, mp, tau, variant));
    for (int i = 0; i < d.k; ++i) {
      const long double lam = mp.lambda[static_cast<std::size_t>(i)];
      d.min_lambda = std::min(d.min_lambda, static_cast<double>(lam));
      d.max_complementarity =
          std::max(d.max_complementarity, static_cast<double>(std::abs(lam * a[static_cast<std::size_t>(i)])));
      for (int j = 0; j < d.k; ++j)
        d.max_asymmetry =
            std::max(d.max_asymmetry, static_cast<double>(std::abs(mp.eta_at(i, j) - mp.eta_at(j, i))));
    }
  }
  d.xi.resize(k);
  for (std::size_t i = 0; i < k; ++i) d.xi[i] = (1.0 - discrete_l2_norm(after[i])) / tau;
  return d;
}

}  // namespace optpart
