#include "rdlab/degiorgi.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <sstream>
#include <stdexcept>

#include "rdlab/cutoff.hpp"

namespace rdlab {

double phi_level(double z) {
  if (!(z > 0.0)) return 0.0;
  if (z < 1e-2) {
    // sum_{k>=2} (-1)^k z^k / (k (k-1)); the closed form cancels badly here.
    double term = z * z;
    double s = 0.0;
    for (int k = 2; k < 12; ++k) {
      s += (k % 2 == 0 ? 1.0 : -1.0) * term / (k * (k - 1.0));
      term *= z;
    }
    return s;
  }
  return (1.0 + z) * std::log1p(z) - z;
}

double psi_level(double z) {
  if (!(z > 0.0)) return 0.0;
  return z / (std::sqrt(1.0 + z) + 1.0);
}

double TruncationLadder::level(int n) { return 1.0 - std::ldexp(1.0, -n); }
double TruncationLadder::radius(int n) { return 1.0 + std::ldexp(1.0, -n); }

double TruncationLadder::cutoff_hessian_scaled(int n) {
  if (n < 1) throw std::invalid_argument("cutoff: n must be >= 1");
  const RadialCutoff z(radius(n), radius(n - 1));
  return z.hessian_sup() * std::ldexp(1.0, -2 * n);
}

namespace {

constexpr double kTimeSlack = 1e-9;

struct Window {
  std::vector<double> times;
  std::vector<std::size_t> index;  // snapshots bracketing [t0, t1]
  double t0 = 0.0;
  double t1 = 0.0;
};

Window window(const SpaceTimeSlab& slab, double t0, double t1) {
  slab.validate();
  if (t0 < slab.t_begin() - kTimeSlack || t1 > slab.t_end() + kTimeSlack) {
    std::ostringstream os;
    os << "slab [" << slab.t_begin() << ", " << slab.t_end() << "] does not cover cylinder times ["
       << t0 << ", " << t1 << "]";
    throw std::invalid_argument(os.str());
  }
  Window w;
  w.t0 = std::max(t0, slab.t_begin());
  w.t1 = std::min(t1, slab.t_end());
  const auto& s = slab.snapshots;
  std::size_t lo = 0;
  while (lo + 1 < s.size() && s[lo + 1].time <= w.t0 + kTimeSlack) ++lo;
  std::size_t hi = s.size() - 1;
  while (hi > 0 && s[hi - 1].time >= w.t1 - kTimeSlack) --hi;
  for (std::size_t k = lo; k <= hi; ++k) {
    w.index.push_back(k);
    w.times.push_back(s[k].time);
  }
  w.t0 = std::max(w.t0, w.times.front());
  w.t1 = std::min(w.t1, w.times.back());
  return w;
}

bool inside(double t, const Window& w) {
  return t >= w.t0 - kTimeSlack && t <= w.t1 + kTimeSlack;
}

struct LevelSums {
  double phi = 0.0;   // sum_i int_B Phi(a_i - k)
  double grad = 0.0;  // sum_i int_B |grad Psi(a_i - k)|^2
  double ent = 0.0;   // sum_i int_B (1 + [a_i - k]_+) ln(1 + [a_i - k]_+)
};

LevelSums level_sums(const SpeciesField& f, const ScalarField& mask, double k) {
  const auto& g = f.grid;
  const double vol = g.cell_volume();
  LevelSums s;
  for (const auto& a : f.species) {
    bool any = false;
    for (std::size_t c = 0; c < g.cells(); ++c) {
      if (mask[c] == 0.0 || !(a[c] > k)) continue;
      any = true;
      const double u = a[c] - k;
      s.phi += phi_level(u);
      s.ent += (1.0 + u) * std::log1p(u);
    }
    if (!any) continue;
    const auto g2 = squared_gradient(g, a);
    for (std::size_t c = 0; c < g.cells(); ++c) {
      if (mask[c] == 0.0 || !(a[c] > k)) continue;
      s.grad += g2[c] / (4.0 * (1.0 + (a[c] - k)));
    }
  }
  s.phi *= vol;
  s.grad *= vol;
  s.ent *= vol;
  return s;
}

std::size_t node_index(const GridSpec& g, const Point& x) {
  std::array<int, 3> ijk{0, 0, 0};
  for (int d = 0; d < g.dim(); ++d) {
    const double u = (x[d] + 0.5 * g.length()) / g.spacing();
    const double j = std::round(u);
    if (std::abs(u - j) > 1e-9) {
      throw std::invalid_argument("anchor coordinate " + std::to_string(x[d]) +
                                  " is not a grid node");
    }
    ijk[d] = static_cast<int>(((static_cast<long>(j) % g.n()) + g.n()) % g.n());
  }
  return g.flatten(ijk);
}

const SpeciesField& snapshot_at(const SpaceTimeSlab& slab, double t) {
  for (const auto& s : slab.snapshots) {
    if (std::abs(s.time - t) <= kTimeSlack * std::max(1.0, std::abs(t))) return s;
  }
  throw std::invalid_argument("no stored snapshot at anchor time " + std::to_string(t));
}

}  // namespace

double compute_Un(const SpaceTimeSlab& slab, const TruncationLadder& ladder, int n) {
  if (n < 0) throw std::invalid_argument("compute_Un: n must be >= 0");
  const double tn = TruncationLadder::radius(n);
  const double k = TruncationLadder::level(n);
  const Window w = window(slab, ladder.anchor.t - tn, ladder.anchor.t);
  const auto mask = ball_mask(slab.grid(), ladder.anchor.x, tn);
  double sup = 0.0;
  std::vector<double> grad;
  for (std::size_t j = 0; j < w.index.size(); ++j) {
    const auto& snap = slab.snapshots[w.index[j]];
    const auto s = level_sums(snap, mask, k);
    if (inside(snap.time, w)) sup = std::max(sup, s.phi);
    grad.push_back(s.grad);
  }
  return sup + integrate_piecewise_linear(w.times, grad, w.t0, w.t1);
}

std::vector<double> compute_ladder(const SpaceTimeSlab& slab, const TruncationLadder& ladder) {
  std::vector<double> u;
  for (int n = 0; n <= ladder.n_max; ++n) u.push_back(compute_Un(slab, ladder, n));
  return u;
}

RecursionReport recursion_check(const std::vector<double>& U, int dim) {
  if (U.size() < 3) throw std::invalid_argument("recursion_check: need at least 3 energies");
  if (dim < 1) throw std::invalid_argument("recursion_check: bad dimension");
  RecursionReport rep;
  if (std::all_of(U.begin(), U.end(), [](double u) { return u == 0.0; })) {
    rep.vacuous = true;
    rep.superlinear_decay = true;
    return rep;
  }
  const double beta0 = (dim + 2.0) / dim;
  const double nan = std::numeric_limits<double>::quiet_NaN();
  // Normal equations for y = n c + beta x.
  double snn = 0.0, snx = 0.0, sxx = 0.0, sny = 0.0, sxy = 0.0;
  for (std::size_t n = 1; n < U.size(); ++n) {
    if (U[n - 1] > 0.0) {
      const double c = U[n] / std::pow(U[n - 1], beta0);
      rep.implied_constant.push_back(c);
      rep.max_root_constant = std::max(rep.max_root_constant, std::pow(c, 1.0 / n));
    } else {
      rep.implied_constant.push_back(nan);
    }
    if (U[n - 1] > 0.0 && U[n] > 0.0) {
      const double x = std::log(U[n - 1]);
      const double y = std::log(U[n]);
      const double nn = static_cast<double>(n);
      snn += nn * nn;
      snx += nn * x;
      sxx += x * x;
      sny += nn * y;
      sxy += x * y;
      ++rep.pairs_used;
    }
  }
  const double det = snn * sxx - snx * snx;
  if (rep.pairs_used >= 2 && std::abs(det) > 1e-14 * snn * sxx) {
    rep.log_constant = (sny * sxx - sxy * snx) / det;
    rep.exponent = (snn * sxy - snx * sny) / det;
  } else {
    rep.log_constant = nan;
    rep.exponent = nan;
  }
  bool decreasing = true;
  bool hits_zero = false;
  for (std::size_t n = 1; n < U.size(); ++n) {
    if (U[n] > U[n - 1]) decreasing = false;
    if (U[n] == 0.0) hits_zero = true;
  }
  rep.superlinear_decay = decreasing && (hits_zero || rep.exponent > 1.0);
  return rep;
}

std::vector<double> cylinder_lp_norms(const SpaceTimeSlab& slab, double p, const Anchor& anchor,
                                      double radius, double duration) {
  if (!(p >= 1.0)) throw std::invalid_argument("L^p norm: p must be >= 1");
  const Window w = window(slab, anchor.t - duration, anchor.t);
  const auto& g = slab.grid();
  const auto mask = ball_mask(g, anchor.x, radius);
  const std::size_t count = static_cast<std::size_t>(slab.snapshots.front().count());
  std::vector<std::vector<double>> per(count);
  for (std::size_t idx : w.index) {
    const auto& snap = slab.snapshots[idx];
    for (std::size_t i = 0; i < count; ++i) {
      double s = 0.0;
      const auto& a = snap.species[i];
      for (std::size_t c = 0; c < g.cells(); ++c) {
        if (mask[c] != 0.0 && a[c] > 0.0) s += std::pow(a[c], p);
      }
      per[i].push_back(s * g.cell_volume());
    }
  }
  std::vector<double> norms;
  for (std::size_t i = 0; i < count; ++i) {
    norms.push_back(std::pow(integrate_piecewise_linear(w.times, per[i], w.t0, w.t1), 1.0 / p));
  }
  return norms;
}

double cylinder_lp_sum(const SpaceTimeSlab& slab, double p, const Anchor& anchor, double radius,
                       double duration) {
  double s = 0.0;
  for (double v : cylinder_lp_norms(slab, p, anchor, radius, duration)) s += v;
  return s;
}

LocalBoundReport local_bound_experiment(const SpaceTimeSlab& slab, double p, double delta,
                                        const Anchor& anchor) {
  if (!(p > 1.0)) throw std::invalid_argument("local bound: p must exceed 1");
  LocalBoundReport rep;
  rep.norm = cylinder_lp_sum(slab, p, anchor, 3.0, 3.0);
  const auto& snap = snapshot_at(slab, anchor.t);
  const std::size_t c = node_index(snap.grid, anchor.x);
  for (const auto& a : snap.species) rep.center_values.push_back(a[c]);
  rep.triggered = rep.norm <= delta;
  if (rep.triggered) {
    rep.pass = std::all_of(rep.center_values.begin(), rep.center_values.end(),
                           [](double v) { return v <= 1.0; });
  }
  return rep;
}

PropertyReport rineq_check(const ReactionModel& model, std::size_t n_samples, std::uint64_t seed) {
  if (!(model.nu > 1.0 && model.nu < 2.0)) {
    throw std::invalid_argument("rineq_check: requires 1 < nu < 2");
  }
  const std::size_t p = static_cast<std::size_t>(model.species);
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> log_mag(std::log(1e-6), std::log(1e3));
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  PropertyReport rep;
  rep.name = "reaction_shift_bound";
  std::vector<double> a(p), v(p), qa(p), qv(p);
  double worst_ratio = 0.0;
  for (std::size_t s = 0; s < n_samples; ++s) {
    const double u = unit(rng);
    const double level = u < 0.05 ? 0.0 : (u < 0.1 ? 1.0 : unit(rng));
    if (unit(rng) < 0.2) {
      for (auto& x : a) x = level * unit(rng);
    } else {
      for (auto& x : a) x = std::exp(log_mag(rng));
    }
    double vn = 0.0;
    for (std::size_t i = 0; i < p; ++i) {
      v[i] = 1.0 + std::max(a[i] - level, 0.0);
      vn += v[i] * v[i];
    }
    model.evaluate(a, qa);
    model.evaluate(v, qv);
    double lhs = 0.0;
    for (std::size_t i = 0; i < p; ++i) lhs += std::abs(qa[i] - qv[i]);
    const double rhs = 2.0 * static_cast<double>(p) * model.lambda * std::pow(std::sqrt(vn), model.nu - 1.0);
    const double ratio = lhs / rhs;
    worst_ratio = std::max(worst_ratio, ratio);
    ++rep.samples;
    if (ratio > 1.0 + 1e-6) {
      ++rep.violations;
      rep.worst = std::max(rep.worst, ratio - 1.0);
    }
  }
  rep.pass = rep.violations == 0;
  rep.details = {{"max_ratio", worst_ratio}, {"lambda", model.lambda}};
  return rep;
}

LevelConstants level_set_constants() {
  LevelConstants c;
  // Psi/sqrt(Phi) decreases from its z -> 0 limit 1/sqrt(2); the scan guards
  // against any interior maximum.
  double best = 1.0 / std::sqrt(2.0);
  constexpr int kScan = 200000;
  for (int k = 0; k <= kScan; ++k) {
    const double z = std::pow(10.0, -8.0 + 16.0 * k / kScan);
    best = std::max(best, psi_level(z) / std::sqrt(phi_level(z)));
  }
  c.psi_over_sqrt_phi = best;
  // For z > k_n the gap z - k_{n-1} exceeds 2^-n, so Psi(z - k_{n-1}) > Psi(2^-n).
  for (int n = 1; n <= 60; ++n) {
    c.indicator = std::max(c.indicator, 1.0 / (std::ldexp(1.0, n) * psi_level(std::ldexp(1.0, -n))));
  }
  c.c_tilde = std::max(c.psi_over_sqrt_phi, c.indicator);
  return c;
}

PropertyReport level_set_property_check(double c_tilde, std::size_t n_samples, int n_max,
                                        std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  PropertyReport rep;
  rep.name = "level_set_bounds";
  double worst_sqrt = 0.0, worst_ind = 0.0;
  for (std::size_t s = 0; s < n_samples; ++s) {
    double z;
    const double u = unit(rng);
    if (u < 0.4) {
      z = -1.0 + 4.0 * unit(rng);
    } else if (u < 0.7) {
      z = std::pow(10.0, -10.0 + 16.0 * unit(rng));
    } else {
      // Just above a level, where the indicator bound is tightest.
      const int n = 1 + static_cast<int>(unit(rng) * n_max);
      z = TruncationLadder::level(std::min(n, n_max)) + std::pow(10.0, -12.0 + 12.0 * unit(rng));
    }
    ++rep.samples;
    bool bad = false;
    const double ps = psi_level(z);
    if (ps > 0.0) {
      const double r = ps / (c_tilde * std::sqrt(phi_level(z)));
      worst_sqrt = std::max(worst_sqrt, r);
      if (r > 1.0 + 1e-12) {
        bad = true;
        rep.worst = std::max(rep.worst, r - 1.0);
      }
    }
    for (int n = 1; n <= n_max; ++n) {
      if (!(psi_level(z - TruncationLadder::level(n)) > 0.0)) continue;
      const double rhs = c_tilde * std::ldexp(1.0, n) * psi_level(z - TruncationLadder::level(n - 1));
      const double r = 1.0 / rhs;
      worst_ind = std::max(worst_ind, r);
      if (r > 1.0 + 1e-12) {
        bad = true;
        rep.worst = std::max(rep.worst, r - 1.0);
      }
    }
    if (bad) ++rep.violations;
  }
  rep.pass = rep.violations == 0;
  rep.details = {{"c_tilde", c_tilde},
                 {"max_psi_ratio", worst_sqrt},
                 {"max_indicator_ratio", worst_ind},
                 {"n_max", n_max}};
  return rep;
}

U0BoundTerms u0_bound_terms(const SpaceTimeSlab& slab, double p, const Anchor& anchor) {
  if (!(p > 1.0)) throw std::invalid_argument("u0 bound: p must exceed 1");
  U0BoundTerms t;
  TruncationLadder ladder;
  ladder.n_max = 0;
  ladder.anchor = anchor;
  t.u0 = compute_Un(slab, ladder, 0);
  for (double v : cylinder_lp_norms(slab, p, anchor, 3.0, 3.0)) {
    t.lp_power_sum += std::pow(v, p);
    t.lp_root_sum += std::sqrt(v);
  }
  const double rhs = t.lp_power_sum + t.lp_root_sum;
  t.ratio = rhs > 0.0 ? t.u0 / rhs : 0.0;
  return t;
}

PropertyReport u0_bound_check(const std::vector<U0BoundTerms>& family, std::size_t reference,
                              double spread) {
  if (reference >= family.size()) throw std::invalid_argument("u0 bound: bad reference index");
  PropertyReport rep;
  rep.name = "u0_smallness";
  double c = 0.0;
  for (const auto& t : family) c = std::max(c, t.ratio);
  const double ref = family[reference].ratio;
  for (const auto& t : family) {
    ++rep.samples;
    if (t.lp_power_sum + t.lp_root_sum == 0.0 && t.u0 > 0.0) {
      ++rep.violations;
      rep.worst = HUGE_VAL;
    }
  }
  const bool stable = ref > 0.0 ? c <= spread * ref : c == 0.0;
  rep.pass = rep.violations == 0 && stable;
  if (!stable) rep.worst = std::max(rep.worst, c / (spread * ref) - 1.0);
  nlohmann::json ratios = nlohmann::json::array();
  for (const auto& t : family) ratios.push_back(t.ratio);
  rep.details = {{"constant", c}, {"reference_ratio", ref}, {"ratios", ratios}, {"spread", spread}};
  return rep;
}

LocalDissipationTerms local_dissipation_terms(const SpaceTimeSlab& slab, const Anchor& anchor,
                                              int n, double level, double d_lo) {
  if (n < 1) throw std::invalid_argument("local dissipation: n must be >= 1");
  if (!(level >= 0.0 && level <= 1.0)) {
    throw std::invalid_argument("local dissipation: level must lie in [0, 1]");
  }
  const double tn = TruncationLadder::radius(n);
  const double tp = TruncationLadder::radius(n - 1);
  const auto& g = slab.grid();
  const auto inner = ball_mask(g, anchor.x, tn);
  const auto outer = ball_mask(g, anchor.x, tp);

  const Window wn = window(slab, anchor.t - tn, anchor.t);
  double sup = 0.0;
  std::vector<double> grad;
  for (std::size_t idx : wn.index) {
    const auto s = level_sums(slab.snapshots[idx], inner, level);
    if (inside(slab.snapshots[idx].time, wn)) sup = std::max(sup, s.phi);
    grad.push_back(s.grad);
  }
  const Window wp = window(slab, anchor.t - tp, anchor.t);
  std::vector<double> ent;
  for (std::size_t idx : wp.index) ent.push_back(level_sums(slab.snapshots[idx], outer, level).ent);

  LocalDissipationTerms t;
  t.lhs = sup + d_lo * integrate_piecewise_linear(wn.times, grad, wn.t0, wn.t1);
  t.rhs_integral = integrate_piecewise_linear(wp.times, ent, wp.t0, wp.t1);
  t.implied_constant =
      t.rhs_integral > 0.0 ? t.lhs / (std::ldexp(1.0, 2 * n) * t.rhs_integral) : 0.0;
  return t;
}

}  // namespace rdlab
