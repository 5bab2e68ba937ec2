#include "rdlab/model.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <random>
#include <stdexcept>

namespace rdlab {

void ReactionModel::evaluate(std::span<const double> a, std::span<double> out) const {
  if (a.size() != static_cast<std::size_t>(species) || out.size() != a.size()) {
    throw std::invalid_argument("reaction model '" + family + "' expects " +
                                std::to_string(species) + " species, got " +
                                std::to_string(a.size()));
  }
  rate(a, out);
}

std::vector<double> ReactionModel::evaluate(std::span<const double> a) const {
  std::vector<double> out(a.size());
  evaluate(a, out);
  return out;
}

DiffusionSpec::DiffusionSpec(std::vector<double> coefficients)
    : coefficients_(std::move(coefficients)) {
  if (coefficients_.empty()) throw std::invalid_argument("diffusion: no coefficients");
  for (double d : coefficients_) {
    if (!(d > 0.0) || !std::isfinite(d)) {
      throw std::invalid_argument("diffusion: coefficients must be finite and positive");
    }
  }
  auto [lo, hi] = std::minmax_element(coefficients_.begin(), coefficients_.end());
  d_lo_ = *lo;
  d_hi_ = *hi;
}

namespace {

// exp(-1/t) underflows to exactly zero below this argument.
constexpr double kBumpCut = 1.0 / 746.0;

double bump(double t) { return t > kBumpCut ? std::exp(-1.0 / t) : 0.0; }

}  // namespace

double exchange_phi(double nu, double z) {
  if (z <= kBumpCut) return 0.0;
  const double s = 0.5 * nu;
  if (z >= 1.0) return std::pow(z, s);
  const double g0 = bump(z);
  const double g1 = bump(1.0 - z);
  return std::pow(z, s) * (g0 / (g0 + g1));
}

double exchange_phi_derivative(double nu, double z) {
  if (z <= kBumpCut) return 0.0;
  const double s = 0.5 * nu;
  if (z >= 1.0) return s * std::pow(z, s - 1.0);
  const double w = 1.0 - z;
  const double g0 = bump(z);
  const double g1 = bump(w);
  const double den = g0 + g1;
  const double b = g0 / den;
  const double dg0 = g0 / (z * z);
  const double dg1 = w > kBumpCut ? g1 / (w * w) : 0.0;
  const double db = (dg0 * g1 + g0 * dg1) / (den * den);
  return s * std::pow(z, s - 1.0) * b + std::pow(z, s) * db;
}

double exchange_phi_derivative_max(double nu) {
  constexpr int kScan = 200000;
  double best_z = 1.0;
  double best = exchange_phi_derivative(nu, 1.0);
  for (int k = 1; k < kScan; ++k) {
    const double z = static_cast<double>(k) / kScan;
    const double v = exchange_phi_derivative(nu, z);
    if (v > best) {
      best = v;
      best_z = z;
    }
  }
  double lo = std::max(best_z - 1.0 / kScan, 0.0);
  double hi = std::min(best_z + 1.0 / kScan, 1.0);
  const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  for (int it = 0; it < 100; ++it) {
    const double m1 = hi - inv_phi * (hi - lo);
    const double m2 = lo + inv_phi * (hi - lo);
    if (exchange_phi_derivative(nu, m1) < exchange_phi_derivative(nu, m2)) {
      lo = m1;
    } else {
      hi = m2;
    }
  }
  best = std::max(best, exchange_phi_derivative(nu, 0.5 * (lo + hi)));
  // z >= 1 branch is s z^(s-1), maximal at z = 1 for nu < 2.
  return std::max(best, 0.5 * nu);
}

double exchange_state_cap(double nu) {
  constexpr double kSampleCap = 1e3;
  constexpr double kSmallestEps = 0.125;
  return kSampleCap * std::pow(kSmallestEps, -2.0 / (nu - 1.0));
}

double exchange_lambda(double nu, double cap) {
  // |grad Q_i|^2 = phi'(z1)^2 (a1^2 + a3^2) + phi'(z2)^2 (a2^2 + a4^2)
  //            <= sup(phi')^2 |a|^2, and |a| <= 2 cap on [0, cap]^4.
  // Relative headroom covers the golden-section tolerance on sup(phi').
  constexpr double kHeadroom = 1.0 + 1e-6;
  return kHeadroom * exchange_phi_derivative_max(nu) * std::pow(2.0 * cap, 2.0 - nu);
}

ReactionModel four_species_exchange(double nu) {
  if (!(nu > 0.0 && nu < 2.0)) throw std::invalid_argument("exchange: nu must lie in (0, 2)");
  ReactionModel m;
  m.family = "four_species_exchange";
  m.species = 4;
  m.nu = nu;
  // nu <= 1 has no rescaling pull-back; the sampling box itself is the domain.
  m.lambda_domain = nu > 1.0 ? exchange_state_cap(nu) : 1e3;
  m.lambda = exchange_lambda(nu, m.lambda_domain);
  m.rate = [nu](std::span<const double> a, std::span<double> q) {
    const double f = exchange_phi(nu, a[0] * a[2]) - exchange_phi(nu, a[1] * a[3]);
    q[0] = -f;
    q[1] = f;
    q[2] = -f;
    q[3] = f;
  };
  m.jacobian = [nu](std::span<const double> a, std::span<double> jac) {
    const double d13 = exchange_phi_derivative(nu, a[0] * a[2]);
    const double d24 = exchange_phi_derivative(nu, a[1] * a[3]);
    const double df[4] = {d13 * a[2], -d24 * a[3], d13 * a[0], -d24 * a[1]};
    for (int i = 0; i < 4; ++i) {
      const double sign = i % 2 == 0 ? -1.0 : 1.0;
      for (int j = 0; j < 4; ++j) jac[i * 4 + j] = sign * df[j];
    }
  };
  return m;
}

ReactionModel zero_reaction(int species) {
  if (species < 1) throw std::invalid_argument("zero reaction: species must be >= 1");
  ReactionModel m;
  m.family = "zero";
  m.species = species;
  m.nu = 1.0;
  m.lambda = 0.0;
  m.lambda_domain = std::numeric_limits<double>::infinity();
  m.rate = [](std::span<const double>, std::span<double> q) {
    std::fill(q.begin(), q.end(), 0.0);
  };
  m.jacobian = [](std::span<const double>, std::span<double> jac) {
    std::fill(jac.begin(), jac.end(), 0.0);
  };
  return m;
}

double entropy_production(const ReactionModel& model, std::span<const double> a) {
  std::vector<double> q(a.size());
  model.evaluate(a, q);
  double d = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) d -= q[i] * std::log(std::max(a[i], kLogFloor));
  return d;
}

void ReactionModel::jacobian_at(std::span<const double> a, std::span<double> jac) const {
  const std::size_t p = static_cast<std::size_t>(species);
  if (a.size() != p || jac.size() != p * p) {
    throw std::invalid_argument("jacobian: span sizes do not match the species count");
  }
  if (jacobian) {
    jacobian(a, jac);
    return;
  }
  std::vector<double> x(a.begin(), a.end());
  std::vector<double> qp(p), qm(p);
  for (std::size_t j = 0; j < p; ++j) {
    const double h = 1e-6 * std::max(std::abs(a[j]), 1.0);
    x[j] = a[j] + h;
    evaluate(x, qp);
    x[j] = a[j] - h;
    evaluate(x, qm);
    x[j] = a[j];
    for (std::size_t i = 0; i < p; ++i) jac[i * p + j] = (qp[i] - qm[i]) / (2.0 * h);
  }
}

double rate_jacobian_norm(const ReactionModel& model, std::span<const double> a) {
  const std::size_t p = a.size();
  std::vector<double> jac(p * p);
  model.jacobian_at(a, jac);
  double worst = 0.0;
  for (std::size_t i = 0; i < p; ++i) {
    double row = 0.0;
    for (std::size_t j = 0; j < p; ++j) row += std::abs(jac[i * p + j]);
    worst = std::max(worst, row);
  }
  return worst;
}

bool HypothesisReport::pass() const {
  return std::all_of(checks.begin(), checks.end(), [](const auto& c) { return c.pass(); });
}

const HypothesisCheck& HypothesisReport::check(const std::string& name) const {
  for (const auto& c : checks) {
    if (c.name == name) return c;
  }
  throw std::out_of_range("no hypothesis check named " + name);
}

namespace {

struct CheckAccumulator {
  HypothesisCheck c;
  explicit CheckAccumulator(std::string name) { c.name = std::move(name); }
  void add(double violation) {
    ++c.samples;
    if (violation > kHypothesisTolerance) ++c.violations;
    c.worst = std::max(c.worst, violation);
  }
};

double inf_norm(std::span<const double> v) {
  double m = 0.0;
  for (double x : v) m = std::max(m, std::abs(x));
  return m;
}

double euclid(std::span<const double> v) {
  double s = 0.0;
  for (double x : v) s += x * x;
  return std::sqrt(s);
}

}  // namespace

HypothesisReport verify_hypotheses(const ReactionModel& model, std::size_t n_samples,
                                   std::uint64_t seed) {
  if (n_samples < 1) throw std::invalid_argument("verify_hypotheses: n_samples must be >= 1");
  const std::size_t p = static_cast<std::size_t>(model.species);
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> log_mag(std::log(1e-6), std::log(1e3));
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::uniform_int_distribution<std::size_t> pick(0, p - 1);

  CheckAccumulator positivity("positivity");
  CheckAccumulator growth("growth");
  CheckAccumulator mass("mass");
  CheckAccumulator entropy("entropy");
  double max_quotient = 0.0;

  std::vector<double> a(p), b(p), q(p), qp(p), qm(p);
  std::vector<std::vector<double>> jac(p, std::vector<double>(p));
  std::vector<double> flat(p * p);

  for (std::size_t s = 0; s < n_samples; ++s) {
    for (auto& x : a) x = std::exp(log_mag(rng));

    // Mass balance, including states on the boundary of the orthant.
    b = a;
    if (unit(rng) < 0.25) {
      for (auto& x : b) {
        if (unit(rng) < 0.5) x = 0.0;
      }
    }
    model.evaluate(b, q);
    {
      double sum = 0.0, abs_sum = 0.0;
      for (double x : q) {
        sum += x;
        abs_sum += std::abs(x);
      }
      const double v = abs_sum > 0.0 ? std::abs(sum) / abs_sum : (sum != 0.0 ? HUGE_VAL : 0.0);
      mass.add(v);
    }

    // Positivity: one component pushed to zero or below, the others nonnegative.
    b = a;
    const std::size_t i_neg = pick(rng);
    b[i_neg] = unit(rng) < 0.5 ? 0.0 : -std::exp(log_mag(rng));
    model.evaluate(b, q);
    {
      const double scale = inf_norm(q);
      const double v = q[i_neg] < 0.0 ? -q[i_neg] / scale : 0.0;
      positivity.add(v);
    }

    // Entropy dissipation on the open orthant.
    model.evaluate(a, q);
    {
      double sum = 0.0, scale = 0.0;
      for (std::size_t i = 0; i < p; ++i) {
        const double l = std::log(a[i]);
        sum += l * q[i];
        scale += std::abs(l * q[i]);
      }
      entropy.add(sum > 0.0 ? sum / scale : 0.0);
    }

    // Growth bound: closed-form Jacobian when available, else central
    // differences with steps that stay inside the open orthant.
    if (model.jacobian) {
      model.jacobian(a, flat);
      for (std::size_t i = 0; i < p; ++i) {
        for (std::size_t j = 0; j < p; ++j) jac[i][j] = flat[i * p + j];
      }
    } else {
      b = a;
      for (std::size_t j = 0; j < p; ++j) {
        const double h = 1e-5 * a[j];
        b[j] = a[j] + h;
        model.evaluate(b, qp);
        b[j] = a[j] - h;
        model.evaluate(b, qm);
        b[j] = a[j];
        for (std::size_t i = 0; i < p; ++i) jac[i][j] = (qp[i] - qm[i]) / (2.0 * h);
      }
    }
    {
      const double bound = model.lambda * std::pow(euclid(a), model.nu - 1.0);
      double worst = 0.0;
      for (std::size_t i = 0; i < p; ++i) {
        const double g = euclid(jac[i]);
        double ratio = 0.0;
        if (g > 0.0) ratio = bound > 0.0 ? g / bound : HUGE_VAL;
        max_quotient = std::max(max_quotient, ratio);
        worst = std::max(worst, ratio - 1.0);
      }
      growth.add(std::max(worst, 0.0));
    }
  }

  HypothesisReport r;
  r.checks = {positivity.c, growth.c, mass.c, entropy.c};
  r.lambda = model.lambda;
  r.lambda_domain = model.lambda_domain;
  r.tolerance = kHypothesisTolerance;
  r.max_growth_quotient = max_quotient;
  return r;
}

}  // namespace rdlab
