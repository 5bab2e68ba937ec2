#include "rdlab/maxp.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>

namespace rdlab {

ReactionModel TwoSpeciesModel::as_reaction() const {
  ReactionModel m;
  m.family = family;
  m.species = 2;
  m.nu = nu;
  m.lambda = lambda;
  m.lambda_domain = HUGE_VAL;
  auto q = rate;
  m.rate = [q](std::span<const double> a, std::span<double> out) {
    const double v = q(a[0], a[1]);
    out[0] = v;
    out[1] = -v;
  };
  if (gradient) {
    auto g = gradient;
    m.jacobian = [g](std::span<const double> a, std::span<double> jac) {
      const auto d = g(a[0], a[1]);
      jac[0] = d[0];
      jac[1] = d[1];
      jac[2] = -d[0];
      jac[3] = -d[1];
    };
  }
  return m;
}

TwoSpeciesModel two_species_linear() {
  return {"two_species_linear", [](double a1, double a2) { return a2 - a1; }, 1.0, std::sqrt(2.0),
          [](double, double) { return std::array<double, 2>{-1.0, 1.0}; }};
}

TwoSpeciesModel two_species_wrong_sign() {
  return {"two_species_wrong_sign", [](double a1, double a2) { return a1 - a2; }, 1.0,
          std::sqrt(2.0), [](double, double) { return std::array<double, 2>{1.0, -1.0}; }};
}

PropertyReport sign_condition_check(const TwoSpeciesModel& model, std::size_t n_samples,
                                    std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> log_mag(std::log(1e-6), std::log(1e3));
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  PropertyReport rep;
  rep.name = "two_species_sign";
  double worst = -HUGE_VAL;
  for (std::size_t s = 0; s < n_samples; ++s) {
    double a1 = std::exp(log_mag(rng));
    double a2 = std::exp(log_mag(rng));
    const double u = unit(rng);
    if (u < 0.1) {
      a2 = a1;
    } else if (u < 0.15) {
      a1 = 0.0;
    } else if (u < 0.2) {
      a2 = 0.0;
    }
    const double v = model.rate(a1, a2) * (a1 - a2);
    worst = std::max(worst, v);
    ++rep.samples;
    if (v > 1e-12) {
      ++rep.violations;
      rep.worst = std::max(rep.worst, v);
    }
  }
  rep.pass = rep.violations == 0;
  rep.details = {{"max_product", worst}};
  return rep;
}

MaxReport maxprinciple_run(const ReactionModel& model, const DiffusionSpec& diffusion,
                           const SpeciesField& initial, const RunSettings& settings, double tol) {
  MaxReport rep;
  RunSettings s = settings;
  s.keep_snapshots = false;
  double initial_total = 0.0;
  auto sample = [&](const SpeciesField& f) {
    SupSample x;
    x.t = f.time;
    x.sup = f.maxima();
    const auto rho = f.total();
    x.sup_total = *std::max_element(rho.begin(), rho.end());
    rep.samples.push_back(std::move(x));
  };
  run(model, diffusion, initial, s, sample);
  const auto& first = rep.samples.front();
  rep.initial_sup = *std::max_element(first.sup.begin(), first.sup.end());
  initial_total = first.sup_total;
  for (const auto& x : rep.samples) {
    const double m = *std::max_element(x.sup.begin(), x.sup.end());
    rep.max_sup = std::max(rep.max_sup, m);
    if (rep.initial_sup > 0.0) {
      rep.max_relative_growth = std::max(rep.max_relative_growth, m / rep.initial_sup - 1.0);
    }
    if (initial_total > 0.0) {
      rep.max_total_growth = std::max(rep.max_total_growth, x.sup_total / initial_total - 1.0);
    }
  }
  rep.pass = rep.max_relative_growth <= tol;
  return rep;
}

}  // namespace rdlab
