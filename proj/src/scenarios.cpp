#include "hpic/scenarios.hpp"

#include <cmath>
#include <functional>
#include <stdexcept>

#include "hpic/errors.hpp"
#include "hpic/quadrature.hpp"
#include "hpic/rng.hpp"

namespace hpic {

namespace {

constexpr double kTwoPi = 6.283185307179586476925287;
constexpr double kInvSqrt2Pi = 0.3989422804014326779;

// x with density (1 + alpha cos(k x)) / L on [0, L]: Newton on the CDF,
// monotone since alpha < 1.
double perturbed_position(double u, double alpha, double k, double L) {
  double x = u * L;
  for (int it = 0; it < 32; ++it) {
    const double g = x + alpha / k * std::sin(k * x) - u * L;
    const double dg = 1.0 + alpha * std::cos(k * x);
    const double dx = g / dg;
    x -= dx;
    if (std::abs(dx) < 1e-14 * L) break;
  }
  if (x < 0.0) x = 0.0;
  if (x >= L) x = std::nextafter(L, 0.0);
  return x;
}

// Generic quantile: bisection bracket then Newton polish. cdf must be
// monotone on [lo, hi] with cdf(lo) = 0, cdf(hi) = 1.
double invert_cdf(const std::function<double(double)>& cdf,
                  const std::function<double(double)>& pdf, double lo, double hi,
                  double target) {
  double a = lo, b = hi;
  for (int it = 0; it < 32; ++it) {
    const double mid = 0.5 * (a + b);
    if (cdf(mid) < target) {
      a = mid;
    } else {
      b = mid;
    }
  }
  double x = 0.5 * (a + b);
  for (int it = 0; it < 8; ++it) {
    const double d = pdf(x);
    if (d <= 0.0) break;
    double nx = x - (cdf(x) - target) / d;
    if (nx < a || nx > b) break;
    x = nx;
  }
  return x;
}

struct StratifiedDraws {
  // Jittered stratification of both marginals. The velocity stratum follows
  // a golden-ratio Kronecker sequence so the (x, v) pairing is a
  // low-discrepancy lattice rather than a random matching; the jitter keeps
  // every draw unbiased inside its stratum.
  std::uint64_t np;
  explicit StratifiedDraws(std::uint64_t n) : np(n) {}
  double u_x(std::uint64_t s, Rng& rng) const {
    return (static_cast<double>(s) + rng.u01()) / static_cast<double>(np);
  }
  double u_v(std::uint64_t s, Rng& rng) const {
    // frac(s / golden ratio) in 64-bit fixed point, exact for any s
    const std::uint64_t k = s * 0x9e3779b97f4a7c15ULL;
    double u = static_cast<double>(k >> 11) * 0x1.0p-53 +
               rng.u01() / static_cast<double>(np);
    if (u >= 1.0) u -= 1.0;
    return u;
  }
};

void check_1d_spec(const ScenarioSpec& spec) {
  if (spec.np < 1) throw std::invalid_argument("scenario: np must be >= 1");
  if (spec.alpha < 0.0) throw std::invalid_argument("scenario: alpha must be >= 0");
  if (!(spec.k > 0.0)) throw std::invalid_argument("scenario: k must be > 0");
  if (!(spec.vmax > 0.0)) throw std::invalid_argument("scenario: vmax must be > 0");
}

}  // namespace

double scenario_total_charge(const ScenarioSpec& spec) {
  if (spec.kind != ScenarioKind::Diocotron) return spec.hi[0] - spec.lo[0];
  // 2D quadrature of the ring density (tensor: uniform in theta, Gauss in r).
  const int ntheta = 256;
  const GaussRule& gr = gauss_rule(64);
  double q = 0.0;
  for (int it = 0; it < ntheta; ++it) {
    const double theta = kTwoPi * (it + 0.5) / ntheta;
    const double wt = kTwoPi / ntheta;
    double radial = 0.0;
    for (std::size_t ir = 0; ir < gr.x.size(); ++ir) {
      const double r = spec.r_minus + gr.x[ir] * (spec.r_plus - spec.r_minus);
      const double d = std::exp(-4.0 * (r - 6.5) * (r - 6.5));
      radial += gr.w[ir] * (spec.r_plus - spec.r_minus) * d * r;
    }
    q += wt * (1.0 + spec.alpha * std::cos(spec.l * theta)) * radial;
  }
  return q;
}

double scenario_rho0(const ScenarioSpec& spec) {
  if (spec.kind == ScenarioKind::Diocotron) return 0.0;
  return scenario_total_charge(spec) / (spec.hi[0] - spec.lo[0]);
}

ParticleEnsemble sample_landau(const ScenarioSpec& spec) {
  check_1d_spec(spec);
  ParticleEnsemble e;
  e.dim = 1;
  e.resize(spec.np);
  const double L = spec.hi[0] - spec.lo[0];
  const double w = scenario_total_charge(spec) / static_cast<double>(spec.np);
  const bool strat = spec.sampling == SamplingMode::Stratified;
  const StratifiedDraws sd(spec.np);
#pragma omp parallel for schedule(static)
  for (std::int64_t s = 0; s < static_cast<std::int64_t>(spec.np); ++s) {
    Rng rng(spec.seed, static_cast<std::uint64_t>(s));
    const std::size_t i = static_cast<std::size_t>(s);
    const double ux = strat ? sd.u_x(i, rng) : rng.u01();
    e.x[0][i] = spec.lo[0] + perturbed_position(ux, spec.alpha, spec.k, L);
    if (strat) {
      e.v[0][i] = truncated_normal_quantile(sd.u_v(i, rng), -spec.vmax, spec.vmax);
    } else {
      double v;
      do {
        v = rng.normal();
      } while (std::abs(v) > spec.vmax);
      e.v[0][i] = v;
    }
    e.w[i] = w;
  }
  return e;
}

ParticleEnsemble sample_two_stream(const ScenarioSpec& spec) {
  check_1d_spec(spec);
  ParticleEnsemble e;
  e.dim = 1;
  e.resize(spec.np);
  const double L = spec.hi[0] - spec.lo[0];
  const double w = scenario_total_charge(spec) / static_cast<double>(spec.np);
  const bool strat = spec.sampling == SamplingMode::Stratified;
  const StratifiedDraws sd(spec.np);

  // CDF of v^2 exp(-v^2/2)/sqrt(2 pi): Phi(v) - v phi(v).
  auto G = [](double v) { return std_normal_cdf(v) - v * std_normal_pdf(v); };
  const double glo = G(-spec.vmax), ghi = G(spec.vmax);
  auto cdf = [&](double v) { return (G(v) - glo) / (ghi - glo); };
  auto pdf = [&](double v) { return v * v * std_normal_pdf(v) / (ghi - glo); };

#pragma omp parallel for schedule(static)
  for (std::int64_t s = 0; s < static_cast<std::int64_t>(spec.np); ++s) {
    Rng rng(spec.seed, static_cast<std::uint64_t>(s));
    const std::size_t i = static_cast<std::size_t>(s);
    const double ux = strat ? sd.u_x(i, rng) : rng.u01();
    e.x[0][i] = spec.lo[0] + perturbed_position(ux, spec.alpha, spec.k, L);
    if (strat) {
      e.v[0][i] = invert_cdf(cdf, pdf, -spec.vmax, spec.vmax, sd.u_v(i, rng));
    } else {
      // |v| is Maxwellian (3 normal components), sign symmetric.
      double r;
      do {
        double a, b, c;
        rng.normal2(a, b);
        c = rng.normal();
        r = std::sqrt(a * a + b * b + c * c);
      } while (r > spec.vmax);
      e.v[0][i] = rng.u01() < 0.5 ? -r : r;
    }
    e.w[i] = w;
  }
  return e;
}

ParticleEnsemble sample_bump_on_tail(const ScenarioSpec& spec) {
  check_1d_spec(spec);
  ParticleEnsemble e;
  e.dim = 1;
  e.resize(spec.np);
  const double L = spec.hi[0] - spec.lo[0];
  const double w = scenario_total_charge(spec) / static_cast<double>(spec.np);
  const bool strat = spec.sampling == SamplingMode::Stratified;
  const StratifiedDraws sd(spec.np);

  // d0 = (0.9 N(0,1) mass + 0.2 exp(-2(v-4.5)^2))/sqrt(2 pi): the second
  // Gaussian has sigma = 1/2 and mass 0.1, so the mixture weights are
  // (0.9, 0.1).
  auto G = [](double v) { return 0.9 * std_normal_cdf(v) + 0.1 * std_normal_cdf((v - 4.5) * 2.0); };
  const double glo = G(-spec.vmax), ghi = G(spec.vmax);
  auto cdf = [&](double v) { return (G(v) - glo) / (ghi - glo); };
  auto pdf = [&](double v) {
    return (0.9 * std_normal_pdf(v) + 0.2 * kInvSqrt2Pi * std::exp(-2.0 * (v - 4.5) * (v - 4.5))) /
           (ghi - glo);
  };

#pragma omp parallel for schedule(static)
  for (std::int64_t s = 0; s < static_cast<std::int64_t>(spec.np); ++s) {
    Rng rng(spec.seed, static_cast<std::uint64_t>(s));
    const std::size_t i = static_cast<std::size_t>(s);
    const double ux = strat ? sd.u_x(i, rng) : rng.u01();
    e.x[0][i] = spec.lo[0] + perturbed_position(ux, spec.alpha, spec.k, L);
    if (strat) {
      e.v[0][i] = invert_cdf(cdf, pdf, -spec.vmax, spec.vmax, sd.u_v(i, rng));
    } else {
      double v;
      do {
        v = rng.u01() < 0.9 ? rng.normal() : 4.5 + 0.5 * rng.normal();
      } while (std::abs(v) > spec.vmax);
      e.v[0][i] = v;
    }
    e.w[i] = w;
  }
  return e;
}

ParticleEnsemble sample_diocotron(const ScenarioSpec& spec) {
  if (spec.np < 1) throw std::invalid_argument("scenario: np must be >= 1");
  if (!(spec.r_minus > 0.0) || !(spec.r_plus > spec.r_minus)) {
    throw std::invalid_argument("scenario: need 0 < r_minus < r_plus");
  }
  if (spec.l < 1) throw std::invalid_argument("scenario: l must be >= 1");
  if (!(spec.eps > 0.0)) throw std::invalid_argument("scenario: eps must be > 0");
  if (spec.sampling == SamplingMode::Stratified) {
    throw ConfigError("stratified sampling is implemented for the 1d scenarios only");
  }
  ParticleEnsemble e;
  e.dim = 2;
  e.resize(spec.np);
  const double w = scenario_total_charge(spec) / static_cast<double>(spec.np);
  const double dmax = 1.0 + spec.alpha;
#pragma omp parallel for schedule(static)
  for (std::int64_t s = 0; s < static_cast<std::int64_t>(spec.np); ++s) {
    Rng rng(spec.seed, static_cast<std::uint64_t>(s));
    const std::size_t i = static_cast<std::size_t>(s);
    double px, py;
    for (;;) {
      px = spec.r_plus * (2.0 * rng.u01() - 1.0);
      py = spec.r_plus * (2.0 * rng.u01() - 1.0);
      const double r = std::hypot(px, py);
      if (r < spec.r_minus || r > spec.r_plus) continue;
      const double theta = std::atan2(py, px);
      const double d = (1.0 + spec.alpha * std::cos(spec.l * theta)) *
                       std::exp(-4.0 * (r - 6.5) * (r - 6.5));
      if (rng.u01() * dmax <= d) break;
    }
    e.x[0][i] = px;
    e.x[1][i] = py;
    rng.normal2(e.v[0][i], e.v[1][i]);
    e.w[i] = w;
  }
  return e;
}

ParticleEnsemble sample_scenario(const ScenarioSpec& spec) {
  switch (spec.kind) {
    case ScenarioKind::Landau:
      return sample_landau(spec);
    case ScenarioKind::TwoStream:
      return sample_two_stream(spec);
    case ScenarioKind::BumpOnTail:
      return sample_bump_on_tail(spec);
    case ScenarioKind::Diocotron:
      return sample_diocotron(spec);
  }
  throw std::logic_error("sample_scenario: unknown kind");
}

const char* scenario_name(ScenarioKind kind) {
  switch (kind) {
    case ScenarioKind::Landau:
      return "landau";
    case ScenarioKind::TwoStream:
      return "two_stream";
    case ScenarioKind::BumpOnTail:
      return "bump_on_tail";
    case ScenarioKind::Diocotron:
      return "diocotron";
  }
  return "unknown";
}

}  // namespace hpic
