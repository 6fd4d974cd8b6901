#include "ltm/meanfield.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "ltm/parallel.hpp"

namespace ltm {

namespace {

void check_domain(std::uint32_t k, std::uint32_t r, double x) {
  if (r > k)
    throw std::domain_error("varphi: r = " + std::to_string(r) + " exceeds k = " +
                            std::to_string(k));
  if (!(x >= 0.0 && x <= 1.0))
    throw std::domain_error("varphi: x = " + std::to_string(x) + " outside [0,1]");
}

long double log_choose(std::uint32_t k, std::uint32_t u) {
  return std::lgamma(static_cast<long double>(k) + 1.0L) -
         std::lgamma(static_cast<long double>(u) + 1.0L) -
         std::lgamma(static_cast<long double>(k - u) + 1.0L);
}

// Kahan accumulator.
struct Compensated {
  long double sum = 0.0L;
  long double carry = 0.0L;
  void add(long double value) {
    const long double y = value - carry;
    const long double t = sum + y;
    carry = (t - sum) - y;
    sum = t;
  }
};

double clamp_unit(long double v) {
  if (v <= 0.0L) return 0.0;
  if (v >= 1.0L) return 1.0;
  return static_cast<double>(v);
}

// Upper-tail sum from u = r upward; valid when the terms from r on are
// dominated by the start (r at or beyond the term mode x(k+1)).
long double upper_tail(std::uint32_t k, std::uint32_t r, long double x, long double start) {
  Compensated acc;
  long double term = start;
  const long double ratio_base = x / (1.0L - x);
  for (std::uint32_t u = r;; ++u) {
    acc.add(term);
    if (u == k) break;
    term *= static_cast<long double>(k - u) / static_cast<long double>(u + 1) * ratio_base;
    if (term < acc.sum * 1e-25L) break;
  }
  return acc.sum;
}

// Lower-tail sum over u = r-1 down to 0 (start at u = r-1).
long double lower_tail(std::uint32_t k, std::uint32_t r, long double x, long double start) {
  Compensated acc;
  long double term = start;
  const long double ratio_base = (1.0L - x) / x;
  for (std::uint32_t u = r - 1;; --u) {
    acc.add(term);
    if (u == 0) break;
    term *= static_cast<long double>(u) / static_cast<long double>(k - u + 1) * ratio_base;
    if (term < acc.sum * 1e-25L) break;
  }
  return acc.sum;
}

}  // namespace

double varphi(std::uint32_t k, std::uint32_t r, double x) {
  check_domain(k, r, x);
  if (r == 0) return 1.0;
  if (x <= 0.0) return 0.0;
  if (x >= 1.0) return 1.0;
  if (r == k) return std::pow(x, static_cast<double>(k));

  const long double lx = static_cast<long double>(x);
  if (k <= 64) {
    // Direct powers for the start term; exact iterative binomial.
    long double choose = 1.0L;
    for (std::uint32_t i = 1; i <= r; ++i)
      choose = choose * static_cast<long double>(k - r + i) / static_cast<long double>(i);
    const long double start = choose * std::pow(lx, r) * std::pow(1.0L - lx, k - r);
    return clamp_unit(upper_tail(k, r, lx, start));
  }

  const long double mode = lx * static_cast<long double>(k + 1);
  if (static_cast<long double>(r) >= mode) {
    const long double log_start =
        log_choose(k, r) + r * std::log(lx) + (k - r) * std::log1p(-lx);
    if (log_start < -11300.0L) return 0.0;
    return clamp_unit(upper_tail(k, r, lx, std::exp(log_start)));
  }
  const long double log_start =
      log_choose(k, r - 1) + (r - 1) * std::log(lx) + (k - r + 1) * std::log1p(-lx);
  if (log_start < -11300.0L) return 1.0;
  return clamp_unit(1.0L - lower_tail(k, r, lx, std::exp(log_start)));
}

double varphi_derivative(std::uint32_t k, std::uint32_t r, double x) {
  check_domain(k, r, x);
  if (r == 0) return 0.0;
  if (x <= 0.0) return r == 1 ? static_cast<double>(k) : 0.0;
  if (x >= 1.0) return r == k ? static_cast<double>(k) : 0.0;
  const long double lx = static_cast<long double>(x);
  const long double value = log_choose(k, r) + std::log(static_cast<long double>(r)) +
                            (r - 1) * std::log(lx) + (k - r) * std::log1p(-lx);
  if (value < -11300.0L) return 0.0;
  return static_cast<double>(std::exp(value));
}

double varphi_second(std::uint32_t k, std::uint32_t r, double x) {
  check_domain(k, r, x);
  if (r == 0 || k <= 1) return 0.0;

  // Degenerate exponents cancel against the linear factor: r = 1 and r = k
  // reduce to single-power forms.
  if (r == 1) {
    if (x >= 1.0) return k == 2 ? -2.0 : 0.0;
    const double kk = static_cast<double>(k);
    return -kk * (kk - 1.0) * std::pow(1.0 - x, static_cast<double>(k) - 2.0);
  }
  if (r == k) {
    if (x <= 0.0) return k == 2 ? 2.0 : 0.0;
    const double kk = static_cast<double>(k);
    return kk * (kk - 1.0) * std::pow(x, static_cast<double>(k) - 2.0);
  }

  if (x <= 0.0) return r == 2 ? static_cast<double>(k) * (k - 1.0) : 0.0;
  if (x >= 1.0) return r == k - 1 ? -static_cast<double>(k) * (k - 1.0) : 0.0;

  const long double lx = static_cast<long double>(x);
  const long double linear =
      static_cast<long double>(r) - 1.0L - lx * (static_cast<long double>(k) - 1.0L);
  if (linear == 0.0L) return 0.0;
  const long double log_mag = log_choose(k, r) + std::log(static_cast<long double>(r)) +
                              (static_cast<long double>(r) - 2.0L) * std::log(lx) +
                              (static_cast<long double>(k - r) - 1.0L) * std::log1p(-lx) +
                              std::log(std::fabs(linear));
  if (log_mag < -11300.0L) return 0.0;
  const long double magnitude = std::exp(log_mag);
  return static_cast<double>(linear > 0.0L ? magnitude : -magnitude);
}

MeanFieldMaps::MeanFieldMaps(std::vector<MapTerm> phi_terms, std::vector<MapTerm> psi_terms)
    : phi_terms_(std::move(phi_terms)), psi_terms_(std::move(psi_terms)) {
  auto validate = [](const std::vector<MapTerm>& terms, const char* name) {
    if (terms.empty())
      throw std::invalid_argument(std::string(name) + " map needs at least one term");
    double total = 0.0;
    for (const MapTerm& term : terms) {
      if (term.r > term.k) throw std::invalid_argument("map term has r > k");
      if (term.weight < 0.0) throw std::invalid_argument("negative map weight");
      total += term.weight;
    }
    if (std::abs(total - 1.0) > 1e-9)
      throw std::invalid_argument(std::string(name) + " map weights sum to " +
                                  std::to_string(total));
  };
  validate(phi_terms_, "phi");
  validate(psi_terms_, "psi");
}

namespace {

double evaluate_terms(const std::vector<MapTerm>& terms, double x) {
  double sum = 0.0;
  for (const MapTerm& term : terms)
    if (term.weight > 0.0) sum += term.weight * varphi(term.k, term.r, x);
  return std::clamp(sum, 0.0, 1.0);
}

}  // namespace

double MeanFieldMaps::phi(double x) const { return evaluate_terms(phi_terms_, x); }

double MeanFieldMaps::psi(double x) const { return evaluate_terms(psi_terms_, x); }

double MeanFieldMaps::phi_derivative(double x) const {
  double sum = 0.0;
  for (const MapTerm& term : phi_terms_)
    if (term.weight > 0.0) sum += term.weight * varphi_derivative(term.k, term.r, x);
  return sum;
}

MeanFieldMaps build_maps(const NetworkStatistics& stats) {
  std::vector<MapTerm> phi_terms, psi_terms;
  for (const auto& [key, w] : stats.q_kr)
    if (w > 0.0) phi_terms.push_back({key.k, key.r, w});
  for (const auto& [key, w] : stats.p_kr)
    if (w > 0.0) psi_terms.push_back({key.k, key.r, w});
  return MeanFieldMaps(std::move(phi_terms), std::move(psi_terms));
}

MeanFieldMaps maps_from_threshold_cdf(const ThresholdCdf& cdf,
                                      const std::map<std::uint32_t, double>& p_k,
                                      const std::map<std::uint32_t, double>& q_k) {
  cdf.validate();
  auto expand = [&cdf](const std::map<std::uint32_t, double>& marginal) {
    std::vector<MapTerm> terms;
    for (const auto& [k, pk] : marginal) {
      if (pk <= 0.0) continue;
      if (k == 0) {
        terms.push_back({0, 0, pk});
        continue;
      }
      for (std::uint32_t r = 0; r <= k; ++r) {
        const double mass = cdf.mass_at(r, k);
        if (mass > 0.0) terms.push_back({k, r, pk * mass});
      }
    }
    return terms;
  };
  return MeanFieldMaps(expand(q_k), expand(p_k));
}

RecursionTrajectory iterate(const MeanFieldMaps& maps, double xi, double upsilon,
                            std::uint32_t horizon, double tol) {
  if (!(xi >= 0.0 && xi <= 1.0) || !(upsilon >= 0.0 && upsilon <= 1.0))
    throw std::invalid_argument("recursion seeds must lie in [0,1]");
  RecursionTrajectory trajectory;
  trajectory.x.push_back(xi);
  trajectory.y.push_back(upsilon);
  for (std::uint32_t t = 0; t < horizon; ++t) {
    const double cur = trajectory.x.back();
    const double nxt = maps.phi(cur);
    trajectory.y.push_back(maps.psi(cur));
    trajectory.x.push_back(nxt);
    if (std::abs(nxt - cur) < tol) {
      trajectory.converged_at = t;
      break;
    }
  }
  return trajectory;
}

RecursionTrajectory iterate_time_varying(std::span<const MeanFieldMaps> maps_per_t, double xi,
                                         double upsilon, std::uint32_t horizon) {
  if (maps_per_t.empty()) throw std::invalid_argument("time-varying recursion needs maps");
  if (!(xi >= 0.0 && xi <= 1.0) || !(upsilon >= 0.0 && upsilon <= 1.0))
    throw std::invalid_argument("recursion seeds must lie in [0,1]");
  RecursionTrajectory trajectory;
  trajectory.x.push_back(xi);
  trajectory.y.push_back(upsilon);
  for (std::uint32_t t = 0; t < horizon; ++t) {
    const MeanFieldMaps& maps = maps_per_t[std::min<std::size_t>(t, maps_per_t.size() - 1)];
    const double cur = trajectory.x.back();
    trajectory.y.push_back(maps.psi(cur));
    trajectory.x.push_back(maps.phi(cur));
  }
  return trajectory;
}

LimitProfile::LimitProfile(MeanFieldMaps maps, std::vector<FixedPoint> fixed_points)
    : maps_(std::move(maps)), fixed_points_(std::move(fixed_points)) {}

std::vector<double> LimitProfile::discontinuities() const {
  std::vector<double> jumps;
  for (const FixedPoint& fp : fixed_points_)
    if (fp.tag == Stability::unstable && fp.x > 0.0 && fp.x < 1.0) jumps.push_back(fp.x);
  return jumps;
}

double LimitProfile::x_star(double xi) const {
  if (!(xi >= 0.0 && xi <= 1.0)) throw std::invalid_argument("seed outside [0,1]");
  const double g = maps_.phi(xi) - xi;
  if (g == 0.0) return xi;
  if (g < 0.0) {
    // Largest fixed point in [0, xi).
    double best = -1.0;
    for (const FixedPoint& fp : fixed_points_)
      if (fp.x < xi) best = std::max(best, fp.x);
    if (best < 0.0) throw std::logic_error("no fixed point below seed; root scan too coarse");
    return best;
  }
  // Smallest fixed point in (xi, 1].
  double best = 2.0;
  for (const FixedPoint& fp : fixed_points_)
    if (fp.x > xi) best = std::min(best, fp.x);
  if (best > 1.0 + 1e-12) throw std::logic_error("no fixed point above seed; root scan too coarse");
  return best;
}

double LimitProfile::y_star(double xi) const { return maps_.psi(x_star(xi)); }

namespace {

double bisect_root(const MeanFieldMaps& maps, double lo, double hi, double g_lo, double tol) {
  // g is continuous with a sign change on [lo, hi].
  while (hi - lo > tol) {
    const double mid = 0.5 * (lo + hi);
    const double g_mid = maps.phi(mid) - mid;
    if (g_mid == 0.0) return mid;
    if ((g_lo < 0.0) == (g_mid < 0.0)) {
      lo = mid;
      g_lo = g_mid;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

}  // namespace

LimitProfile fixed_points(const MeanFieldMaps& maps, const FixedPointOptions& options) {
  const std::uint32_t grid = std::max<std::uint32_t>(options.grid, 8);
  std::vector<double> g(grid + 1);
  parallel_for(grid + 1, [&](std::size_t i) {
    const double x = static_cast<double>(i) / static_cast<double>(grid);
    g[i] = maps.phi(x) - x;
  });

  std::vector<double> roots;
  if (maps.phi(0.0) == 0.0) roots.push_back(0.0);

  for (std::uint32_t i = 0; i < grid; ++i) {
    const double lo = static_cast<double>(i) / grid;
    const double hi = static_cast<double>(i + 1) / grid;
    if (g[i] == 0.0 && lo > 0.0) {
      roots.push_back(lo);
      continue;
    }
    const bool change = (g[i] < 0.0 && g[i + 1] > 0.0) || (g[i] > 0.0 && g[i + 1] < 0.0) ||
                        (g[i + 1] == 0.0 && i + 1 < grid && g[i] * g[i + 1] <= 0.0);
    if (!change) continue;
    // Refine so that several roots inside one coarse cell are separated.
    double sub_lo = lo;
    double g_sub_lo = g[i];
    for (std::uint32_t j = 1; j <= options.refine; ++j) {
      const double sub_hi = lo + (hi - lo) * static_cast<double>(j) / options.refine;
      const double g_sub_hi = j == options.refine ? g[i + 1] : maps.phi(sub_hi) - sub_hi;
      if ((g_sub_lo < 0.0) != (g_sub_hi < 0.0))
        roots.push_back(bisect_root(maps, sub_lo, sub_hi, g_sub_lo, options.bisect_tol));
      sub_lo = sub_hi;
      g_sub_lo = g_sub_hi;
    }
  }

  roots.push_back(1.0);
  std::sort(roots.begin(), roots.end());
  std::vector<double> separated;
  for (double root : roots)
    if (separated.empty() || root - separated.back() > 4.0 * options.bisect_tol)
      separated.push_back(root);

  std::vector<FixedPoint> fps;
  fps.reserve(separated.size());
  for (double root : separated) {
    FixedPoint fp;
    fp.x = root;
    fp.phi_prime = maps.phi_derivative(root);
    if (std::abs(fp.phi_prime - 1.0) < options.marginal_band)
      fp.tag = Stability::marginal;
    else
      fp.tag = fp.phi_prime < 1.0 ? Stability::stable : Stability::unstable;
    fps.push_back(fp);
  }
  return LimitProfile(maps, std::move(fps));
}

LocalIndicators local_indicators(const NetworkStatistics& stats) {
  LocalIndicators ind;
  for (const auto& [key, q] : stats.q_kr) {
    if (key.r == 0) ind.phi0 += q;
    if (key.r == 1) ind.gamma += static_cast<double>(key.k) * q;
    if (key.r == key.k && key.k >= 1) ind.vartheta += static_cast<double>(key.k) * q;
  }
  for (const auto& [key, p] : stats.p_kr)
    if (key.r == 0) ind.psi0 += p;
  return ind;
}

double ConcentrationBounds::tail(double n) const {
  return 2.0 * std::exp(-epsilon * epsilon * beta * n);
}

ConcentrationBounds concentration_constants(const NetworkStatistics& stats, std::uint32_t t,
                                            double epsilon) {
  if (epsilon <= 0.0) throw std::invalid_argument("epsilon must be positive");
  if (stats.mean_degree <= 0.0 || stats.k_max == 0)
    throw std::invalid_argument("concentration constants need a network with links");
  ConcentrationBounds bounds;
  bounds.epsilon = epsilon;
  bounds.t = t;
  const double log_kmax = std::log(static_cast<double>(stats.k_max));
  bounds.log_gamma_t = std::log(static_cast<double>(stats.d_max)) +
                       (2.0 * t + 3.0) * log_kmax - std::log(stats.mean_degree);
  bounds.gamma_t = std::exp(bounds.log_gamma_t);  // +inf when it overflows
  bounds.beta = std::exp(-std::log(32.0 * stats.mean_degree) - 2.0 * t * log_kmax);
  bounds.n_min = std::exp(bounds.log_gamma_t - std::log(epsilon));
  return bounds;
}

std::vector<GranovetterPoint> granovetter_limit(const ThresholdCdf& cdf,
                                                std::span<const std::uint32_t> k_values,
                                                std::uint32_t grid_points, double atom_margin) {
  cdf.validate();
  std::vector<GranovetterPoint> rows;
  rows.reserve(k_values.size());
  for (std::uint32_t k : k_values) {
    if (k < 2) throw std::invalid_argument("granovetter limit needs minimum out-degree >= 2");
    std::map<std::uint32_t, double> marginal{{k, 1.0}};
    const MeanFieldMaps maps = maps_from_threshold_cdf(cdf, marginal, marginal);
    GranovetterPoint row;
    row.k_min = k;
    for (std::uint32_t i = 0; i <= grid_points; ++i) {
      const double x = static_cast<double>(i) / grid_points;
      bool near_atom = false;
      for (const auto& atom : cdf.atoms) {
        const double theta = static_cast<double>(atom.num) / static_cast<double>(atom.den);
        if (std::abs(x - theta) < atom_margin) near_atom = true;
      }
      if (near_atom) continue;
      const double f = cdf.value(x);
      row.sup_phi = std::max(row.sup_phi, std::abs(maps.phi(x) - f));
      row.sup_psi = std::max(row.sup_psi, std::abs(maps.psi(x) - f));
    }
    rows.push_back(row);
  }
  return rows;
}

}  // namespace ltm
