#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <vector>

#include "ltm/statistics.hpp"

namespace ltm {

/// Binomial tail P(Bin(k, x) >= r) = sum_{u=r}^{k} C(k,u) x^u (1-x)^{k-u}.
/// Evaluated by upward term recurrence with compensated summation; the
/// starting term uses direct powers for k <= 64 and the log domain above
/// that, so k in the thousands stays accurate.  Throws std::domain_error
/// outside 0 <= r <= k, 0 <= x <= 1.
double varphi(std::uint32_t k, std::uint32_t r, double x);

/// d/dx of the tail: C(k,r) r x^(r-1) (1-x)^(k-r); zero for r = 0.
double varphi_derivative(std::uint32_t k, std::uint32_t r, double x);

/// Second derivative C(k,r) r x^(r-2) (1-x)^(k-r-1) (r-1 - x(k-1)); the sign
/// change sits at the inflection point (r-1)/(k-1).
double varphi_second(std::uint32_t k, std::uint32_t r, double x);

struct MapTerm {
  std::uint32_t k = 0;
  std::uint32_t r = 0;
  double weight = 0.0;
};

/// The recursion maps phi(x) = sum q_{k,r} varphi_{k,r}(x) and
/// psi(x) = sum p_{k,r} varphi_{k,r}(x).  Both are non-decreasing
/// self-maps of [0,1]; instances are immutable and safe to share.
class MeanFieldMaps {
 public:
  MeanFieldMaps(std::vector<MapTerm> phi_terms, std::vector<MapTerm> psi_terms);

  double phi(double x) const;
  double psi(double x) const;
  double phi_derivative(double x) const;

  const std::vector<MapTerm>& phi_terms() const { return phi_terms_; }
  const std::vector<MapTerm>& psi_terms() const { return psi_terms_; }

 private:
  std::vector<MapTerm> phi_terms_;
  std::vector<MapTerm> psi_terms_;
};

/// Maps weighted by the q (phi) and p (psi) marginals of the statistics.
MeanFieldMaps build_maps(const NetworkStatistics& stats);

/// Maps for threshold masses F(r/k) - F((r-1)/k) under the given degree
/// marginals (no size rounding involved).
MeanFieldMaps maps_from_threshold_cdf(const ThresholdCdf& cdf,
                                      const std::map<std::uint32_t, double>& p_k,
                                      const std::map<std::uint32_t, double>& q_k);

/// Scalar recursion x(t+1) = phi(x(t)), y(t+1) = psi(x(t)) from x(0) = xi,
/// y(0) = upsilon.
struct RecursionTrajectory {
  std::vector<double> x;
  std::vector<double> y;
  std::optional<std::uint32_t> converged_at;  // first t with |x(t+1)-x(t)| < tol
};

RecursionTrajectory iterate(const MeanFieldMaps& maps, double xi, double upsilon,
                            std::uint32_t horizon = 100000, double tol = 1e-12);

/// Recursion with time-indexed maps (the last one holds beyond the end).
RecursionTrajectory iterate_time_varying(std::span<const MeanFieldMaps> maps_per_t, double xi,
                                         double upsilon, std::uint32_t horizon);

enum class Stability { stable, unstable, marginal };

struct FixedPoint {
  double x = 0.0;
  double phi_prime = 0.0;
  Stability tag = Stability::stable;
};

/// All roots of phi(x) = x in [0,1] with stability tags, plus the seed ->
/// limit selection: a monotone continuous self-map drives the recursion to
/// the nearest fixed point in the direction of phi(xi) - xi.  Jumps of the
/// limit occur exactly at the interior unstable fixed points.
class LimitProfile {
 public:
  LimitProfile(MeanFieldMaps maps, std::vector<FixedPoint> fixed_points);

  const std::vector<FixedPoint>& fixed_points() const { return fixed_points_; }
  /// Interior unstable fixed points, i.e. the jump locations of x_star.
  std::vector<double> discontinuities() const;

  double x_star(double xi) const;
  double y_star(double xi) const;

 private:
  MeanFieldMaps maps_;
  std::vector<FixedPoint> fixed_points_;  // sorted by x
};

struct FixedPointOptions {
  std::uint32_t grid = 10000;
  std::uint32_t refine = 10;
  double bisect_tol = 1e-10;
  double marginal_band = 1e-6;  // |phi'-1| below this is tagged marginal
};

/// Sign-change scan on a dense grid, refined near changes, then bisection.
LimitProfile fixed_points(const MeanFieldMaps& maps, const FixedPointOptions& options = {});

/// phi'(0) = gamma = sum k q_{k,1}, phi'(1) = vartheta = sum k q_{k,k},
/// phi(0) and psi(0): the local indicators that classify the recursion near
/// the endpoints.
struct LocalIndicators {
  double gamma = 0.0;
  double vartheta = 0.0;
  double phi0 = 0.0;
  double psi0 = 0.0;
};

LocalIndicators local_indicators(const NetworkStatistics& stats);

/// Constants of the coupling/concentration bounds: gamma_t bounds the
/// tree-approximation error by gamma_t / n, beta the exponential tail rate.
struct ConcentrationBounds {
  double gamma_t = 0.0;      // d_max k_max^(2t+3) / d_mean
  double log_gamma_t = 0.0;  // natural log, finite even when gamma_t overflows
  double beta = 0.0;         // 1 / (32 d_mean k_max^(2t))
  double n_min = 0.0;        // gamma_t / epsilon
  double epsilon = 0.0;
  std::uint32_t t = 0;

  /// Ensemble fraction bound 2 exp(-epsilon^2 beta n).
  double tail(double n) const;
};

ConcentrationBounds concentration_constants(const NetworkStatistics& stats, std::uint32_t t,
                                            double epsilon);

/// Sup-norm distances between the maps built from a threshold CDF at a
/// single out-degree and the CDF itself, sampled away from the CDF's atoms;
/// the maps collapse onto the CDF as the degree grows.
struct GranovetterPoint {
  std::uint32_t k_min = 0;
  double sup_phi = 0.0;
  double sup_psi = 0.0;
};

std::vector<GranovetterPoint> granovetter_limit(const ThresholdCdf& cdf,
                                                std::span<const std::uint32_t> k_values,
                                                std::uint32_t grid_points = 1000,
                                                double atom_margin = 0.02);

}  // namespace ltm
