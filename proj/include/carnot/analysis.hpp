#pragma once

// Numerical metric analysis: metric derivatives, Lipschitz-constant
// estimation and derivative-degeneracy detection for sampled maps.

#include <Eigen/Dense>

#include <cstdint>
#include <functional>
#include <optional>
#include <random>
#include <vector>

namespace carnot {

// A map from a box in R^k into a metric space. Target points are packed into
// vectors; the target metric interprets them. For Euclidean targets the
// metric is the Euclidean distance and the SVD rank test applies.
struct SampledMap {
  int domain_dim = 0;
  Eigen::VectorXd lo, hi;  // domain box
  std::function<Eigen::VectorXd(const Eigen::VectorXd&)> eval;
  std::function<double(const Eigen::VectorXd&, const Eigen::VectorXd&)> target_dist;
  std::optional<double> nominal_lip;
  bool euclidean_target = false;

  double domain_diameter() const { return (hi - lo).norm(); }

  static SampledMap euclidean(int k, Eigen::VectorXd lo, Eigen::VectorXd hi,
                              std::function<Eigen::VectorXd(const Eigen::VectorXd&)> f) {
    SampledMap m;
    m.domain_dim = k;
    m.lo = std::move(lo);
    m.hi = std::move(hi);
    m.eval = std::move(f);
    m.target_dist = [](const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
      return (a - b).norm();
    };
    m.euclidean_target = true;
    return m;
  }
};

struct StepSchedule {
  std::vector<double> steps;  // strictly decreasing positive reals

  // geometric schedule, ratio 1/2, from hi to lo (fractions of the diameter)
  static StepSchedule geometric(double diam, double hi_frac = 1e-2, double lo_frac = 1e-5);
};

enum class DerivativeStatus { Converged, Divergent };

struct MetricDerivative {
  DerivativeStatus status = DerivativeStatus::Converged;
  double value = 0.0;
  std::vector<double> quotients;
};

// md f_x(v) = lim_{r->0+} d(f(x+rv), f(x))/r via the schedule, with
// Richardson extrapolation from the two smallest steps. Divergent when the
// quotients grow monotonically beyond the ceiling (absolute, or tenfold over
// the schedule).
MetricDerivative metric_derivative(const SampledMap& f, const Eigen::VectorXd& x,
                                   const Eigen::VectorXd& v, const StepSchedule& schedule);

struct LipschitzEstimate {
  double value = 0.0;
  Eigen::VectorXd arg_a, arg_b;  // argmax witness pair
  std::size_t pairs = 0;
};

// Max ratio d(f(a),f(b))/|a-b| over seeded sample pairs, including
// near-diagonal pairs down to 1e-6 * diam. A lower bound on the true constant.
LipschitzEstimate lipschitz_estimate(const SampledMap& f, std::uint64_t seed,
                                     std::size_t pair_count);

struct DegeneracyReport {
  std::size_t sample_count = 0;
  std::size_t direction_count = 0;
  std::vector<double> step_schedule;
  double fraction_degenerate = 0.0;
  double tolerance = 0.0;
  std::size_t excluded = 0;  // samples skipped by the domain filter
  std::size_t degenerate = 0;
  std::size_t tested = 0;
};

// Angularly delta-dense unit directions in R^k (deterministic).
std::vector<Eigen::VectorXd> dense_directions(int k, int count, std::uint64_t seed);

// Fraction of sample points where the map looks rank-deficient at scale
// `step`: for Euclidean targets the (rank_bound+1)-th singular value of the
// central-difference Jacobian is <= tol * (largest singular value); for metric
// targets the minimum directional quotient over the family is <= tol.
// `exclude` may mark points (e.g. within a step of a hole boundary) that are
// skipped and counted separately.
DegeneracyReport degeneracy_fraction(
    const SampledMap& f, std::size_t samples, const std::vector<Eigen::VectorXd>& directions,
    double step, double tol, std::uint64_t seed, int rank_bound = -1,
    const std::function<bool(const Eigen::VectorXd&)>& exclude = {});

}  // namespace carnot
