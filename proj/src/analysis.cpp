#include "carnot/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace carnot {

StepSchedule StepSchedule::geometric(double diam, double hi_frac, double lo_frac) {
  StepSchedule s;
  for (double h = hi_frac * diam; h >= lo_frac * diam * (1.0 - 1e-12); h *= 0.5)
    s.steps.push_back(h);
  return s;
}

MetricDerivative metric_derivative(const SampledMap& f, const Eigen::VectorXd& x,
                                   const Eigen::VectorXd& v, const StepSchedule& schedule) {
  if (schedule.steps.empty()) throw std::invalid_argument("metric_derivative: empty schedule");
  const double r0 = schedule.steps.front();
  for (int i = 0; i < f.domain_dim; ++i) {
    const double xi = x[i] + r0 * v[i];
    if (xi < f.lo[i] || xi > f.hi[i])
      throw std::invalid_argument("metric_derivative: x too close to boundary for largest step");
  }

  MetricDerivative out;
  const Eigen::VectorXd fx = f.eval(x);
  for (double r : schedule.steps) {
    const double q = f.target_dist(f.eval(x + r * v), fx) / r;
    out.quotients.push_back(q);
  }

  const double ceiling = 1e3 * f.nominal_lip.value_or(1.0);
  bool monotone_up = out.quotients.size() >= 2;
  for (std::size_t i = 1; i < out.quotients.size(); ++i)
    if (out.quotients[i] < out.quotients[i - 1]) { monotone_up = false; break; }
  const double first = out.quotients.front();
  const double last = out.quotients.back();
  if (monotone_up && (last > ceiling || (first > 0 && last / first > 10.0))) {
    out.status = DerivativeStatus::Divergent;
    out.value = last;
    return out;
  }

  // Richardson with ratio 1/2 and O(r) error model: L ~ 2 q(r/2) - q(r).
  if (out.quotients.size() >= 2) {
    const double qprev = out.quotients[out.quotients.size() - 2];
    out.value = 2.0 * last - qprev;
  } else {
    out.value = last;
  }
  return out;
}

LipschitzEstimate lipschitz_estimate(const SampledMap& f, std::uint64_t seed,
                                     std::size_t pair_count) {
  if (pair_count < 1) throw std::invalid_argument("lipschitz_estimate: pair count >= 1 required");
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u01(0.0, 1.0);
  const double diam = f.domain_diameter();
  const int k = f.domain_dim;

  auto sample_point = [&]() {
    Eigen::VectorXd p(k);
    for (int i = 0; i < k; ++i) p[i] = f.lo[i] + u01(rng) * (f.hi[i] - f.lo[i]);
    return p;
  };

  LipschitzEstimate best;
  bool any = false;
  for (std::size_t i = 0; i < pair_count; ++i) {
    Eigen::VectorXd a = sample_point();
    Eigen::VectorXd b;
    if (i % 2 == 0) {
      b = sample_point();
    } else {
      // near-diagonal pair, log-uniform separation down to 1e-6 * diam
      const double r = diam * std::pow(10.0, -6.0 * u01(rng));
      Eigen::VectorXd dir(k);
      for (int j = 0; j < k; ++j) dir[j] = u01(rng) - 0.5;
      if (dir.norm() == 0.0) dir.setOnes();
      dir.normalize();
      b = a + r * dir;
      for (int j = 0; j < k; ++j) b[j] = std::clamp(b[j], f.lo[j], f.hi[j]);
    }
    const double dn = (a - b).norm();
    if (dn == 0.0) continue;
    any = true;
    const double ratio = f.target_dist(f.eval(a), f.eval(b)) / dn;
    if (ratio > best.value) {
      best.value = ratio;
      best.arg_a = a;
      best.arg_b = b;
    }
    ++best.pairs;
  }
  if (!any) throw std::runtime_error("lipschitz_estimate: sampler produced coincident points only");
  return best;
}

std::vector<Eigen::VectorXd> dense_directions(int k, int count, std::uint64_t seed) {
  std::vector<Eigen::VectorXd> dirs;
  dirs.reserve(count);
  if (k == 2) {
    for (int i = 0; i < count; ++i) {
      const double th = 2.0 * M_PI * i / count;
      Eigen::VectorXd v(2);
      v << std::cos(th), std::sin(th);
      dirs.push_back(v);
    }
    return dirs;
  }
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g(0.0, 1.0);
  for (int i = 0; i < count; ++i) {
    Eigen::VectorXd v(k);
    for (int j = 0; j < k; ++j) v[j] = g(rng);
    if (v.norm() == 0.0) v.setOnes();
    v.normalize();
    dirs.push_back(v);
  }
  return dirs;
}

DegeneracyReport degeneracy_fraction(
    const SampledMap& f, std::size_t samples, const std::vector<Eigen::VectorXd>& directions,
    double step, double tol, std::uint64_t seed, int rank_bound,
    const std::function<bool(const Eigen::VectorXd&)>& exclude) {
  if (tol <= 0.0) throw std::invalid_argument("degeneracy_fraction: tol > 0 required");
  const int k = f.domain_dim;
  for (int i = 0; i < k; ++i)
    if (step > 0.5 * (f.hi[i] - f.lo[i]))
      throw std::invalid_argument("degeneracy_fraction: step larger than domain extent");

  DegeneracyReport rep;
  rep.sample_count = samples;
  rep.direction_count = directions.size();
  rep.step_schedule = {step};
  rep.tolerance = tol;

  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u01(0.0, 1.0);

  for (std::size_t s = 0; s < samples; ++s) {
    Eigen::VectorXd x(k);
    for (int i = 0; i < k; ++i)
      x[i] = f.lo[i] + step + u01(rng) * (f.hi[i] - f.lo[i] - 2.0 * step);
    if (exclude && exclude(x)) {
      ++rep.excluded;
      continue;
    }
    ++rep.tested;

    bool degenerate = false;
    if (f.euclidean_target && rank_bound >= 0) {
      // central-difference Jacobian, singular-value rank test
      const Eigen::VectorXd f0 = f.eval(x);
      Eigen::MatrixXd J(f0.size(), k);
      for (int i = 0; i < k; ++i) {
        Eigen::VectorXd xp = x, xm = x;
        xp[i] += step;
        xm[i] -= step;
        J.col(i) = (f.eval(xp) - f.eval(xm)) / (2.0 * step);
      }
      Eigen::JacobiSVD<Eigen::MatrixXd> svd(J);
      const auto& sv = svd.singularValues();
      const double s1 = sv[0];
      const double sr = (rank_bound < sv.size()) ? sv[rank_bound] : 0.0;
      degenerate = sr <= tol * std::max(s1, 1e-300);
    } else {
      double qmin = std::numeric_limits<double>::infinity();
      const Eigen::VectorXd fx = f.eval(x);
      for (const auto& v : directions) {
        const double q = f.target_dist(f.eval(x + step * v), fx) / step;
        qmin = std::min(qmin, q);
      }
      degenerate = qmin <= tol;
    }
    if (degenerate) ++rep.degenerate;
  }
  rep.fraction_degenerate = rep.tested ? double(rep.degenerate) / double(rep.tested) : 0.0;
  return rep;
}

}  // namespace carnot
