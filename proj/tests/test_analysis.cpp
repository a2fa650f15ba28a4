#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "carnot/analysis.hpp"

using namespace carnot;

namespace {

SampledMap linear_map(const Eigen::MatrixXd& A) {
  const int k = int(A.cols());
  return SampledMap::euclidean(k, Eigen::VectorXd::Zero(k), Eigen::VectorXd::Ones(k),
                               [A](const Eigen::VectorXd& x) { return Eigen::VectorXd(A * x); });
}

}  // namespace

TEST_CASE("metric derivative of a linear map is |Av| exactly") {
  Eigen::MatrixXd A(2, 2);
  A << 3, 1, 0, 2;
  auto f = linear_map(A);
  Eigen::VectorXd x(2), v(2);
  x << 0.4, 0.4;
  v << 1.0, 0.0;
  v.normalize();
  auto md = metric_derivative(f, x, v, StepSchedule::geometric(f.domain_diameter()));
  CHECK(md.status == DerivativeStatus::Converged);
  CHECK(md.value == doctest::Approx((A * v).norm()).epsilon(1e-8));
}

TEST_CASE("metric derivative of a smooth nonlinear map matches calculus") {
  auto f = SampledMap::euclidean(1, Eigen::VectorXd::Zero(1), Eigen::VectorXd::Ones(1),
                                 [](const Eigen::VectorXd& x) {
                                   Eigen::VectorXd y(1);
                                   y << x[0] * x[0];
                                   return y;
                                 });
  Eigen::VectorXd x(1), v(1);
  x << 0.5;
  v << 1.0;
  auto md = metric_derivative(f, x, v, StepSchedule::geometric(1.0));
  CHECK(md.status == DerivativeStatus::Converged);
  CHECK(md.value == doctest::Approx(1.0).epsilon(1e-6));  // |2x| at 0.5
}

TEST_CASE("metric derivative diverges on a square-root cusp") {
  auto f = SampledMap::euclidean(1, Eigen::VectorXd::Zero(1), Eigen::VectorXd::Ones(1),
                                 [](const Eigen::VectorXd& x) {
                                   Eigen::VectorXd y(1);
                                   y << std::sqrt(std::abs(x[0]));
                                   return y;
                                 });
  Eigen::VectorXd x(1), v(1);
  x << 0.0;
  v << 1.0;
  auto md = metric_derivative(f, x, v, StepSchedule::geometric(1.0));
  CHECK(md.status == DerivativeStatus::Divergent);
}

TEST_CASE("lipschitz estimate brackets a known affine constant") {
  Eigen::MatrixXd A(2, 2);
  A << 2, 0, 0, 1;
  auto f = linear_map(A);  // true Lipschitz constant 2 (largest singular value)
  auto est = lipschitz_estimate(f, 42, 20000);
  CHECK(est.value <= 2.0 + 1e-9);
  CHECK(est.value >= 1.9);
  CHECK(est.pairs == 20000);
}

TEST_CASE("degeneracy fraction separates rank-1 maps from immersions") {
  const auto dirs = dense_directions(2, 8, 3);
  CHECK(dirs.size() >= 8);
  for (const auto& d : dirs) CHECK(d.norm() == doctest::Approx(1.0));

  // rank-1: (x,y) -> (x+y, 2(x+y))
  auto rank1 = SampledMap::euclidean(2, Eigen::VectorXd::Zero(2), Eigen::VectorXd::Ones(2),
                                     [](const Eigen::VectorXd& p) {
                                       Eigen::VectorXd y(2);
                                       y << p[0] + p[1], 2.0 * (p[0] + p[1]);
                                       return y;
                                     });
  auto rep = degeneracy_fraction(rank1, 500, dirs, 1e-4, 0.05, 9, 1);
  CHECK(rep.fraction_degenerate == doctest::Approx(1.0));

  // full rank: identity
  Eigen::MatrixXd I2 = Eigen::MatrixXd::Identity(2, 2);
  auto ident = linear_map(I2);
  auto rep2 = degeneracy_fraction(ident, 500, dirs, 1e-4, 0.05, 9, 1);
  CHECK(rep2.fraction_degenerate == doctest::Approx(0.0));
}

TEST_CASE("degeneracy exclusion filter is counted and honored") {
  Eigen::MatrixXd I2 = Eigen::MatrixXd::Identity(2, 2);
  auto f = linear_map(I2);
  const auto dirs = dense_directions(2, 8, 3);
  auto rep = degeneracy_fraction(f, 400, dirs, 1e-4, 0.05, 9, 1,
                                 [](const Eigen::VectorXd& x) { return x[0] < 0.5; });
  CHECK(rep.excluded > 0);
  CHECK(rep.tested + rep.excluded == rep.sample_count);
  CHECK(rep.fraction_degenerate == doctest::Approx(0.0));
}

TEST_CASE("metric-target fallback uses directional quotients") {
  // pack (x,y) into a point of R^2 with the max metric; rank test falls back
  // to min directional quotient, which is positive for the identity
  SampledMap f;
  f.domain_dim = 2;
  f.lo = Eigen::VectorXd::Zero(2);
  f.hi = Eigen::VectorXd::Ones(2);
  f.eval = [](const Eigen::VectorXd& x) { return x; };
  f.target_dist = [](const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
    return (a - b).lpNorm<Eigen::Infinity>();
  };
  f.euclidean_target = false;
  const auto dirs = dense_directions(2, 8, 3);
  auto rep = degeneracy_fraction(f, 200, dirs, 1e-4, 0.05, 9);
  CHECK(rep.fraction_degenerate == doctest::Approx(0.0));
}
