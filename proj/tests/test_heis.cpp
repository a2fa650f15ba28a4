#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "carnot/heis.hpp"

#include <random>

using namespace carnot;

namespace {

HeisPoint<double> random_point(std::mt19937_64& rng, Eigen::Index n) {
  std::uniform_real_distribution<double> uni(-2.0, 2.0);
  HeisPoint<double> p;
  p.x.resize(n);
  p.y.resize(n);
  for (Eigen::Index i = 0; i < n; ++i) p.x[i] = uni(rng);
  for (Eigen::Index i = 0; i < n; ++i) p.y[i] = uni(rng);
  p.z = uni(rng);
  return p;
}

double dist_pts(const HeisPoint<double>& a, const HeisPoint<double>& b) {
  return (a.x - b.x).norm() + (a.y - b.y).norm() + std::abs(a.z - b.z);
}

}  // namespace

TEST_CASE("group law on fixed points") {
  // (1,2,3).(4,5,6): z = 3+6+<2,4> = 17
  HeisPoint<double> p(1.0, 2.0, 3.0), q(4.0, 5.0, 6.0);
  auto r = group_mul(p, q);
  CHECK(r.x[0] == doctest::Approx(5.0));
  CHECK(r.y[0] == doctest::Approx(7.0));
  CHECK(r.z == doctest::Approx(17.0));
  // inverse: (-1,-2,-3+2) = (-1,-2,-1)
  auto pi = group_inv(p);
  CHECK(pi.z == doctest::Approx(-1.0));
  auto e = group_mul(p, pi);
  CHECK(e.x.norm() == doctest::Approx(0.0));
  CHECK(e.z == doctest::Approx(0.0));
}

TEST_CASE("group axioms on random triples") {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 500; ++trial) {
    const Eigen::Index n = 1 + Eigen::Index(rng() % 3);
    auto p = random_point(rng, n), q = random_point(rng, n), r = random_point(rng, n);
    auto lhs = group_mul(group_mul(p, q), r);
    auto rhs = group_mul(p, group_mul(q, r));
    CHECK(dist_pts(lhs, rhs) < 1e-12);
    auto e = group_mul(group_inv(p), p);
    CHECK(dist_pts(e, HeisPoint<double>::identity(n)) < 1e-12);
  }
}

TEST_CASE("dilations are automorphisms and gauge is 1-homogeneous") {
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 200; ++trial) {
    auto p = random_point(rng, 2), q = random_point(rng, 2);
    const double r = 0.25 + double(rng() % 100) / 25.0;
    auto lhs = dilate(r, group_mul(p, q));
    auto rhs = group_mul(dilate(r, p), dilate(r, q));
    CHECK(dist_pts(lhs, rhs) < 1e-10);
    CHECK(koranyi_norm(dilate(r, p)) == doctest::Approx(r * koranyi_norm(p)).epsilon(1e-12));
    CHECK(path_upper_bound_norm(dilate(r, p)) ==
          doctest::Approx(r * path_upper_bound_norm(p)).epsilon(1e-12));
  }
}

TEST_CASE("gauge distance is left invariant") {
  std::mt19937_64 rng(7);
  for (int trial = 0; trial < 200; ++trial) {
    auto g = random_point(rng, 1), p = random_point(rng, 1), q = random_point(rng, 1);
    const double d0 = gauge_dist(p, q);
    const double d1 = gauge_dist(group_mul(g, p), group_mul(g, q));
    CHECK(d1 == doctest::Approx(d0).epsilon(1e-10));
  }
}

TEST_CASE("horizontal lift of the unit circle gains -pi in z") {
  // dz = y dx integrates to -(area) = -pi over one ccw turn
  const int M = 4096;
  std::vector<double> t;
  std::vector<Eigen::VectorXd> xy;
  for (int i = 0; i <= M; ++i) {
    const double th = 2.0 * M_PI * double(i) / double(M);
    t.push_back(th);
    Eigen::VectorXd v(2);
    v << std::cos(th), std::sin(th);
    xy.push_back(v);
  }
  auto c = horizontal_lift(t, xy, 0.0);
  CHECK(c.pts.back().z == doctest::Approx(-M_PI).epsilon(1e-6));
  for (std::size_t i = 0; i + 1 < c.size(); ++i)
    CHECK(horizontality_residual(c.pts[i], c.pts[i + 1]) < 1e-12);
}

TEST_CASE("cc_length of a horizontal segment brackets its planar length") {
  // along the x axis the gauge speed equals the planar speed exactly
  std::vector<double> t{0.0, 1.0};
  std::vector<Eigen::VectorXd> axis(2, Eigen::VectorXd::Zero(2));
  axis[1] << 3.0, 0.0;
  auto ca = horizontal_lift(t, axis, 0.0);
  CHECK(cc_length(ca) == doctest::Approx(3.0).epsilon(1e-9));
  // a tilted segment picks up the gauge's vertical weight: the refined
  // length is a constant multiple of the planar length, at most (17/16)^(1/4)
  std::vector<Eigen::VectorXd> xy(2, Eigen::VectorXd::Zero(2));
  xy[1] << 3.0, 4.0;
  auto c = horizontal_lift(t, xy, 0.0);
  const double len = cc_length(c);
  CHECK(len >= 5.0 - 1e-9);
  CHECK(len <= 5.0 * std::pow(17.0 / 16.0, 0.25) + 1e-9);
  CHECK(euclidean_planar_length(xy) == doctest::Approx(5.0));
}

TEST_CASE("vertical displacement has infinite-slope cc length signature") {
  // refined length of a purely vertical chord exceeds any multiple of the
  // straight gauge, witnessing non-horizontality
  HeisCurve<double> c;
  c.t = {0.0, 1.0};
  c.pts = {HeisPoint<double>::identity(1), HeisPoint<double>(0.0, 0.0, 1.0)};
  const double straight = gauge_dist(c.pts[0], c.pts[1]);
  const double refined = cc_length(c, GaugeMetric{}, 1e-10, 12);
  CHECK(refined > 3.0 * straight);
}

TEST_CASE("chord midpoint composes to the displacement") {
  std::mt19937_64 rng(13);
  for (int trial = 0; trial < 100; ++trial) {
    auto p = random_point(rng, 1), q = random_point(rng, 1);
    auto m = chord_midpoint(p, q);
    auto half = left_diff(p, m);
    auto whole = group_mul(half, half);
    CHECK(dist_pts(whole, left_diff(p, q)) < 1e-10);
  }
}

TEST_CASE("path upper bound dominates the koranyi gauge up to a factor") {
  std::mt19937_64 rng(17);
  for (int trial = 0; trial < 300; ++trial) {
    auto p = random_point(rng, 1);
    CHECK(path_upper_bound_norm(p) >= 0.9 * koranyi_norm(p));
  }
}
