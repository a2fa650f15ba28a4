#pragma once

// Heisenberg group H^n: group law, dilations, homogeneous gauge metrics,
// horizontal lifts of planar curves and curve length.

#include <Eigen/Dense>

#include <cmath>
#include <stdexcept>
#include <vector>

namespace carnot {

template <typename S = double>
struct HeisPoint {
  Eigen::VectorX<S> x;  // first horizontal block, length n
  Eigen::VectorX<S> y;  // second horizontal block, length n
  S z = S(0);           // vertical coordinate

  HeisPoint() = default;
  HeisPoint(Eigen::VectorX<S> x_, Eigen::VectorX<S> y_, S z_)
      : x(std::move(x_)), y(std::move(y_)), z(z_) {
    if (x.size() != y.size()) throw std::invalid_argument("HeisPoint: x/y size mismatch");
  }
  // n=1 convenience
  HeisPoint(S x1, S y1, S z1) : z(z1) {
    x.resize(1); y.resize(1);
    x[0] = x1; y[0] = y1;
  }

  Eigen::Index n() const { return x.size(); }

  static HeisPoint identity(Eigen::Index n) {
    HeisPoint p;
    p.x = Eigen::VectorX<S>::Zero(n);
    p.y = Eigen::VectorX<S>::Zero(n);
    p.z = S(0);
    return p;
  }
};

// (x,y,z) . (x',y',z') = (x+x', y+y', z+z'+<y,x'>)
template <typename S>
HeisPoint<S> group_mul(const HeisPoint<S>& p, const HeisPoint<S>& q) {
  if (p.n() != q.n()) throw std::invalid_argument("group_mul: dimension mismatch");
  HeisPoint<S> r;
  r.x = p.x + q.x;
  r.y = p.y + q.y;
  r.z = p.z + q.z + p.y.dot(q.x);
  return r;
}

// (x,y,z)^{-1} = (-x,-y,-z+<y,x>)
template <typename S>
HeisPoint<S> group_inv(const HeisPoint<S>& p) {
  HeisPoint<S> r;
  r.x = -p.x;
  r.y = -p.y;
  r.z = -p.z + p.y.dot(p.x);
  return r;
}

// s_r(x,y,z) = (rx, ry, r^2 z), r > 0
template <typename S>
HeisPoint<S> dilate(S r, const HeisPoint<S>& p) {
  if (!(r > S(0))) throw std::invalid_argument("dilate: r must be positive");
  HeisPoint<S> q;
  q.x = r * p.x;
  q.y = r * p.y;
  q.z = r * r * p.z;
  return q;
}

template <typename S>
HeisPoint<S> left_diff(const HeisPoint<S>& p, const HeisPoint<S>& q) {
  return group_mul(group_inv(p), q);
}

// Koranyi-type gauge N(x,y,z) = ((|x|^2+|y|^2)^2 + z^2)^{1/4}.
// Exactly 1-homogeneous under s_r and left-invariant as a distance.
template <typename S>
S koranyi_norm(const HeisPoint<S>& p) {
  const S h = p.x.squaredNorm() + p.y.squaredNorm();
  return std::pow(h * h + p.z * p.z, S(0.25));
}

// Length of an explicit horizontal path from e to p: straight chord lift in
// the horizontal plane followed by a commutator square closing the vertical
// residual. Certified upper bound on the CC distance, 1-homogeneous.
template <typename S>
S path_upper_bound_norm(const HeisPoint<S>& p) {
  const S planar = std::sqrt(p.x.squaredNorm() + p.y.squaredNorm());
  const S residual = p.z - S(0.5) * p.y.dot(p.x);  // z left over after the chord lift
  return planar + S(4) * std::sqrt(std::abs(residual));
}

enum class GaugeVariant { KoranyiGauge, PathUpperBound };

struct GaugeMetric {
  GaugeVariant variant = GaugeVariant::KoranyiGauge;
  // empirical biLipschitz bracket relative to the CC metric (reported, not assumed)
  double bilip_lower = 1.0;
  double bilip_upper = 1.0;
};

template <typename S>
S gauge_norm(const HeisPoint<S>& p, const GaugeMetric& m) {
  return m.variant == GaugeVariant::KoranyiGauge ? koranyi_norm(p) : path_upper_bound_norm(p);
}

template <typename S>
S gauge_dist(const HeisPoint<S>& p, const HeisPoint<S>& q, const GaugeMetric& m = {}) {
  if (p.n() != q.n()) throw std::invalid_argument("gauge_dist: dimension mismatch");
  return gauge_norm(left_diff(p, q), m);
}

template <typename S = double>
struct HeisCurve {
  std::vector<S> t;                 // strictly increasing parameters
  std::vector<HeisPoint<S>> pts;
  bool horizontal = false;

  std::size_t size() const { return pts.size(); }
};

// Discrete horizontality residual |dz - <y_mid, dx>| of one step.
template <typename S>
S horizontality_residual(const HeisPoint<S>& p, const HeisPoint<S>& q) {
  const Eigen::VectorX<S> ymid = S(0.5) * (p.y + q.y);
  return std::abs(q.z - p.z - ymid.dot(q.x - p.x));
}

// Lift a sampled planar curve c(t) = (x(t), y(t)) in R^{2n} starting at height z0.
// z increments by the midpoint rule <y_mid, dx>, so the lift is horizontal to
// quadrature accuracy.
template <typename S>
HeisCurve<S> horizontal_lift(const std::vector<S>& t,
                             const std::vector<Eigen::VectorX<S>>& xy, S z0) {
  if (t.size() != xy.size()) throw std::invalid_argument("horizontal_lift: size mismatch");
  if (t.size() < 2) throw std::invalid_argument("horizontal_lift: need at least 2 samples");
  const Eigen::Index n2 = xy.front().size();
  if (n2 % 2 != 0) throw std::invalid_argument("horizontal_lift: planar dimension must be even");
  const Eigen::Index n = n2 / 2;

  HeisCurve<S> c;
  c.horizontal = true;
  c.t = t;
  c.pts.reserve(t.size());
  S z = z0;
  for (std::size_t i = 0; i < t.size(); ++i) {
    if (i > 0 && !(t[i] > t[i - 1]))
      throw std::invalid_argument("horizontal_lift: parameters not strictly increasing");
    HeisPoint<S> p;
    p.x = xy[i].head(n);
    p.y = xy[i].tail(n);
    if (i > 0) {
      const Eigen::VectorX<S> ymid = S(0.5) * (xy[i - 1].tail(n) + xy[i].tail(n));
      z += ymid.dot(xy[i].head(n) - xy[i - 1].head(n));
    }
    p.z = z;
    c.pts.push_back(std::move(p));
  }
  return c;
}

// Canonical half-point of the left displacement w = p^{-1} q: the unique
// (a/2, b/2, c1) with two equal halves composing to w. For horizontal chords
// this is the chord-lift midpoint; for vertical displacements the refined
// gauge sum grows without bound, matching the infinite CC length.
template <typename S>
HeisPoint<S> chord_midpoint(const HeisPoint<S>& p, const HeisPoint<S>& q) {
  const HeisPoint<S> w = left_diff(p, q);
  HeisPoint<S> half;
  half.x = S(0.5) * w.x;
  half.y = S(0.5) * w.y;
  half.z = S(0.5) * (w.z - S(0.25) * w.y.dot(w.x));
  return group_mul(p, half);
}

namespace detail {
template <typename S>
S refined_segment_length(const HeisPoint<S>& p, const HeisPoint<S>& q, const GaugeMetric& m,
                         S rel_tol, int depth) {
  const S d = gauge_dist(p, q, m);
  if (depth <= 0 || d == S(0)) return d;
  const HeisPoint<S> mid = chord_midpoint(p, q);
  const S s = gauge_dist(p, mid, m) + gauge_dist(mid, q, m);
  if (s - d <= rel_tol * d) return s;
  return refined_segment_length(p, mid, m, rel_tol, depth - 1) +
         refined_segment_length(mid, q, m, rel_tol, depth - 1);
}
}  // namespace detail

// Refined sum of gauge distances of consecutive samples; monotone under
// refinement (triangle inequality of the gauge).
template <typename S>
S cc_length(const HeisCurve<S>& c, const GaugeMetric& m = {}, S rel_tol = S(1e-10),
            int max_depth = 24) {
  S total = S(0);
  for (std::size_t i = 0; i + 1 < c.size(); ++i)
    total += detail::refined_segment_length(c.pts[i], c.pts[i + 1], m, rel_tol, max_depth);
  return total;
}

template <typename S>
S euclidean_planar_length(const std::vector<Eigen::VectorX<S>>& xy) {
  S total = S(0);
  for (std::size_t i = 0; i + 1 < xy.size(); ++i) total += (xy[i + 1] - xy[i]).norm();
  return total;
}

}  // namespace carnot
