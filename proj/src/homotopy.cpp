#include "carnot/homotopy.hpp"

#include <cmath>
#include <random>

namespace carnot {

namespace {

double point_segment_dist(const Eigen::Vector2d& z, const Eigen::Vector2d& a,
                          const Eigen::Vector2d& b) {
  const Eigen::Vector2d ab = b - a;
  const double len2 = ab.squaredNorm();
  if (len2 == 0.0) return (z - a).norm();
  const double t = std::clamp((z - a).dot(ab) / len2, 0.0, 1.0);
  return (z - (a + t * ab)).norm();
}

double point_segment_dist3(const Eigen::Vector3d& z, const Eigen::Vector3d& a,
                           const Eigen::Vector3d& b) {
  const Eigen::Vector3d ab = b - a;
  const double len2 = ab.squaredNorm();
  if (len2 == 0.0) return (z - a).norm();
  const double t = std::clamp((z - a).dot(ab) / len2, 0.0, 1.0);
  return (z - (a + t * ab)).norm();
}

double point_triangle_dist(const Eigen::Vector3d& z, const Eigen::Vector3d& p0,
                           const Eigen::Vector3d& p1, const Eigen::Vector3d& p2) {
  const Eigen::Vector3d e1 = p1 - p0, e2 = p2 - p0;
  const Eigen::Vector3d n = e1.cross(e2);
  const double n2 = n.squaredNorm();
  if (n2 > 1e-300) {
    // barycentric coordinates of the in-plane projection
    const Eigen::Vector3d w = z - p0;
    const double d20 = w.dot(e1), d21 = w.dot(e2);
    const double a11 = e1.squaredNorm(), a12 = e1.dot(e2), a22 = e2.squaredNorm();
    const double det = a11 * a22 - a12 * a12;
    if (det > 1e-300) {
      const double u = (a22 * d20 - a12 * d21) / det;
      const double v = (a11 * d21 - a12 * d20) / det;
      if (u >= 0 && v >= 0 && u + v <= 1) return std::abs(w.dot(n)) / std::sqrt(n2);
    }
  }
  return std::min({point_segment_dist3(z, p0, p1), point_segment_dist3(z, p1, p2),
                   point_segment_dist3(z, p2, p0)});
}

}  // namespace

std::vector<double> angle_lift(const LoopMap& f, const Eigen::Vector2d& center) {
  std::vector<double> lift;
  lift.reserve(f.values.size() + 1);
  double acc = std::atan2(f.values[0][1] - center[1], f.values[0][0] - center[0]);
  lift.push_back(acc);
  const std::size_t N = f.values.size();
  for (std::size_t i = 0; i < N; ++i) {
    const Eigen::Vector2d a = f.values[i] - center;
    const Eigen::Vector2d b = f.values[(i + 1) % N] - center;
    const double dth = std::atan2(a[0] * b[1] - a[1] * b[0], a.dot(b));
    acc += dth;
    lift.push_back(acc);
  }
  return lift;
}

std::int64_t winding_number(const LoopMap& f, const Eigen::Vector2d& z,
                            const WindingConfig& cfg) {
  const std::size_t N = f.values.size();
  if (N < 2) throw HomotopyError("EMPTY_MAP", "winding_number: loop has < 2 vertices");
  for (std::size_t i = 0; i < N; ++i)
    if (point_segment_dist(z, f.values[i], f.values[(i + 1) % N]) <= cfg.margin)
      throw HomotopyError("IMAGE_TOO_CLOSE", "winding_number: z within margin of the image");
  const auto lift = angle_lift(f, z);
  return std::llround((lift.back() - lift.front()) / (2.0 * M_PI));
}

std::int64_t winding_number(const SphereMap& f, const Eigen::Vector3d& z,
                            const WindingConfig& cfg) {
  for (const auto& tri : f.tris)
    if (point_triangle_dist(z, f.values[tri[0]], f.values[tri[1]], f.values[tri[2]]) <= cfg.margin)
      throw HomotopyError("IMAGE_TOO_CLOSE", "winding_number: z within margin of the image");

  std::mt19937_64 rng(cfg.seed);
  std::normal_distribution<double> g(0.0, 1.0);
  for (int attempt = 0; attempt < cfg.max_redraws; ++attempt) {
    Eigen::Vector3d dir(g(rng), g(rng), g(rng));
    if (dir.norm() < 1e-12) continue;
    dir.normalize();
    std::int64_t wn = 0;
    bool degenerate = false;
    for (const auto& tri : f.tris) {
      const Eigen::Vector3d& p0 = f.values[tri[0]];
      const Eigen::Vector3d e1 = f.values[tri[1]] - p0;
      const Eigen::Vector3d e2 = f.values[tri[2]] - p0;
      const Eigen::Vector3d pv = dir.cross(e2);
      const double det = e1.dot(pv);
      const double scale = std::max(1e-30, e1.norm() * e2.norm());
      if (std::abs(det) < 1e-12 * scale) {
        // ray parallel to this triangle; only degenerate if it can hit it
        const Eigen::Vector3d tv = z - p0;
        if (std::abs(tv.dot(e1.cross(e2))) < 1e-10 * scale) { degenerate = true; break; }
        continue;
      }
      const Eigen::Vector3d tv = z - p0;
      const double u = tv.dot(pv) / det;
      const Eigen::Vector3d qv = tv.cross(e1);
      const double v = dir.dot(qv) / det;
      const double t = e2.dot(qv) / det;
      const double eps = 1e-9;
      if (u > eps && v > eps && u + v < 1.0 - eps && t > eps) {
        wn += det > 0 ? 1 : -1;
      } else if (u > -eps && v > -eps && u + v < 1.0 + eps && t > -eps) {
        degenerate = true;  // grazing hit, retry with a fresh direction
        break;
      }
    }
    if (!degenerate) return wn;
  }
  throw HomotopyError("DEGENERATE_RAY", "winding_number: no generic ray found");
}

std::int64_t winding_number(const CellularMap& f, const Eigen::VectorXd& z,
                            const WindingConfig& cfg) {
  if (std::holds_alternative<LoopMap>(f)) {
    if (z.size() != 2) throw HomotopyError("UNSUPPORTED_DIMENSION", "winding_number: need 2d z");
    return winding_number(std::get<LoopMap>(f), Eigen::Vector2d(z[0], z[1]), cfg);
  }
  if (z.size() != 3) throw HomotopyError("UNSUPPORTED_DIMENSION", "winding_number: need 3d z");
  return winding_number(std::get<SphereMap>(f), Eigen::Vector3d(z[0], z[1], z[2]), cfg);
}

namespace {

double dist_to_skeleton(const Eigen::VectorXd& p, std::int64_t m) {
  double best = std::numeric_limits<double>::infinity();
  for (Eigen::Index a = 0; a < p.size(); ++a) {
    const double g = std::round(p[a] * double(m)) / double(m);
    best = std::min(best, std::abs(p[a] - g));
  }
  return best;
}

void check_near_skeleton(const CellularMap& f, const GridSkeleton& grid) {
  const double margin = grid.eps.value() / 100.0;
  auto bad = [&](const Eigen::VectorXd& v) { return dist_to_skeleton(v, grid.eps.m) > margin; };
  if (std::holds_alternative<LoopMap>(f)) {
    for (const auto& v : std::get<LoopMap>(f).values)
      if (bad(Eigen::Vector2d(v)))
        throw HomotopyError("IMAGE_NOT_NEAR_SKELETON",
                            "decompose_in_basis: image not within margin of |J|");
  } else {
    for (const auto& v : std::get<SphereMap>(f).values)
      if (bad(Eigen::Vector3d(v)))
        throw HomotopyError("IMAGE_NOT_NEAR_SKELETON",
                            "decompose_in_basis: image not within margin of |J|");
  }
}

}  // namespace

DegreeVector decompose_in_basis(const CellularMap& f, const GridSkeleton& grid,
                                const WindingConfig& cfg) {
  check_near_skeleton(f, grid);
  DegreeVector w(grid.cell_count);
  for (std::int64_t i = 0; i < grid.cell_count; ++i)
    w[i] = winding_number(f, grid.cell_center(i), cfg);
  return w;
}

LoopMap suspend(const std::array<int, 2>& g, int segments_per_meridian) {
  // S^0 = {+1,-1}; suspension traverses the meridian through g(+1) going down
  // and the meridian through g(-1) going back up.
  LoopMap out;
  const int L = segments_per_meridian;
  for (int j = 0; j < L; ++j) {
    const double t = double(j) / L * M_PI;
    out.values.emplace_back(double(g[0]) * std::sin(t), std::cos(t));
  }
  for (int j = L; j > 0; --j) {
    const double t = double(j) / L * M_PI;
    out.values.emplace_back(double(g[1]) * std::sin(t), std::cos(t));
  }
  return out;
}

SphereMap suspend(const LoopMap& g, int levels) {
  const int M = int(g.values.size());
  SphereMap out;
  // poles
  const int north = 0;
  out.domain.emplace_back(0, 0, 1);
  out.values.emplace_back(0, 0, 1);
  // interior rings j = 1..levels-1
  for (int j = 1; j < levels; ++j) {
    const double t = double(j) / levels;  // colatitude fraction
    const double ct = std::cos(M_PI * t), st = std::sin(M_PI * t);
    for (int i = 0; i < M; ++i) {
      const double phi = 2.0 * M_PI * i / M;
      out.domain.emplace_back(st * std::cos(phi), st * std::sin(phi), ct);
      Eigen::Vector2d v = g.values[i];
      if (v.norm() > 0) v.normalize();  // beta0 maps into S^1
      out.values.emplace_back(st * v[0], st * v[1], ct);
    }
  }
  const int south = int(out.domain.size());
  out.domain.emplace_back(0, 0, -1);
  out.values.emplace_back(0, 0, -1);

  auto ring = [&](int j, int i) { return 1 + (j - 1) * M + (i % M); };
  for (int i = 0; i < M; ++i) out.tris.push_back({north, ring(1, i), ring(1, i + 1)});
  for (int j = 1; j + 1 < levels; ++j)
    for (int i = 0; i < M; ++i) {
      out.tris.push_back({ring(j, i), ring(j + 1, i), ring(j + 1, i + 1)});
      out.tris.push_back({ring(j, i), ring(j + 1, i + 1), ring(j, i + 1)});
    }
  for (int i = 0; i < M; ++i) out.tris.push_back({south, ring(levels - 1, i + 1), ring(levels - 1, i)});
  return out;
}

LoopMap project_to_square_boundary(const LoopMap& f, const Eigen::Vector2d& center, double r) {
  LoopMap out;
  out.values.reserve(f.values.size());
  for (const auto& v : f.values) {
    Eigen::Vector2d d = v - center;
    const double s = std::max(std::abs(d[0]), std::abs(d[1]));
    if (s == 0.0) throw HomotopyError("DEGENERATE_PROJECTION", "loop passes through the center");
    out.values.push_back(center + (r / s) * d);
  }
  return out;
}

namespace {

// Closed polyline realizing sum_j (loops around unit circles centered at
// (2j, 0)), each traversed `turns` times following the angle lift `lift`,
// joined by below-axis bridges that cancel in homology.
void append_bridge(std::vector<Eigen::Vector2d>& pts, const Eigen::Vector2d& a,
                   const Eigen::Vector2d& b, double h) {
  pts.emplace_back(a[0], -h);
  pts.emplace_back(b[0], -h);
  pts.push_back(b);
}

}  // namespace

SplittingCheck check_splitting(const LoopMap& beta, int m, const WindingConfig& cfg) {
  if (m < 1) throw HomotopyError("UNSUPPORTED_DIMENSION", "check_splitting: m >= 1 required");
  const Eigen::Vector2d origin(0, 0);
  const auto lift = angle_lift(beta, origin);
  const double h = 0.25;

  std::vector<Eigen::Vector2d> centers;
  for (int j = 0; j < m; ++j) centers.emplace_back(2.0 * j, 0.0);

  // LHS: (sum i_j) o beta. The angle lift of beta drives the wedge traversal:
  // a full turn of beta advances one full wedge circuit (all m circles).
  // Realize the circuit-with-bridges continuously: map angle a to the closed
  // circuit C: [0,1) -> R^2 at parameter a/2pi, where C traverses all circles
  // and bridges. Build C as a dense polyline and compose by arc fraction.
  std::vector<Eigen::Vector2d> circuit;
  const int seg = 128;
  for (int j = 0; j < m; ++j) {
    for (int i = 0; i < seg; ++i) {
      const double th = 2.0 * M_PI * i / seg;
      circuit.emplace_back(centers[j][0] + std::cos(th), std::sin(th));
    }
    const Eigen::Vector2d east(centers[j][0] + 1.0, 0.0);
    const Eigen::Vector2d next(centers[(j + 1) % m][0] + 1.0, 0.0);
    circuit.push_back(east);
    append_bridge(circuit, east, next, h);
  }
  const std::size_t CL = circuit.size();
  auto circuit_point = [&](double u) {  // u in R, period 1
    double s = std::fmod(u, 1.0);
    if (s < 0) s += 1.0;
    const double x = s * double(CL);
    const std::size_t i0 = std::size_t(x) % CL;
    const double fr = x - std::floor(x);
    return Eigen::Vector2d(circuit[i0] * (1.0 - fr) + circuit[(i0 + 1) % CL] * fr);
  };

  LoopMap lhs;
  const int sub = 64;
  const std::size_t N = beta.values.size();
  for (std::size_t i = 0; i < N; ++i) {
    const double a0 = lift[i], a1 = lift[i + 1];
    for (int s = 0; s < sub; ++s) {
      const double a = a0 + (a1 - a0) * double(s) / sub;
      lhs.values.push_back(circuit_point(a / (2.0 * M_PI)));
    }
  }

  // RHS: concatenation of i_j o beta over j, with cancelling bridges.
  LoopMap rhs;
  for (int j = 0; j < m; ++j) {
    for (std::size_t i = 0; i < N; ++i) {
      const double a0 = lift[i], a1 = lift[i + 1];
      for (int s = 0; s < sub; ++s) {
        const double a = a0 + (a1 - a0) * double(s) / sub;
        rhs.values.emplace_back(centers[j][0] + std::cos(a), std::sin(a));
      }
    }
    const Eigen::Vector2d start(centers[j][0] + std::cos(lift[0]), std::sin(lift[0]));
    const Eigen::Vector2d next(centers[(j + 1) % m][0] + std::cos(lift[0]), std::sin(lift[0]));
    rhs.values.push_back(start);
    append_bridge(rhs.values, start, next, h);
  }

  SplittingCheck out;
  WindingConfig wc = cfg;
  wc.margin = std::min(cfg.margin, 1e-6);
  for (int j = 0; j < m; ++j) {
    out.lhs.push_back(winding_number(lhs, centers[j], wc));
    out.rhs.push_back(winding_number(rhs, centers[j], wc));
  }
  out.degree_vectors_agree = out.lhs == out.rhs;
  return out;
}

DegreeVector obstruction_vector(const LoopMap& beta, const GridSkeleton& grid,
                                const WindingConfig& cfg) {
  // iota o beta: beta projected onto the outer boundary of I^2
  const Eigen::Vector2d mid(0.5, 0.5);
  const LoopMap outer = project_to_square_boundary(beta, mid, 0.5);

  // sum_i (iota_i o beta): beta projected onto each subcell boundary, joined
  // by L-shaped bridges along grid lines (cancel in homology).
  LoopMap cells;
  const double e = grid.eps.value();
  const Eigen::Vector2d base(0.0, 0.0);
  for (std::int64_t i = 0; i < grid.cell_count; ++i) {
    const Eigen::Vector2d c = grid.cell_center(i);
    const Eigen::Vector2d corner = grid.cell_corner(i);
    // bridge: base -> (corner.x, 0) -> corner along grid lines
    cells.values.push_back(base);
    cells.values.emplace_back(corner[0], 0.0);
    cells.values.push_back(corner);
    const LoopMap li = project_to_square_boundary(beta, c, e / 2.0);
    cells.values.push_back(corner);  // hop to the loop start via the corner
    for (const auto& v : li.values) cells.values.push_back(v);
    cells.values.push_back(li.values.front());
    cells.values.push_back(corner);
    cells.values.emplace_back(corner[0], 0.0);
    cells.values.push_back(base);
  }

  DegreeVector obstruction(grid.cell_count);
  WindingConfig wc = cfg;
  wc.margin = std::min(cfg.margin, e / 1000.0);
  for (std::int64_t i = 0; i < grid.cell_count; ++i) {
    const Eigen::Vector2d z = grid.cell_center(i);
    const std::int64_t a = winding_number(outer, z, wc);
    const std::int64_t b = winding_number(cells, z, wc);
    obstruction[i] = a - b;
  }
  return obstruction;
}

}  // namespace carnot
