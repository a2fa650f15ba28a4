#include "carnot/complexes.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

namespace carnot {

namespace {

std::int64_t ipow(std::int64_t b, int e) {
  std::int64_t r = 1;
  for (int i = 0; i < e; ++i) {
    if (r > (std::int64_t(1) << 62) / b) throw std::overflow_error("ipow overflow");
    r *= b;
  }
  return r;
}

// lexicographic multi-index of cell i in a per-axis grid of size `per_axis`,
// dimension `dim`; axis 0 varies slowest
std::vector<std::int64_t> unrank(std::int64_t i, std::int64_t per_axis, int dim) {
  std::vector<std::int64_t> idx(dim);
  for (int a = dim - 1; a >= 0; --a) {
    idx[a] = i % per_axis;
    i /= per_axis;
  }
  return idx;
}

}  // namespace

ReciprocalEps choose_epsilon(int n, int k) {
  if (n < 1 || k < n + 1) throw std::invalid_argument("choose_epsilon: need k >= n+1, n >= 1");
  // (2 eps)^{-(k+1)} > eps^{-(n+1)}  <=>  m^{k-n} > 2^{k+1} for eps = 1/m
  for (std::int64_t m = 2;; ++m) {
    long double lhs = std::pow((long double)m, (long double)(k - n));
    long double rhs = std::pow((long double)2, (long double)(k + 1));
    if (lhs > rhs) return ReciprocalEps{m};
  }
}

// ---- GridSkeleton ----

GridSkeleton build_grid_skeleton(int n, ReciprocalEps eps) {
  if (eps.m < 1) throw std::invalid_argument("build_grid_skeleton: 1/eps must be a positive integer");
  GridSkeleton g;
  g.n = n;
  g.eps = eps;
  g.cell_count = ipow(eps.m, n + 1);
  return g;
}

std::vector<std::int64_t> GridSkeleton::cell_index(std::int64_t i) const {
  return unrank(i, eps.m, n + 1);
}

Eigen::VectorXd GridSkeleton::cell_corner(std::int64_t i) const {
  const auto idx = cell_index(i);
  Eigen::VectorXd c(n + 1);
  for (int a = 0; a <= n; ++a) c[a] = double(idx[a]) / double(eps.m);
  return c;
}

Eigen::VectorXd GridSkeleton::cell_center(std::int64_t i) const {
  return cell_corner(i).array() + 0.5 / double(eps.m);
}

std::int64_t GridSkeleton::vertex_count() const { return ipow(eps.m + 1, n + 1); }

std::int64_t GridSkeleton::edge_count() const {
  return (n + 1) * eps.m * ipow(eps.m + 1, n);
}

std::int64_t GridSkeleton::n_face_count() const {
  // faces normal to each axis: (m+1) positions along the axis, m^n in-face
  return (n + 1) * (eps.m + 1) * ipow(eps.m, n);
}

std::vector<std::int64_t> GridSkeleton::cells_of_face(int axis,
                                                      const std::vector<std::int64_t>& idx) const {
  std::vector<std::int64_t> cells;
  // idx[axis] in [0, m] is the slab position; other entries in [0, m-1]
  for (std::int64_t side = -1; side <= 0; ++side) {
    const std::int64_t slab = idx[axis] + side;
    if (slab < 0 || slab >= eps.m) continue;
    std::int64_t rank = 0;
    for (int a = 0; a <= n; ++a) rank = rank * eps.m + (a == axis ? slab : idx[a]);
    cells.push_back(rank);
  }
  return cells;
}

// ---- HoleDomain ----

HoleDomain build_hole_domain(int k, ReciprocalEps eps, std::int64_t N) {
  if (eps.m % 2 != 0)
    throw std::invalid_argument("build_hole_domain: 1/(2 eps) must be a positive integer");
  HoleDomain d;
  d.k = k;
  d.eps = eps;
  const std::int64_t max_holes = ipow(eps.m / 2, k + 1);
  if (N > max_holes) throw std::invalid_argument("build_hole_domain: N exceeds subcube count");
  d.hole_count = N;
  return d;
}

Eigen::VectorXd HoleDomain::hole_corner(std::int64_t i) const {
  const std::int64_t M = subcubes_per_axis();
  const auto idx = unrank(i, M, k + 1);
  Eigen::VectorXd c(k + 1);
  // hole of side eps centered in the subcube of side 2 eps
  for (int a = 0; a <= k; ++a)
    c[a] = double(idx[a]) * subcube_side() + 0.5 * hole_side();
  return c;
}

Eigen::VectorXd HoleDomain::hole_center(std::int64_t i) const {
  return hole_corner(i).array() + 0.5 * hole_side();
}

std::optional<std::int64_t> HoleDomain::membership(const Eigen::VectorXd& p) const {
  const std::int64_t M = subcubes_per_axis();
  std::int64_t rank = 0;
  for (int a = 0; a <= k; ++a) {
    auto ia = std::int64_t(std::floor(p[a] / subcube_side()));
    ia = std::max<std::int64_t>(0, std::min(M - 1, ia));
    rank = rank * M + ia;
  }
  if (rank >= hole_count) return std::nullopt;
  const Eigen::VectorXd lo = hole_corner(rank);
  for (int a = 0; a <= k; ++a)
    if (p[a] < lo[a] || p[a] >= lo[a] + hole_side()) return std::nullopt;
  return rank;
}

// ---- ConeComplex ----

ConeComplex build_cone_complex(int n, ReciprocalEps eps) {
  if (eps.m < 1) throw std::invalid_argument("build_cone_complex: invalid eps");
  ConeComplex c;
  c.n = n;
  c.eps = eps;
  return c;
}

std::int64_t ConeComplex::lateral_cell_count() const {
  return (2 * n + 2) * ipow(eps.m, n + 2);
}

std::int64_t ConeComplex::cap_cell_count() const { return ipow(eps.m, n + 1); }

std::int64_t ConeComplex::rim_cell_count() const { return (2 * n + 2) * ipow(eps.m, n); }

bool ConeComplex::is_rim_cell(std::int64_t i) const {
  if (i >= lateral_cell_count()) return false;
  // within a face: t-level major, then in-face lexicographic; top level is rim
  const std::int64_t per_face = ipow(eps.m, n + 2);
  const std::int64_t in_face = i % per_face;
  const std::int64_t levels = ipow(eps.m, 2);  // (1/eps)/eps t-levels
  const std::int64_t level = in_face / ipow(eps.m, n);
  return level == levels - 1;
}

// ---- SubstitutionTower ----

SubstitutionTower make_tower(HoleDomain base, double codomain_scale) {
  SubstitutionTower t;
  t.domain_scale = base.hole_side();
  t.codomain_scale = codomain_scale;
  t.base = std::move(base);
  t.depth = 0;
  return t;
}

SubstitutionTower refine_tower(const SubstitutionTower& t) {
  SubstitutionTower r = t;
  ++r.depth;
  return r;
}

std::int64_t SubstitutionTower::holes_at_depth(int i) const {
  return ipow(base.hole_count, i + 1);
}

double SubstitutionTower::hole_side_at_depth(int i) const {
  return std::pow(domain_scale, i + 1);
}

double SubstitutionTower::total_hole_volume_at_depth(int i) const {
  return double(holes_at_depth(i)) * std::pow(hole_side_at_depth(i), base.k + 1);
}

SubstitutionTower::HoleBox SubstitutionTower::hole_box(
    const std::vector<std::int64_t>& address) const {
  HoleBox box;
  box.corner = Eigen::VectorXd::Zero(base.k + 1);
  box.side = 1.0;
  for (std::int64_t a : address) {
    if (a < 0 || a >= base.hole_count) throw std::invalid_argument("hole_box: bad address digit");
    box.corner += box.side * base.hole_corner(a);
    box.side *= base.hole_side();
  }
  return box;
}

SubstitutionTower::Descent SubstitutionTower::descend(const Eigen::VectorXd& p,
                                                      int max_level) const {
  Descent d;
  Eigen::VectorXd local = p;
  for (int level = 0; level <= max_level; ++level) {
    const auto hole = base.membership(local);
    if (!hole) {
      d.local = local;
      return d;
    }
    d.address.push_back(*hole);
    local = (local - base.hole_corner(*hole)) / base.hole_side();
  }
  d.in_hole_at_end = true;
  d.local = local;
  return d;
}

std::string tower_to_text(const SubstitutionTower& t) {
  std::ostringstream os;
  os.precision(17);
  os << "tower v1\n";
  os << "k " << t.base.k << "\n";
  os << "eps_m " << t.base.eps.m << "\n";
  os << "holes " << t.base.hole_count << "\n";
  os << "depth " << t.depth << "\n";
  os << "codomain_scale " << t.codomain_scale << "\n";
  return os.str();
}

SubstitutionTower tower_from_text(const std::string& text) {
  std::istringstream is(text);
  std::string tag, ver;
  is >> tag >> ver;
  if (tag != "tower" || ver != "v1") throw std::runtime_error("tower_from_text: bad header");
  int k = 0, depth = 0;
  std::int64_t m = 0, holes = 0;
  double cs = 0;
  std::string key;
  while (is >> key) {
    if (key == "k") is >> k;
    else if (key == "eps_m") is >> m;
    else if (key == "holes") is >> holes;
    else if (key == "depth") is >> depth;
    else if (key == "codomain_scale") is >> cs;
    else throw std::runtime_error("tower_from_text: unknown key " + key);
  }
  auto t = make_tower(build_hole_domain(k, ReciprocalEps{m}, holes), cs);
  t.depth = depth;
  return t;
}

}  // namespace carnot
