#include "carnot/selfsim.hpp"

#include "carnot/homotopy.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <mutex>
#include <unordered_map>

namespace carnot {

namespace {

// sup-norm distance from p to the box [lo, lo+side]^dim
double dist_inf_box(const Eigen::VectorXd& p, const Eigen::VectorXd& lo, double side) {
  double d = 0.0;
  for (Eigen::Index a = 0; a < p.size(); ++a)
    d = std::max({d, lo[a] - p[a], p[a] - (lo[a] + side)});
  return std::max(d, 0.0);
}

// index of the hole whose blend region could contain p, or -1
std::int64_t nearby_hole(const HoleDomain& dom, const Eigen::VectorXd& p) {
  const std::int64_t M = dom.subcubes_per_axis();
  std::int64_t rank = 0;
  for (int a = 0; a <= dom.k; ++a) {
    auto ia = std::int64_t(std::floor(p[a] / dom.subcube_side()));
    ia = std::max<std::int64_t>(0, std::min(M - 1, ia));
    rank = rank * M + ia;
  }
  return rank < dom.hole_count ? rank : -1;
}

// ccw boundary sweep of I^2 with multiplicity d, as a closed polyline
LoopMap standard_sweep_loop(std::int64_t m, int d) {
  LoopMap beta;
  const int per_turn = int(4 * m) * 4;
  const int total = std::max(d, 1) * per_turn;
  beta.values.reserve(size_t(total));
  for (int i = 0; i < total; ++i) {
    const double s = d == 0 ? 0.0 : std::fmod(4.0 * d * double(i) / double(total), 4.0);
    Eigen::Vector2d p;
    if (s < 1.0) p = {s, 0.0};
    else if (s < 2.0) p = {1.0, s - 1.0};
    else if (s < 3.0) p = {3.0 - s, 1.0};
    else p = {0.0, 4.0 - s};
    beta.values.push_back(p);
  }
  return beta;
}

struct TargetView {
  std::shared_ptr<const EmbeddedGraph> g;
  const std::vector<int>* outer_loop;
  const std::vector<std::array<int, 4>>* cell_corners;
  int corner_vertex;
  double cell_side;
  ReciprocalEps eps;
};

BaseMap assemble(const HoleDomain& domain, const TargetView& tv, int sweep_count) {
  if (sweep_count < 0) throw SelfSimError("UNSUPPORTED", "negative sweep count");
  if (domain.hole_count > std::int64_t(tv.cell_corners->size()))
    throw SelfSimError("UNSUPPORTED", "more holes than target cells");

  // gluing is only valid when the boundary class splits over the cells at the
  // homology level; check the winding identity for the requested sweep
  const auto grid = build_grid_skeleton(1, tv.eps);
  const auto obstruction = obstruction_vector(standard_sweep_loop(tv.eps.m, sweep_count), grid);
  for (auto w : obstruction)
    if (w != 0)
      throw SelfSimError("NOT_NULL_HOMOTOPIC_AT_HOMOLOGY_LEVEL",
                         "boundary sweep does not split over the cells");

  BaseMap b;
  b.domain = domain;
  b.target = tv.g;
  b.cell_side = tv.cell_side;
  b.bump_radius = domain.hole_side() / 4.0;
  b.sweep_count = sweep_count;

  std::vector<int> vs = *tv.outer_loop;
  const auto tour = double_tour(*tv.g, tv.corner_vertex);
  vs.insert(vs.end(), tour.begin() + 1, tour.end());
  std::vector<size_t> loop_start(size_t(domain.hole_count));
  int at = tv.corner_vertex;
  for (std::int64_t i = 0; i < domain.hole_count; ++i) {
    const auto& c = (*tv.cell_corners)[size_t(i)];
    const auto path = bfs_path(*tv.g, at, c[0]);
    vs.insert(vs.end(), path.begin() + 1, path.end());
    loop_start[size_t(i)] = vs.size() - 1;
    vs.insert(vs.end(), {c[1], c[2], c[3], c[0]});
    at = c[0];
  }
  b.walk = Walk::from_vertices(*tv.g, std::move(vs));
  b.cell_loop_start.resize(size_t(domain.hole_count));
  for (std::int64_t i = 0; i < domain.hole_count; ++i)
    b.cell_loop_start[size_t(i)] = b.walk.cumlen[loop_start[size_t(i)]];

  const double lip_out = 4.0 * sweep_count;
  const double lip_cell = 4.0 * sweep_count * tv.cell_side / domain.hole_side();
  b.lip_bound = std::max(lip_out, lip_cell) + b.walk.length() / b.bump_radius;
  return b;
}

}  // namespace

double BaseMap::sweep(double s) const {
  if (sweep_count == 0) return 0.0;
  double u = std::fmod(sweep_count * std::clamp(s, 0.0, 1.0), 2.0);
  return u <= 1.0 ? u : 2.0 - u;
}

double BaseMap::field(const Eigen::VectorXd& x) const {
  const double w = w_out(x);
  const std::int64_t i = nearby_hole(domain, x);
  if (i < 0) return w;
  const Eigen::VectorXd lo = domain.hole_corner(i);
  const double dd = dist_inf_box(x, lo, domain.hole_side());
  if (dd >= bump_radius) return w;
  const double phi = 1.0 - dd / bump_radius;
  const double u1 = std::clamp((x[0] - lo[0]) / domain.hole_side(), 0.0, 1.0);
  const double g = cell_loop_start[size_t(i)] + 4.0 * cell_side * sweep(u1);
  return w + phi * (g - w);
}

GraphPoint BaseMap::graph_value(const Eigen::VectorXd& x) const {
  return walk.graph_point_at(field(x));
}

Eigen::VectorXd BaseMap::value(const Eigen::VectorXd& x) const {
  return walk.point_at(field(x));
}

BaseMap assemble_base_map(const HoleDomain& domain, const GridGraph& target, int sweep_count) {
  auto g = std::make_shared<EmbeddedGraph>(target.g);
  TargetView tv{g, &target.outer_loop, &target.cell_corners, target.corner_vertex,
                target.skeleton.eps.value(), target.skeleton.eps};
  return assemble(domain, tv, sweep_count);
}

BaseMap assemble_base_map(const HoleDomain& domain, const ConeGraph& target, int sweep_count) {
  auto g = std::make_shared<EmbeddedGraph>(target.g);
  TargetView tv{g, &target.rim_loop, &target.cell_corners, target.corner_vertex,
                target.complex.eps.value(), target.complex.eps};
  return assemble(domain, tv, sweep_count);
}

struct SelfSimilarMap::EvalCache {
  std::mutex mu;
  std::unordered_map<std::string, Value> map;
  std::deque<std::string> order;
  std::size_t capacity = 4096;
};

void SelfSimilarMap::enable_cache(std::size_t capacity) {
  cache = std::make_shared<EvalCache>();
  cache->capacity = capacity;
}

SelfSimilarMap::Value SelfSimilarMap::evaluate(const Eigen::VectorXd& x, int depth) const {
  if (x.size() != base.domain.k + 1) throw SelfSimError("UNSUPPORTED", "bad point dimension");
  if (depth < 0) throw SelfSimError("UNSUPPORTED", "negative depth");
  std::string key;
  if (cache) {
    key.assign(reinterpret_cast<const char*>(x.data()), size_t(x.size()) * sizeof(double));
    key.append(reinterpret_cast<const char*>(&depth), sizeof depth);
    std::lock_guard<std::mutex> lock(cache->mu);
    auto it = cache->map.find(key);
    if (it != cache->map.end()) return it->second;
  }
  const auto de = tower.descend(x, depth);
  Value v;
  const double side = codomain.eps.value();
  if (!de.in_hole_at_end) {
    v.value = base.value(de.local);
    v.level = int(de.address.size());
    v.exact = true;
  } else {
    v.value = Eigen::VectorXd::Constant(2, 0.5);
    v.level = depth + 1;
    v.exact = false;
    v.error_bound = base.lip_bound * std::pow(tower.domain_scale, depth + 1) *
                    std::sqrt(double(base.domain.k + 1));
  }
  for (auto it = de.address.rbegin(); it != de.address.rend(); ++it)
    v.value = codomain.cell_corner(*it) + side * v.value;
  if (cache) {
    std::lock_guard<std::mutex> lock(cache->mu);
    if (cache->map.size() >= cache->capacity && !cache->order.empty()) {
      cache->map.erase(cache->order.front());
      cache->order.pop_front();
    }
    if (cache->map.emplace(key, v).second) cache->order.push_back(key);
  }
  return v;
}

double SelfSimilarMap::matched_step(int depth) const {
  return std::pow(tower.domain_scale, depth + 1) / (100.0 * std::max(1.0, base.lip_bound));
}

bool SelfSimilarMap::near_feature(const Eigen::VectorXd& x, int depth, double step) const {
  const auto de = tower.descend(x, depth);
  const int level = int(de.address.size());
  const Eigen::VectorXd& u = de.local;
  if (de.in_hole_at_end) {
    // anchored: locally constant except near the hole's own faces
    const double ls = 2.0 * step * std::pow(tower.domain_scale, -(depth + 1));
    for (Eigen::Index a = 0; a < u.size(); ++a)
      if (u[a] < ls || u[a] > 1.0 - ls) return true;
    return false;
  }
  const double ls = 2.0 * step * std::pow(tower.domain_scale, -level);
  for (Eigen::Index a = 0; a < u.size(); ++a)
    if (u[a] < ls || u[a] > 1.0 - ls) return true;
  const std::int64_t i = nearby_hole(base.domain, u);
  if (i >= 0) {
    const double dd = dist_inf_box(u, base.domain.hole_corner(i), base.domain.hole_side());
    if (dd < ls || std::abs(dd - base.bump_radius) < ls) return true;
  }
  if (base.sweep_count >= 1) {
    const double t = u[0] * base.sweep_count;
    if (std::abs(t - std::round(t)) / base.sweep_count < ls) return true;
  }
  // probes must not straddle a walk vertex
  const double w = base.field(u);
  const auto& cl = base.walk.cumlen;
  auto it = std::lower_bound(cl.begin(), cl.end(), w);
  const double up = it == cl.end() ? cl.back() : *it;
  const double dn = it == cl.begin() ? cl.front() : *(it - 1);
  const double wd = std::min(std::abs(up - w), std::abs(w - dn));
  return wd < base.lip_bound * ls;
}

namespace {

double tri(int d, double s) {
  if (d == 0) return 0.0;
  const double u = std::fmod(d * std::clamp(s, 0.0, 1.0), 2.0);
  return u <= 1.0 ? u : 2.0 - u;
}

Eigen::Vector2d square_boundary_point(double s) {
  s = std::fmod(s, 4.0);
  if (s < 0) s += 4.0;
  if (s < 1.0) return {s, 0.0};
  if (s < 2.0) return {1.0, s - 1.0};
  if (s < 3.0) return {3.0 - s, 1.0};
  return {0.0, 4.0 - s};
}

}  // namespace

LoopMap default_sweep(int d, int samples) {
  LoopMap beta;
  beta.values.reserve(size_t(samples));
  for (int i = 0; i < samples; ++i) {
    const double x1 = tri(1, double(i) / samples);
    beta.values.push_back(square_boundary_point(4.0 * tri(d, x1)));
  }
  return beta;
}

int recognize_sweep(const LoopMap& beta, double tol) {
  if (beta.values.empty()) throw SelfSimError("UNSUPPORTED", "empty beta");
  const int M = int(beta.values.size());
  for (int d = 0; d <= 16; ++d) {
    double worst = 0.0;
    for (int i = 0; i < M; ++i) {
      const double x1 = tri(1, double(i) / M);
      worst = std::max(
          worst, (beta.values[size_t(i)] - square_boundary_point(4.0 * tri(d, x1))).norm());
      if (worst > tol) break;
    }
    if (worst <= tol) return d;
  }
  throw SelfSimError("UNSUPPORTED", "beta is not a canonical boundary sweep profile");
}

BaseMap assemble_base_map(const CellularMap& beta, const HoleDomain& domain,
                          const GridGraph& target) {
  const auto* loop = std::get_if<LoopMap>(&beta);
  if (!loop)
    throw SelfSimError("UNSUPPORTED", "only sweep-profile loop betas are synthesized");
  return assemble_base_map(domain, target, recognize_sweep(*loop));
}

SelfSimilarMap build_kaufman_map(int k, ReciprocalEps eps, std::int64_t holes, int sweep_count) {
  auto domain = build_hole_domain(k, eps, holes);
  auto skel = build_grid_skeleton(1, eps);
  if (holes > skel.cell_count)
    throw SelfSimError("UNSUPPORTED", "hole count exceeds codomain cell count");
  const auto gg = build_grid_graph(skel);
  SelfSimilarMap r;
  r.base = assemble_base_map(domain, gg, sweep_count);
  r.tower = make_tower(domain, eps.value());
  r.codomain = skel;
  return r;
}

}  // namespace carnot
