#include "carnot/heistower.hpp"

#include <algorithm>
#include <cmath>

namespace carnot {

namespace {

struct InterpParts {
  HeisPoint<double> w;        // left displacement
  double chord_len = 0.0;     // planar chord
  double residual = 0.0;      // vertical residue after the chord lift
  double side = 0.0;          // commutator square side
  double total = 0.0;
};

InterpParts interp_parts(const HeisPoint<double>& p, const HeisPoint<double>& q) {
  InterpParts ip;
  ip.w = left_diff(p, q);
  ip.chord_len = std::sqrt(ip.w.x.squaredNorm() + ip.w.y.squaredNorm());
  ip.residual = ip.w.z - 0.5 * ip.w.y.dot(ip.w.x);
  ip.side = std::sqrt(std::abs(ip.residual));
  ip.total = ip.chord_len + 4.0 * ip.side;
  return ip;
}

HeisPoint<double> horizontal_generator(Eigen::Index n, bool in_y, double amount) {
  HeisPoint<double> g = HeisPoint<double>::identity(n);
  (in_y ? g.y : g.x)[0] = amount;
  return g;
}

std::uint64_t splitmix(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

}  // namespace

double horizontal_interp_length(const HeisPoint<double>& p, const HeisPoint<double>& q) {
  return interp_parts(p, q).total;
}

HeisPoint<double> horizontal_interp(const HeisPoint<double>& p, const HeisPoint<double>& q,
                                    double s) {
  const auto ip = interp_parts(p, q);
  if (ip.total == 0.0) return p;
  const double arc = std::clamp(s, 0.0, 1.0) * ip.total;
  if (arc <= ip.chord_len && ip.chord_len > 0.0) {
    const double t = arc / ip.chord_len;
    HeisPoint<double> lift;
    lift.x = t * ip.w.x;
    lift.y = t * ip.w.y;
    lift.z = 0.5 * t * t * ip.w.y.dot(ip.w.x);
    return group_mul(p, lift);
  }
  HeisPoint<double> at = p;
  {
    HeisPoint<double> chord;
    chord.x = ip.w.x;
    chord.y = ip.w.y;
    chord.z = 0.5 * ip.w.y.dot(ip.w.x);
    at = group_mul(at, chord);
  }
  if (ip.side == 0.0) return at;
  // square orientation picks the holonomy sign: y-first closes +side^2
  const bool y_first = ip.residual >= 0.0;
  const bool dirs[4] = {y_first, !y_first, y_first, !y_first};
  const double signs[4] = {1.0, 1.0, -1.0, -1.0};
  double tau = (arc - ip.chord_len) / ip.side;
  for (int seg = 0; seg < 4 && tau > 0.0; ++seg) {
    const double f = std::min(tau, 1.0);
    at = group_mul(at, horizontal_generator(p.n(), dirs[seg], signs[seg] * f * ip.side));
    tau -= f;
  }
  return at;
}

HeisPoint<double> ConeMap::vertex_value(int v) const {
  return group_mul(translate, dilate(scale, raw[size_t(v)]));
}

HeisPoint<double> ConeMap::value(const GraphPoint& gp) const {
  if (gp.t == 0.0 || gp.a == gp.b) return vertex_value(gp.a);
  const auto h = horizontal_interp(raw[size_t(gp.a)], raw[size_t(gp.b)], gp.t);
  return group_mul(translate, dilate(scale, h));
}

ConeMap cone_extend(const std::vector<HeisPoint<double>>& rim_values,
                    std::shared_ptr<const ConeGraph> graph, std::uint64_t seed) {
  const int R = graph->ring;
  if (int(rim_values.size()) != R)
    throw std::invalid_argument("cone_extend: need one value per rim vertex");
  const double eps = graph->complex.eps.value();

  // Lipschitz constant of the rim data w.r.t. ring arclength
  double lambda = 0.0;
  for (int i = 0; i < R; ++i)
    for (int j = i + 1; j < R; ++j) {
      const double d = eps * std::min(j - i, R - (j - i));
      lambda = std::max(lambda, gauge_dist(rim_values[size_t(i)], rim_values[size_t(j)]) / d);
    }

  ConeMap cm;
  cm.graph = graph;
  cm.translate = rim_values[0];
  cm.scale = lambda > 0.0 ? lambda : 1.0;
  const Eigen::Index n = rim_values[0].n();
  const auto id = HeisPoint<double>::identity(n);

  std::vector<HeisPoint<double>> rim_raw(size_t(R), id);
  if (lambda > 0.0) {
    const auto tinv = group_inv(cm.translate);
    for (int p = 0; p < R; ++p)
      rim_raw[size_t(p)] = dilate(1.0 / lambda, group_mul(tinv, rim_values[size_t(p)]));
  }

  cm.raw.assign(graph->g.verts.size(), id);
  for (int p = 0; p < R; ++p)
    for (int j = 1; j <= graph->levels; ++j) {
      const double factor = eps * (j * eps);  // dilation at cone height t = j*eps
      cm.raw[size_t(graph->lateral_vertex(p, j))] = dilate(factor, rim_raw[size_t(p)]);
    }

  // sampled Lipschitz constants of the normalized extension
  double lip = 0.0;
  for (int v = 0; v < graph->g.vertex_count(); ++v)
    for (int u : graph->g.adj[size_t(v)])
      if (u > v)
        lip = std::max(lip, horizontal_interp_length(cm.raw[size_t(v)], cm.raw[size_t(u)]) / eps);
  const int V = graph->g.vertex_count();
  const int sources = std::min(V, 48);
  for (int s = 0; s < sources; ++s) {
    const int src = int(splitmix(seed * 1315423911ULL + std::uint64_t(s)) % std::uint64_t(V));
    const auto dist = dijkstra(graph->g, src);
    for (int v = 0; v < V; ++v)
      if (v != src && dist[size_t(v)] > 0)
        lip = std::max(lip, gauge_dist(cm.raw[size_t(src)], cm.raw[size_t(v)]) / dist[size_t(v)]);
  }
  cm.lip_raw = lip;

  double rl = 0.0;
  for (int i = 0; i < R; ++i)
    for (int j = i + 1; j < R; ++j) {
      const double d = eps * std::min(j - i, R - (j - i));
      rl = std::max(rl, gauge_dist(rim_raw[size_t(i)], rim_raw[size_t(j)]) / d);
    }
  cm.rim_lip_raw = rl;
  return cm;
}

double cone_vertex_constant(const ConeMap& f) {
  const double eps = f.graph->complex.eps.value();
  double c = 0.0;
  for (int v = 0; v < f.graph->g.vertex_count(); ++v)
    for (int u : f.graph->g.adj[size_t(v)])
      if (u > v) c = std::max(c, gauge_dist(f.raw[size_t(v)], f.raw[size_t(u)]) / eps);
  return c;
}

const ConeMap& HeisTower::copy(const std::vector<std::int64_t>& address) const {
  if (address.empty()) return sigma0;
  auto it = copies.find(address);
  if (it != copies.end()) return it->second;
  std::vector<std::int64_t> prefix(address.begin(), address.end() - 1);
  const ConeMap& parent = copy(prefix);
  const auto cell = address.back();
  const auto& corners = graph->cell_corners[size_t(cell)];
  const int R = graph->ring;
  const int per_edge = R / 4;
  std::vector<HeisPoint<double>> rim(static_cast<size_t>(R));
  for (int p = 0; p < R; ++p) {
    const int e = p / per_edge;
    const double frac = double(p % per_edge) / double(per_edge);
    rim[size_t(p)] = parent.value({corners[size_t(e)], corners[size_t((e + 1) % 4)], frac});
  }
  auto cm = cone_extend(rim, graph);
  return copies.emplace(address, std::move(cm)).first->second;
}

HeisValue HeisTower::evaluate(const Eigen::VectorXd& x, int d) const {
  const auto de = tower.descend(x, d);
  HeisValue v;
  if (!de.in_hole_at_end) {
    const auto gp = base.graph_value(de.local);
    v.value = copy(de.address).value(gp);
    v.level = int(de.address.size());
    v.exact = true;
    return v;
  }
  std::vector<std::int64_t> prefix(de.address.begin(), de.address.end() - 1);
  const int corner = graph->cell_corners[size_t(de.address.back())][0];
  v.value = copy(prefix).vertex_value(corner);
  v.level = d + 1;
  v.exact = false;
  const double lip = lip_alpha * std::pow(std::max(c, 1.0), d + 2);
  v.error_bound = lip * unit_diam * std::pow(tower.codomain_scale, d + 1);
  return v;
}

HeisTower build_heis_tower(ReciprocalEps eps_cone, int k, ReciprocalEps eps_dom,
                           int sweep_count, int depth,
                           const std::function<HeisPoint<double>(double)>& alpha) {
  HeisTower ht;
  ht.graph = std::make_shared<ConeGraph>(build_cone_graph(build_cone_complex(1, eps_cone)));
  std::int64_t max_holes = 1;
  for (int a = 0; a <= k; ++a) max_holes *= eps_dom.m / 2;
  const std::int64_t N = std::min(ht.graph->complex.cell_count(), max_holes);
  const auto domain = build_hole_domain(k, eps_dom, N);
  ht.base = assemble_base_map(domain, *ht.graph, sweep_count);
  ht.tower = make_tower(domain, eps_cone.value());
  ht.depth = depth;

  const int R = ht.graph->ring;
  std::vector<HeisPoint<double>> rim(static_cast<size_t>(R));
  for (int p = 0; p < R; ++p) rim[size_t(p)] = alpha(4.0 * double(p) / double(R));
  ht.sigma0 = cone_extend(rim, ht.graph);
  const bool constant = ht.sigma0.rim_lip_raw == 0.0;
  ht.lip_alpha = constant ? 0.0 : ht.sigma0.scale;
  ht.c = ht.sigma0.lip_raw;

  {
    const auto dist = dijkstra(ht.graph->g, ht.graph->corner_vertex);
    ht.unit_diam = *std::max_element(dist.begin(), dist.end());
  }

  const double eps = eps_cone.value();
  ht.lip_sigma.assign(size_t(depth + 1), 0.0);
  ht.lip_sigma[0] = ht.sigma0.scale * ht.sigma0.lip_raw * (constant ? 0.0 : 1.0);
  const int samples_per_level = 6;
  for (int l = 1; l <= depth; ++l)
    for (int t = 0; t < samples_per_level; ++t) {
      std::vector<std::int64_t> addr(static_cast<size_t>(l));
      for (int j = 0; j < l; ++j)
        addr[size_t(j)] = std::int64_t(
            splitmix(std::uint64_t(l) * 2654435761ULL + std::uint64_t(t) * 97531ULL +
                     std::uint64_t(j)) %
            std::uint64_t(domain.hole_count));
      const ConeMap& child = ht.copy(addr);
      if (!constant) {
        const double scale_l = std::pow(eps, l);
        ht.lip_sigma[size_t(l - 1)] =
            std::max(ht.lip_sigma[size_t(l - 1)], child.scale * child.rim_lip_raw / scale_l);
        ht.lip_sigma[size_t(l)] =
            std::max(ht.lip_sigma[size_t(l)], child.scale * child.lip_raw / scale_l);
      }
      ht.c = std::max(ht.c, child.lip_raw);
    }
  for (int l = 1; l <= depth; ++l)
    ht.lip_sigma[size_t(l)] = std::max(ht.lip_sigma[size_t(l)], ht.lip_sigma[size_t(l - 1)]);
  return ht;
}

}  // namespace carnot
