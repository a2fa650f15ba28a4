#include "carnot/treefactor.hpp"

#include "carnot/heis.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <numeric>
#include <queue>
#include <random>
#include <thread>

namespace carnot {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double heis_packed_dist(const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
  return gauge_dist(HeisPoint<double>(a[0], a[1], a[2]), HeisPoint<double>(b[0], b[1], b[2]));
}

struct Dsu {
  std::vector<int> p;
  explicit Dsu(int n) : p(size_t(n)) { std::iota(p.begin(), p.end(), 0); }
  int find(int x) {
    while (p[size_t(x)] != x) x = p[size_t(x)] = p[size_t(p[size_t(x)])];
    return x;
  }
  void unite(int a, int b) { p[size_t(find(a))] = find(b); }
};

// Dijkstra over arbitrary per-edge weights; returns distances and predecessors
std::pair<std::vector<double>, std::vector<int>> dijkstra_weighted(
    const DomainMesh& mesh, const std::vector<double>& weights, const std::vector<int>& sources) {
  std::vector<double> dist(mesh.vertices.size(), kInf);
  std::vector<int> prev(mesh.vertices.size(), -1);
  using Item = std::pair<double, int>;
  std::priority_queue<Item, std::vector<Item>, std::greater<>> pq;
  for (int s : sources) {
    dist[size_t(s)] = 0.0;
    prev[size_t(s)] = s;
    pq.push({0.0, s});
  }
  while (!pq.empty()) {
    auto [d, v] = pq.top();
    pq.pop();
    if (d > dist[size_t(v)]) continue;
    for (auto [u, e] : mesh.adj[size_t(v)]) {
      const double nd = d + weights[size_t(e)];
      if (nd < dist[size_t(u)]) {
        dist[size_t(u)] = nd;
        prev[size_t(u)] = v;
        pq.push({nd, u});
      }
    }
  }
  return {std::move(dist), std::move(prev)};
}

std::vector<int> extract_path(const std::vector<int>& prev, int from, int to) {
  std::vector<int> path{to};
  while (path.back() != from) {
    const int pr = prev[size_t(path.back())];
    if (pr < 0 || pr == path.back()) break;
    path.push_back(pr);
  }
  std::reverse(path.begin(), path.end());
  return path;
}

Eigen::Vector3d slerp(const Eigen::Vector3d& a, const Eigen::Vector3d& b, double t) {
  const double cosw = std::clamp(a.normalized().dot(b.normalized()), -1.0, 1.0);
  const double w = std::acos(cosw);
  if (w < 1e-12) return ((1.0 - t) * a + t * b).normalized();
  return (std::sin((1.0 - t) * w) * a + std::sin(t * w) * b) / std::sin(w);
}

}  // namespace

void DomainMesh::finalize_geometry() {
  adj.assign(vertices.size(), {});
  edge_lengths.resize(edges.size());
  for (size_t e = 0; e < edges.size(); ++e) {
    const auto [a, b] = edges[e];
    edge_lengths[e] = (vertices[size_t(a)] - vertices[size_t(b)]).norm();
    adj[size_t(a)].push_back({b, int(e)});
    adj[size_t(b)].push_back({a, int(e)});
  }
  // quasi-convexity: sampled max of graph distance over chordal distance
  double c = 0.0;
  const int sources = std::min(vertex_count(), 24);
  for (int s = 0; s < sources; ++s) {
    const int src = int((std::uint64_t(s) * 2654435761ULL) % std::uint64_t(vertex_count()));
    const auto [dist, prev] = dijkstra_weighted(*this, edge_lengths, {src});
    for (int v = 0; v < vertex_count(); ++v) {
      const double chord = (vertices[size_t(v)] - vertices[size_t(src)]).norm();
      if (chord > 1e-9 && dist[size_t(v)] < kInf) c = std::max(c, dist[size_t(v)] / chord);
    }
  }
  quasi_convexity = c;
}

double DomainMesh::mesh_diameter() const {
  double d = 0.0;
  for (const auto& a : vertices)
    for (const auto& b : vertices) d = std::max(d, (a - b).norm());
  return d;
}

DomainMesh uv_sphere_mesh(int rings, int cols) {
  if (rings < 2 || cols < 3) throw std::invalid_argument("uv_sphere_mesh: too coarse");
  DomainMesh m;
  auto push = [&](double x, double y, double z) {
    Eigen::VectorXd v(3);
    v << x, y, z;
    m.vertices.push_back(v);
  };
  push(0, 0, 1);  // north pole, id 0
  for (int i = 1; i < rings; ++i) {
    const double th = M_PI * double(i) / double(rings);
    for (int j = 0; j < cols; ++j) {
      const double ph = 2.0 * M_PI * double(j) / double(cols);
      push(std::sin(th) * std::cos(ph), std::sin(th) * std::sin(ph), std::cos(th));
    }
  }
  push(0, 0, -1);  // south pole
  const int south = int(m.vertices.size()) - 1;
  auto rid = [&](int i, int j) { return 1 + (i - 1) * cols + ((j % cols + cols) % cols); };
  for (int j = 0; j < cols; ++j) m.edges.push_back({0, rid(1, j)});
  for (int i = 1; i < rings; ++i)
    for (int j = 0; j < cols; ++j) {
      m.edges.push_back({rid(i, j), rid(i, j + 1)});
      if (i + 1 < rings) m.edges.push_back({rid(i, j), rid(i + 1, j)});
    }
  for (int j = 0; j < cols; ++j) m.edges.push_back({rid(rings - 1, j), south});
  // uv edges are coordinate arcs: ring edges follow their latitude circle, so
  // maps constant in longitude pick up exactly zero image length on them
  {
    std::vector<Eigen::VectorXd> vs = m.vertices;
    std::vector<std::array<int, 2>> es = m.edges;
    m.edge_path = [vs, es](int e, double t) {
      const Eigen::Vector3d a = vs[size_t(es[size_t(e)][0])], b = vs[size_t(es[size_t(e)][1])];
      if (std::abs(a[2] - b[2]) < 1e-12 && a.head<2>().norm() > 1e-12) {
        const double lon_a = std::atan2(a[1], a[0]), lon_b = std::atan2(b[1], b[0]);
        const double lon = lon_a + t * std::remainder(lon_b - lon_a, 2.0 * M_PI);
        const double r = std::hypot(a[0], a[1]);
        Eigen::VectorXd p(3);
        p << r * std::cos(lon), r * std::sin(lon), a[2];
        return p;
      }
      return Eigen::VectorXd(slerp(a, b, t));
    };
  }
  m.finalize_geometry();
  return m;
}

void apply_map(DomainMesh& mesh, const std::function<Eigen::VectorXd(const Eigen::VectorXd&)>& f,
               TargetDist dist, int edge_samples) {
  mesh.target_dist = std::move(dist);
  mesh.values.resize(mesh.vertices.size());
  for (size_t v = 0; v < mesh.vertices.size(); ++v) mesh.values[v] = f(mesh.vertices[v]);
  mesh.image_lengths.resize(mesh.edges.size());
  mesh.lip_f = 0.0;
  for (size_t e = 0; e < mesh.edges.size(); ++e) {
    const auto [a, b] = mesh.edges[e];
    const Eigen::Vector3d pa = mesh.vertices[size_t(a)], pb = mesh.vertices[size_t(b)];
    double len = 0.0;
    Eigen::VectorXd prev = mesh.values[size_t(a)];
    for (int s = 1; s <= edge_samples; ++s) {
      const double t = double(s) / edge_samples;
      const Eigen::VectorXd cur =
          s == edge_samples ? mesh.values[size_t(b)]
          : mesh.edge_path  ? f(mesh.edge_path(int(e), t))
                            : f(Eigen::VectorXd(slerp(pa, pb, t)));
      len += mesh.target_dist(prev, cur);
      prev = cur;
    }
    mesh.image_lengths[e] = len;
    if (mesh.edge_lengths[e] > 0)
      mesh.lip_f = std::max(mesh.lip_f, len / mesh.edge_lengths[e]);
  }
  mesh.sampling_tol = 1.0 / double(edge_samples);
}

DomainMesh height_map_mesh(int rings, int cols) {
  DomainMesh m = uv_sphere_mesh(rings, cols);
  auto f = [](const Eigen::VectorXd& p) {
    Eigen::VectorXd v(3);
    v << 0.5 * (p[2] + 1.0), 0.0, 0.0;  // unit-speed horizontal line in H^1
    return v;
  };
  apply_map(m, f, heis_packed_dist);
  return m;
}

// The tripod mesh is adapted to the map's fibers: three polar-cap grids of
// geodesic circles and radial spokes around the anchors, joined to the poles
// through the zero set. Ring edges follow their geodesic circle, so every
// fiber of the bump is traced by zero-image-length edges and the quotient
// resolves the star tree exactly.
DomainMesh tripod_map_mesh(int rings, int cols) {
  if (rings < 2 || cols < 6) throw std::invalid_argument("tripod_map_mesh: too coarse");
  const double r = 0.8, L = 0.5;  // geodesic support radius, branch length
  const std::array<Eigen::Vector3d, 3> anchors = {
      Eigen::Vector3d{1, 0, 0}, Eigen::Vector3d{-0.5, std::sqrt(3.0) / 2.0, 0},
      Eigen::Vector3d{-0.5, -std::sqrt(3.0) / 2.0, 0}};
  const Eigen::Vector3d pole_axis(0, 0, 1);

  DomainMesh m;
  const int cap_size = 1 + rings * cols;
  auto cap_vertex = [&](int j, int i, int s) {
    return j * cap_size + (i == 0 ? 0 : 1 + (i - 1) * cols + ((s % cols + cols) % cols));
  };
  for (int j = 0; j < 3; ++j) {
    const Eigen::Vector3d U = pole_axis.cross(anchors[size_t(j)]).normalized();
    m.vertices.emplace_back(anchors[size_t(j)]);
    for (int i = 1; i <= rings; ++i) {
      const double rho = r * double(i) / double(rings);
      for (int s = 0; s < cols; ++s) {
        const double phi = 2.0 * M_PI * double(s) / double(cols);
        Eigen::Vector3d p = std::cos(rho) * anchors[size_t(j)] +
                            std::sin(rho) * (std::cos(phi) * U + std::sin(phi) * pole_axis);
        m.vertices.emplace_back(p);
      }
    }
  }
  const int north = 3 * cap_size, south = north + 1;
  m.vertices.emplace_back(Eigen::Vector3d(0, 0, 1));
  m.vertices.emplace_back(Eigen::Vector3d(0, 0, -1));

  // meta per edge: {cap, rho, phi0, phi1} for ring arcs, cap < 0 for geodesics
  std::vector<std::array<double, 4>> meta;
  auto add_edge = [&](int a, int b, std::array<double, 4> mt) {
    m.edges.push_back({a, b});
    meta.push_back(mt);
  };
  for (int j = 0; j < 3; ++j) {
    for (int s = 0; s < cols; ++s) add_edge(cap_vertex(j, 0, 0), cap_vertex(j, 1, s), {-1, 0, 0, 0});
    for (int i = 1; i <= rings; ++i) {
      const double rho = r * double(i) / double(rings);
      for (int s = 0; s < cols; ++s) {
        const double phi0 = 2.0 * M_PI * double(s) / double(cols);
        const double phi1 = 2.0 * M_PI * double(s + 1) / double(cols);
        add_edge(cap_vertex(j, i, s), cap_vertex(j, i, s + 1), {double(j), rho, phi0, phi1});
        if (i < rings) add_edge(cap_vertex(j, i, s), cap_vertex(j, i + 1, s), {-1, 0, 0, 0});
      }
    }
    // outer ring lies in the zero set; tie it to the matching pole
    for (int s = 0; s < cols; ++s) {
      const int v = cap_vertex(j, rings, s);
      add_edge(v, m.vertices[size_t(v)][2] >= 0.0 ? north : south, {-1, 0, 0, 0});
    }
  }

  {
    std::vector<Eigen::VectorXd> vs = m.vertices;
    std::vector<std::array<int, 2>> es = m.edges;
    m.edge_path = [vs, es, meta, anchors, pole_axis](int e, double t) {
      const auto& mt = meta[size_t(e)];
      if (mt[0] >= 0) {
        const Eigen::Vector3d& a = anchors[size_t(int(mt[0]))];
        const Eigen::Vector3d U = pole_axis.cross(a).normalized();
        const double phi = mt[2] + t * (mt[3] - mt[2]);
        Eigen::VectorXd p(3);
        p = std::cos(mt[1]) * a + std::sin(mt[1]) * (std::cos(phi) * U + std::sin(phi) * pole_axis);
        return p;
      }
      return Eigen::VectorXd(
          slerp(vs[size_t(es[size_t(e)][0])], vs[size_t(es[size_t(e)][1])], t));
    };
  }
  m.finalize_geometry();

  auto f = [anchors, r, L](const Eigen::VectorXd& p) {
    Eigen::VectorXd v = Eigen::VectorXd::Zero(3);
    for (int i = 0; i < 3; ++i) {
      const double ang = std::acos(std::clamp(Eigen::Vector3d(p).dot(anchors[size_t(i)]), -1.0, 1.0));
      const double t = L * std::max(0.0, 1.0 - ang / r);
      if (t > 0.0) {
        // horizontal rays from the identity along +x, +y, -x
        if (i == 0) v << t, 0, 0;
        else if (i == 1) v << 0, t, 0;
        else v << -t, 0, 0;
        break;
      }
    }
    return v;
  };
  apply_map(m, f, heis_packed_dist);
  return m;
}

DomainMesh plane_projection_mesh(int rings, int cols) {
  DomainMesh m = uv_sphere_mesh(rings, cols);
  auto f = [](const Eigen::VectorXd& p) { return Eigen::VectorXd(p.head(2)); };
  apply_map(m, f, [](const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
    return (a - b).norm();
  });
  return m;
}

std::vector<double> pullback_distances(const DomainMesh& mesh, const std::vector<int>& sources) {
  if (mesh.image_lengths.size() != mesh.edges.size())
    throw TreeError("NO_MAP", "mesh carries no map values");
  auto [dist, prev] = dijkstra_weighted(mesh, mesh.image_lengths, sources);
  for (double d : dist)
    if (d == kInf) throw TreeError("DISCONNECTED", "mesh is disconnected");
  return dist;
}

double pullback_metric(const DomainMesh& mesh, int u, int v) {
  return pullback_distances(mesh, {u})[size_t(v)];
}

QuotientSpace quotient(const DomainMesh& mesh, double tau) {
  if (tau < 0) throw std::invalid_argument("quotient: tau must be >= 0");
  const int V = mesh.vertex_count();
  Dsu dsu(V);
  for (size_t e = 0; e < mesh.edges.size(); ++e)
    if (mesh.image_lengths[e] <= tau) dsu.unite(mesh.edges[e][0], mesh.edges[e][1]);

  QuotientSpace z;
  z.tau = tau;
  Eigen::MatrixXd D;
  for (;;) {
    // compress class labels
    z.class_of.assign(size_t(V), -1);
    z.representative.clear();
    for (int v = 0; v < V; ++v) {
      const int root = dsu.find(v);
      if (z.class_of[size_t(root)] < 0) {
        z.class_of[size_t(root)] = int(z.representative.size());
        z.representative.push_back(root);
      }
      z.class_of[size_t(v)] = z.class_of[size_t(root)];
    }
    const int C = z.class_count();
    std::vector<std::vector<int>> members(static_cast<size_t>(C));
    for (int v = 0; v < V; ++v) members[size_t(z.class_of[size_t(v)])].push_back(v);

    D.setZero(C, C);
    const int threads = std::min<int>(C, int(std::max(1u, std::thread::hardware_concurrency())));
    std::vector<std::thread> pool;
    std::atomic<int> next{0};
    auto worker = [&] {
      for (;;) {
        const int a = next.fetch_add(1);
        if (a >= C) return;
        const auto dist = pullback_distances(mesh, members[size_t(a)]);
        for (int b = 0; b < C; ++b) {
          double best = kInf;
          for (int v : members[size_t(b)]) best = std::min(best, dist[size_t(v)]);
          D(a, b) = best;
        }
      }
    };
    for (int t = 0; t < threads; ++t) pool.emplace_back(worker);
    for (auto& t : pool) t.join();

    bool merged = false;
    for (int a = 0; a < C && !merged; ++a)
      for (int b = a + 1; b < C && !merged; ++b)
        if (D(a, b) <= tau) {
          dsu.unite(z.representative[size_t(a)], z.representative[size_t(b)]);
          merged = true;
        }
    if (!merged) break;
  }

  // exact symmetry, then metric sanity
  D = 0.5 * (D + D.transpose()).eval();
  const int C = z.class_count();
  double min_off = kInf;
  for (int a = 0; a < C; ++a)
    for (int b = a + 1; b < C; ++b) min_off = std::min(min_off, D(a, b));
  if (C > 1 && tau > 0.0 && min_off <= 2.0 * tau)
    throw TreeError("AMBIGUOUS_THRESHOLD",
                    "tau exceeds half the minimum nonzero pullback distance");
  const int TC = std::min(C, 64);
  for (int a = 0; a < TC; ++a)
    for (int b = 0; b < TC; ++b)
      for (int c = 0; c < TC; ++c)
        if (D(a, c) > D(a, b) + D(b, c) + 1e-9)
          throw TreeError("METRIC_VIOLATION", "triangle inequality failed on the quotient");
  z.dist = std::move(D);

  for (const auto& e : mesh.edges) {
    const int a = z.class_of[size_t(e[0])], b = z.class_of[size_t(e[1])];
    if (a != b) z.class_edges.push_back({std::min(a, b), std::max(a, b)});
  }
  std::sort(z.class_edges.begin(), z.class_edges.end());
  z.class_edges.erase(std::unique(z.class_edges.begin(), z.class_edges.end()),
                      z.class_edges.end());
  return z;
}

FactorPair factor_maps(const DomainMesh& mesh, const QuotientSpace& z, std::uint64_t seed) {
  FactorPair fp;
  fp.psi = z.class_of;
  fp.phi.resize(size_t(z.class_count()));
  for (int c = 0; c < z.class_count(); ++c)
    fp.phi[size_t(c)] = mesh.values[size_t(z.representative[size_t(c)])];

  for (int a = 0; a < z.class_count(); ++a)
    for (int b = a + 1; b < z.class_count(); ++b)
      if (z.dist(a, b) > 1e-12)
        fp.lip_phi = std::max(
            fp.lip_phi, mesh.target_dist(fp.phi[size_t(a)], fp.phi[size_t(b)]) / z.dist(a, b));

  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<int> pick(0, mesh.vertex_count() - 1);
  for (int s = 0; s < 20000; ++s) {
    const int u = pick(rng), v = pick(rng);
    const double chord = (mesh.vertices[size_t(u)] - mesh.vertices[size_t(v)]).norm();
    if (chord < 1e-9) continue;
    fp.lip_psi = std::max(fp.lip_psi, z.dist(fp.psi[size_t(u)], fp.psi[size_t(v)]) / chord);
  }

  // discrete length inequality on random walks
  for (int s = 0; s < 100 && fp.length_inequality_ok; ++s) {
    int v = pick(rng);
    double lhs = 0.0, rhs = 0.0;
    for (int step = 0; step < 50; ++step) {
      const auto& nb = mesh.adj[size_t(v)];
      const auto [u, e] = nb[size_t(rng() % nb.size())];
      lhs += z.dist(fp.psi[size_t(v)], fp.psi[size_t(u)]);
      rhs += mesh.image_lengths[size_t(e)];
      v = u;
    }
    if (lhs > rhs + 1e-9) fp.length_inequality_ok = false;
  }
  return fp;
}

double four_point_defect(const Eigen::MatrixXd& d, int a, int b, int c, int e) {
  double s[3] = {d(a, b) + d(c, e), d(a, c) + d(b, e), d(a, e) + d(b, c)};
  std::sort(s, s + 3, std::greater<>());
  return std::max(0.0, (s[0] - s[1]) / 2.0);
}

TreeCertificate certify_tree(const QuotientSpace& z, std::size_t sample_quadruples,
                             std::uint64_t seed) {
  TreeCertificate cert;
  const int C = z.class_count();
  if (C < 4) {
    cert.exhaustive = true;
    return cert;
  }
  auto consider = [&](int a, int b, int c, int e) {
    const double d = four_point_defect(z.dist, a, b, c, e);
    ++cert.quadruples;
    if (d > cert.delta) {
      cert.delta = d;
      cert.worst = {a, b, c, e};
    }
  };
  if (C <= 40) {
    cert.exhaustive = true;
    for (int a = 0; a < C; ++a)
      for (int b = a + 1; b < C; ++b)
        for (int c = b + 1; c < C; ++c)
          for (int e = c + 1; e < C; ++e) consider(a, b, c, e);
  } else {
    std::mt19937_64 rng(seed);
    std::uniform_int_distribution<int> pick(0, C - 1);
    for (std::size_t s = 0; s < sample_quadruples; ++s) {
      int q[4] = {pick(rng), pick(rng), pick(rng), pick(rng)};
      if (q[0] == q[1] || q[0] == q[2] || q[0] == q[3] || q[1] == q[2] || q[1] == q[3] ||
          q[2] == q[3])
        continue;
      consider(q[0], q[1], q[2], q[3]);
    }
  }
  const double diam = z.diameter();
  cert.delta_rel = diam > 0 ? cert.delta / diam : 0.0;
  return cert;
}

double signed_area(const std::vector<Eigen::Vector2d>& loop) {
  if (loop.size() < 2 || (loop.front() - loop.back()).norm() > 1e-12)
    throw TreeError("OPEN_CURVE", "signed_area requires a closed sampled curve");
  double a = 0.0;
  for (size_t i = 0; i + 1 < loop.size(); ++i)
    a += 0.5 * (loop[i].x() + loop[i + 1].x()) * (loop[i + 1].y() - loop[i].y());
  return a;
}

std::vector<AreaResidual> loop_area_test(const DomainMesh& mesh, const QuotientSpace& z,
                                         int loop_count, double tol, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<int> pick(0, mesh.vertex_count() - 1);
  std::uniform_int_distribution<int> pick_class(0, z.class_count() - 1);
  std::vector<AreaResidual> out;
  out.reserve(size_t(loop_count));
  for (int l = 0; l < loop_count; ++l) {
    const int u = pick(rng), v = pick(rng), w = pick(rng);
    std::vector<int> loop;
    for (auto [from, to] : {std::pair{u, v}, {v, w}, {w, u}}) {
      auto [dist, prev] = dijkstra_weighted(mesh, mesh.edge_lengths, {from});
      auto path = extract_path(prev, from, to);
      loop.insert(loop.end(), path.begin(), path.end() - (to == u ? 0 : 1));
    }
    if (loop.size() < 2) loop.assign({u, u});
    const int c1 = pick_class(rng), c2 = pick_class(rng);
    std::vector<Eigen::Vector2d> planar;
    double len = 0.0;
    int prev_class = -1;
    for (int vert : loop) {
      const int c = z.class_of[size_t(vert)];
      planar.emplace_back(z.dist(c, c1), z.dist(c, c2));
      if (prev_class >= 0) len += z.dist(prev_class, c);
      prev_class = c;
    }
    AreaResidual r;
    r.residual = std::abs(signed_area(planar));
    r.normalizer = std::max(len * len, 1e-12);
    r.pass = r.residual <= tol * r.normalizer;
    out.push_back(r);
  }
  return out;
}

WitnessPair witness_pair(const SampledLoop& loop, double a, double b, double delta, double eps) {
  const int M = int(loop.t.size());
  if (M < 3 || !(a < b) || delta <= 0 || eps <= 0)
    throw TreeError("NO_VALID_DELTA", "degenerate witness parameters");
  WitnessPair wp;
  for (int i = 0; i < M; ++i) {
    const int j = (i + 1) % M;
    double dt = loop.t[size_t(j)] - loop.t[size_t(i)];
    if (j == 0) dt += loop.period;
    if (dt > 0) wp.lip_gamma = std::max(wp.lip_gamma, loop.d(i, j) / dt);
  }
  auto nearest_idx = [&](double t) {
    int best = 0;
    double bd = kInf;
    for (int i = 0; i < M; ++i) {
      const double dd = std::abs(loop.t[size_t(i)] - t);
      if (dd < bd) {
        bd = dd;
        best = i;
      }
    }
    return best;
  };
  const int ia = nearest_idx(a), ib = nearest_idx(b);
  const double endpoint_sep = loop.d(ia, ib);
  if (!(eps < endpoint_sep / (2.0 * wp.lip_gamma)))
    throw TreeError("NO_VALID_DELTA", "eps too large for the endpoint separation");

  std::vector<int> segment;
  for (int i = 0; i < M; ++i)
    if (loop.t[size_t(i)] >= a && loop.t[size_t(i)] <= b) segment.push_back(i);
  if (segment.empty()) throw TreeError("NO_VALID_DELTA", "no samples on [a,b]");

  auto dist_to_segment = [&](int i) {
    double best = kInf;
    for (int s : segment) best = std::min(best, loop.d(i, s));
    return best;
  };
  // delta admissibility: the delta-neighborhood of gamma([a,b]) must miss the
  // loop outside (a-eps, b+eps)
  const double mid = 0.5 * (a + b), halfwidth = 0.5 * (b - a) + eps;
  for (int i = 0; i < M; ++i) {
    const double t = loop.t[size_t(i)];
    const double dt = loop.period > 0 ? std::remainder(t - mid, loop.period) : t - mid;
    if (std::abs(dt) < halfwidth) continue;
    if (dist_to_segment(i) <= delta)
      throw TreeError("NO_VALID_DELTA",
                      "sample at t=" + std::to_string(t) + " inside the delta neighborhood");
  }

  wp.pi1.resize(size_t(M));
  wp.pi2.resize(size_t(M));
  for (int i = 0; i < M; ++i) {
    wp.pi1[size_t(i)] = std::max(0.0, 1.0 - dist_to_segment(i) / delta);
    wp.pi2[size_t(i)] = loop.d(i, ia);
  }
  std::vector<Eigen::Vector2d> planar;
  planar.reserve(size_t(M) + 1);
  for (int i = 0; i < M; ++i) planar.emplace_back(wp.pi1[size_t(i)], wp.pi2[size_t(i)]);
  planar.push_back(planar.front());
  wp.area = signed_area(planar);
  wp.lower_bound = endpoint_sep - 2.0 * eps * wp.lip_gamma;
  return wp;
}

PrunedTree prune_project(const QuotientSpace& z, const std::vector<int>& net, double eps,
                         const TreeCertificate& cert, double cert_tol) {
  if (cert.delta > cert_tol)
    throw TreeError("NOT_CERTIFIED", "quotient failed the tree certification");
  if (net.empty()) throw std::invalid_argument("prune_project: empty net");
  const int C = z.class_count();
  std::vector<std::vector<std::pair<int, double>>> cadj(static_cast<size_t>(C));
  for (const auto& e : z.class_edges) {
    const double w = z.dist(e[0], e[1]);
    cadj[size_t(e[0])].push_back({e[1], w});
    cadj[size_t(e[1])].push_back({e[0], w});
  }
  auto class_dijkstra = [&](int src) {
    std::vector<double> dist(size_t(C), kInf);
    std::vector<int> prev(size_t(C), -1);
    using Item = std::pair<double, int>;
    std::priority_queue<Item, std::vector<Item>, std::greater<>> pq;
    dist[size_t(src)] = 0;
    prev[size_t(src)] = src;
    pq.push({0.0, src});
    while (!pq.empty()) {
      auto [d, v] = pq.top();
      pq.pop();
      if (d > dist[size_t(v)]) continue;
      for (auto [u, w] : cadj[size_t(v)])
        if (d + w < dist[size_t(u)]) {
          dist[size_t(u)] = d + w;
          prev[size_t(u)] = v;
          pq.push({d + w, u});
        }
    }
    return std::pair{dist, prev};
  };

  PrunedTree t;
  std::vector<char> in_tree(size_t(C), 0);
  for (int s : net)
    if (s < 0 || s >= C) throw std::invalid_argument("prune_project: net id out of range");
  for (size_t i = 0; i < net.size(); ++i) {
    const auto [dist, prev] = class_dijkstra(net[i]);
    for (size_t j = i + 1; j < net.size(); ++j) {
      const auto path = extract_path(prev, net[i], net[j]);
      for (size_t p = 0; p < path.size(); ++p) {
        in_tree[size_t(path[p])] = 1;
        if (p > 0)
          t.edges.push_back({std::min(path[p - 1], path[p]), std::max(path[p - 1], path[p])});
      }
    }
  }
  in_tree[size_t(net[0])] = 1;
  std::sort(t.edges.begin(), t.edges.end());
  t.edges.erase(std::unique(t.edges.begin(), t.edges.end()), t.edges.end());
  for (int c = 0; c < C; ++c)
    if (in_tree[size_t(c)]) t.nodes.push_back(c);

  t.projection.resize(size_t(C));
  for (int c = 0; c < C; ++c) {
    int best = t.nodes.front();
    for (int n : t.nodes)
      if (z.dist(c, n) < z.dist(c, best)) best = n;
    t.projection[size_t(c)] = best;
    t.max_displacement = std::max(t.max_displacement, z.dist(c, best));
  }
  (void)eps;  // premise of the net; reported displacement is checked against it by callers
  return t;
}

}  // namespace carnot
