#include "carnot/walk.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <queue>
#include <stdexcept>

namespace carnot {

std::int64_t EmbeddedGraph::edge_count() const {
  std::int64_t deg = 0;
  for (const auto& a : adj) deg += std::int64_t(a.size());
  return deg / 2;
}

void EmbeddedGraph::add_edge(int a, int b) {
  if (a == b) throw std::invalid_argument("add_edge: loop edge");
  auto ins = [&](int u, int v) {
    auto& lst = adj[u];
    auto it = std::lower_bound(lst.begin(), lst.end(), v);
    if (it == lst.end() || *it != v) lst.insert(it, v);
  };
  ins(a, b);
  ins(b, a);
}

Walk Walk::from_vertices(const EmbeddedGraph& g, std::vector<int> vs) {
  Walk w;
  w.graph = &g;
  w.vertices = std::move(vs);
  w.cumlen.resize(w.vertices.size());
  double s = 0.0;
  for (size_t i = 0; i < w.vertices.size(); ++i) {
    if (i > 0) s += g.edge_length(w.vertices[i - 1], w.vertices[i]);
    w.cumlen[i] = s;
  }
  return w;
}

Eigen::VectorXd Walk::point_at(double s) const {
  const auto gp = graph_point_at(s);
  return (1.0 - gp.t) * graph->verts[gp.a] + gp.t * graph->verts[gp.b];
}

GraphPoint Walk::graph_point_at(double s) const {
  if (vertices.empty()) throw std::logic_error("empty walk");
  s = std::clamp(s, 0.0, length());
  auto it = std::upper_bound(cumlen.begin(), cumlen.end(), s);
  size_t i = size_t(std::max<std::ptrdiff_t>(1, it - cumlen.begin())) - 1;
  if (i + 1 >= vertices.size()) {
    if (vertices.size() == 1) return {vertices[0], vertices[0], 0.0};
    i = vertices.size() - 2;
  }
  const double seg = cumlen[i + 1] - cumlen[i];
  const double t = seg > 0 ? (s - cumlen[i]) / seg : 0.0;
  return {vertices[i], vertices[i + 1], std::clamp(t, 0.0, 1.0)};
}

std::vector<int> double_tour(const EmbeddedGraph& g, int start) {
  std::vector<int> out{start};
  std::vector<char> visited(g.verts.size(), 0);
  // iterative DFS; every edge is walked once per endpoint expansion
  struct Frame {
    int v;
    int parent;
    size_t next = 0;
  };
  std::vector<Frame> stack{{start, -1}};
  visited[start] = 1;
  while (!stack.empty()) {
    auto& f = stack.back();
    if (f.next >= g.adj[f.v].size()) {
      stack.pop_back();
      if (!stack.empty()) out.push_back(stack.back().v);
      continue;
    }
    const int u = g.adj[f.v][f.next++];
    if (u == f.parent) continue;  // tree edge already walked down and back up
    if (visited[u]) {
      // non-tree edge from the lower-id endpoint: bounce across it once
      if (f.v < u) {
        out.push_back(u);
        out.push_back(f.v);
      }
      continue;
    }
    visited[u] = 1;
    out.push_back(u);
    stack.push_back({u, f.v});
  }
  return out;
}

std::vector<int> bfs_path(const EmbeddedGraph& g, int from, int to) {
  std::vector<int> prev(g.verts.size(), -1);
  std::deque<int> q{from};
  prev[from] = from;
  while (!q.empty()) {
    const int v = q.front();
    q.pop_front();
    if (v == to) break;
    for (int u : g.adj[v])
      if (prev[u] < 0) {
        prev[u] = v;
        q.push_back(u);
      }
  }
  if (prev[to] < 0) throw std::runtime_error("bfs_path: disconnected");
  std::vector<int> path{to};
  while (path.back() != from) path.push_back(prev[path.back()]);
  std::reverse(path.begin(), path.end());
  return path;
}

std::vector<double> dijkstra(const EmbeddedGraph& g, int source) {
  std::vector<double> dist(g.verts.size(), std::numeric_limits<double>::infinity());
  using Item = std::pair<double, int>;
  std::priority_queue<Item, std::vector<Item>, std::greater<>> pq;
  dist[source] = 0.0;
  pq.push({0.0, source});
  while (!pq.empty()) {
    auto [d, v] = pq.top();
    pq.pop();
    if (d > dist[v]) continue;
    for (int u : g.adj[v]) {
      const double nd = d + g.edge_length(v, u);
      if (nd < dist[u]) {
        dist[u] = nd;
        pq.push({nd, u});
      }
    }
  }
  return dist;
}

// ---- grid graph ----

GridGraph build_grid_graph(const GridSkeleton& skeleton) {
  if (skeleton.n != 1) throw std::invalid_argument("build_grid_graph: n = 1 only");
  const int m = int(skeleton.eps.m);
  const double h = skeleton.eps.value();
  GridGraph gg;
  gg.skeleton = skeleton;
  auto vid = [&](int i, int j) { return i * (m + 1) + j; };  // i along axis 0
  gg.g.verts.resize(size_t((m + 1) * (m + 1)));
  gg.g.adj.resize(gg.g.verts.size());
  for (int i = 0; i <= m; ++i)
    for (int j = 0; j <= m; ++j) gg.g.verts[size_t(vid(i, j))] = Eigen::Vector2d(i * h, j * h);
  for (int i = 0; i <= m; ++i)
    for (int j = 0; j <= m; ++j) {
      if (i < m) gg.g.add_edge(vid(i, j), vid(i + 1, j));
      if (j < m) gg.g.add_edge(vid(i, j), vid(i, j + 1));
    }
  gg.corner_vertex = vid(0, 0);
  for (int i = 0; i < m; ++i) gg.outer_loop.push_back(vid(i, 0));
  for (int j = 0; j < m; ++j) gg.outer_loop.push_back(vid(m, j));
  for (int i = m; i > 0; --i) gg.outer_loop.push_back(vid(i, m));
  for (int j = m; j > 0; --j) gg.outer_loop.push_back(vid(0, j));
  gg.outer_loop.push_back(vid(0, 0));
  gg.cell_corners.resize(size_t(skeleton.cell_count));
  for (std::int64_t c = 0; c < skeleton.cell_count; ++c) {
    const auto idx = skeleton.cell_index(c);
    const int i = int(idx[0]), j = int(idx[1]);
    gg.cell_corners[size_t(c)] = {vid(i, j), vid(i + 1, j), vid(i + 1, j + 1), vid(i, j + 1)};
  }
  return gg;
}

// ---- cone graph ----

ConeGraph build_cone_graph(const ConeComplex& complex) {
  if (complex.n != 1) throw std::invalid_argument("build_cone_graph: n = 1 only");
  const int m = int(complex.eps.m);
  const double h = complex.eps.value();
  const int levels = m * m;  // t-intervals; vertices at levels 0..levels
  const int ring = 4 * m;    // perimeter positions
  ConeGraph cg;
  cg.complex = complex;
  cg.ring = ring;
  cg.levels = levels;

  // boundary point of I^2 at arclength p*h ccw from (0,0)
  auto ring_xy = [&](int p) -> Eigen::Vector2d {
    p = ((p % ring) + ring) % ring;
    const int side = p / m, q = p % m;
    const double s = q * h;
    switch (side) {
      case 0: return {s, 0.0};
      case 1: return {1.0, s};
      case 2: return {1.0 - s, 1.0};
      default: return {0.0, 1.0 - s};
    }
  };

  // lateral vertices: (ring position, level); then interior cap vertices
  auto lat = [&](int p, int j) { return (((p % ring) + ring) % ring) * (levels + 1) + j; };
  const int lat_count = ring * (levels + 1);
  // cap grid vertex (i,j) in {0..m}^2; boundary ones alias level-0 ring vertices
  std::vector<int> cap_id(size_t((m + 1) * (m + 1)), -1);
  auto cap_lookup = [&](int i, int j) -> int& { return cap_id[size_t(i * (m + 1) + j)]; };
  // perimeter grid vertex -> ring position
  for (int p = 0; p < ring; ++p) {
    const Eigen::Vector2d xy = ring_xy(p);
    const int i = int(std::lround(xy.x() * m)), j = int(std::lround(xy.y() * m));
    cap_lookup(i, j) = lat(p, 0);
  }
  int next = lat_count;
  for (int i = 0; i <= m; ++i)
    for (int j = 0; j <= m; ++j)
      if (cap_lookup(i, j) < 0) cap_lookup(i, j) = next++;

  cg.g.verts.resize(size_t(next));
  cg.g.adj.resize(cg.g.verts.size());
  for (int p = 0; p < ring; ++p)
    for (int j = 0; j <= levels; ++j) {
      const Eigen::Vector2d xy = ring_xy(p);
      cg.g.verts[size_t(lat(p, j))] = Eigen::Vector3d(xy.x(), xy.y(), j * h);
    }
  for (int i = 0; i <= m; ++i)
    for (int j = 0; j <= m; ++j)
      cg.g.verts[size_t(cap_lookup(i, j))] = Eigen::Vector3d(i * h, j * h, 0.0);

  for (int p = 0; p < ring; ++p)
    for (int j = 0; j <= levels; ++j) {
      cg.g.add_edge(lat(p, j), lat(p + 1, j));
      if (j < levels) cg.g.add_edge(lat(p, j), lat(p, j + 1));
    }
  for (int i = 0; i <= m; ++i)
    for (int j = 0; j <= m; ++j) {
      if (i < m) cg.g.add_edge(cap_lookup(i, j), cap_lookup(i + 1, j));
      if (j < m) cg.g.add_edge(cap_lookup(i, j), cap_lookup(i, j + 1));
    }

  cg.corner_vertex = lat(0, levels);
  for (int p = 0; p < ring; ++p) cg.rim_loop.push_back(lat(p, levels));
  cg.rim_loop.push_back(lat(0, levels));
  for (int v = 0; v < next; ++v)
    if (cg.g.verts[size_t(v)].z() == 0.0) cg.cap_vertices.push_back(v);

  // cell corners in complex numbering: lateral face-major / level / in-face, then cap
  cg.cell_corners.resize(size_t(complex.cell_count()));
  std::int64_t c = 0;
  for (int face = 0; face < 4; ++face)
    for (int j = 0; j < levels; ++j)
      for (int q = 0; q < m; ++q, ++c) {
        const int p = face * m + q;
        cg.cell_corners[size_t(c)] = {lat(p, j), lat(p + 1, j), lat(p + 1, j + 1), lat(p, j + 1)};
      }
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < m; ++j, ++c)
      cg.cell_corners[size_t(c)] = {cap_lookup(i, j), cap_lookup(i + 1, j),
                                    cap_lookup(i + 1, j + 1), cap_lookup(i, j + 1)};
  return cg;
}

}  // namespace carnot
