#pragma once

// Embedded graphs (grid skeleta and cone complexes as 1-complexes) and
// unit-speed edge walks over them.

#include "carnot/complexes.hpp"

#include <Eigen/Dense>

#include <array>
#include <cstdint>
#include <vector>

namespace carnot {

struct EmbeddedGraph {
  std::vector<Eigen::VectorXd> verts;
  std::vector<std::vector<int>> adj;  // sorted neighbor lists

  int vertex_count() const { return int(verts.size()); }
  std::int64_t edge_count() const;
  void add_edge(int a, int b);
  double edge_length(int a, int b) const { return (verts[a] - verts[b]).norm(); }
};

// A point on an edge (a,b) at fraction t from a; vertices have t = 0.
struct GraphPoint {
  int a = 0, b = 0;
  double t = 0.0;
};

// Unit-speed walk through consecutive adjacent vertices.
struct Walk {
  const EmbeddedGraph* graph = nullptr;
  std::vector<int> vertices;
  std::vector<double> cumlen;  // cumlen[i] = arclength at vertices[i]

  double length() const { return cumlen.empty() ? 0.0 : cumlen.back(); }
  Eigen::VectorXd point_at(double s) const;
  GraphPoint graph_point_at(double s) const;

  static Walk from_vertices(const EmbeddedGraph& g, std::vector<int> vs);
};

// Closed walk from `start` traversing every edge exactly twice (depth-first,
// deterministic neighbor order).
std::vector<int> double_tour(const EmbeddedGraph& g, int start);

// Deterministic BFS shortest path (ties by vertex id).
std::vector<int> bfs_path(const EmbeddedGraph& g, int from, int to);

// All-pairs-free intrinsic distance: Dijkstra from one source over edge lengths.
std::vector<double> dijkstra(const EmbeddedGraph& g, int source);

// ---- concrete targets ----

// 1-skeleton of the eps-grid of I^2 (n = 1) with its cell loops.
struct GridGraph {
  GridSkeleton skeleton;
  EmbeddedGraph g;
  std::vector<int> outer_loop;                 // ccw perimeter cycle from (0,0)
  std::vector<std::array<int, 4>> cell_corners;  // ccw from the cell's low corner
  int corner_vertex = 0;                       // vertex at (0,0)
};

GridGraph build_grid_graph(const GridSkeleton& skeleton);

// 1-skeleton of the cone complex J(eps) for n = 1, embedded in R^3 as
// (boundary point of I^2, t). The rim ring (top level) is the outer loop.
struct ConeGraph {
  ConeComplex complex;
  EmbeddedGraph g;
  std::vector<int> rim_loop;                   // ccw rim cycle from the (0,0) rim corner
  std::vector<std::array<int, 4>> cell_corners;  // per cell, ccw
  int corner_vertex = 0;                       // rim corner vertex
  std::vector<int> cap_vertices;               // all vertices at t = 0
  int ring = 0;                                // perimeter positions (4m)
  int levels = 0;                              // t-intervals (m^2)

  // lateral vertex at ring position p, t-level j in [0, levels]
  int lateral_vertex(int p, int j) const { return ((p % ring + ring) % ring) * (levels + 1) + j; }
  bool is_lateral(int v) const { return v < ring * (levels + 1); }
};

ConeGraph build_cone_graph(const ConeComplex& complex);

}  // namespace carnot
