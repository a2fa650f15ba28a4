#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "carnot/walk.hpp"

#include <map>

using namespace carnot;

namespace {

std::map<std::pair<int, int>, int> edge_visits(const std::vector<int>& tour) {
  std::map<std::pair<int, int>, int> visits;
  for (std::size_t i = 0; i + 1 < tour.size(); ++i) {
    const int a = std::min(tour[i], tour[i + 1]), b = std::max(tour[i], tour[i + 1]);
    ++visits[{a, b}];
  }
  return visits;
}

}  // namespace

TEST_CASE("double tour visits every edge exactly twice") {
  for (std::int64_t m : {2, 3, 5}) {
    auto gg = build_grid_graph(build_grid_skeleton(1, ReciprocalEps{m}));
    auto tour = double_tour(gg.g, gg.corner_vertex);
    CHECK(tour.front() == gg.corner_vertex);
    CHECK(tour.back() == gg.corner_vertex);
    auto visits = edge_visits(tour);
    CHECK(std::int64_t(visits.size()) == gg.g.edge_count());
    for (const auto& [e, count] : visits) CHECK(count == 2);
  }
}

TEST_CASE("bfs path is a shortest path") {
  auto gg = build_grid_graph(build_grid_skeleton(1, ReciprocalEps{4}));
  // corner (0,0) to corner (1,1): 8 edges on a 4x4 grid
  const int far = gg.g.vertex_count() - 1;
  auto path = bfs_path(gg.g, gg.corner_vertex, far);
  CHECK(path.front() == gg.corner_vertex);
  CHECK(path.back() == far);
  CHECK(path.size() == 9);
  for (std::size_t i = 0; i + 1 < path.size(); ++i) {
    const auto& nb = gg.g.adj[std::size_t(path[i])];
    CHECK(std::find(nb.begin(), nb.end(), path[i + 1]) != nb.end());
  }
}

TEST_CASE("dijkstra matches hop counts on the unit grid") {
  auto gg = build_grid_graph(build_grid_skeleton(1, ReciprocalEps{4}));
  auto dist = dijkstra(gg.g, gg.corner_vertex);
  // all edges have length 1/4; the far corner is 8 hops away
  CHECK(dist[std::size_t(gg.g.vertex_count() - 1)] == doctest::Approx(2.0));
}

TEST_CASE("walk arclength parameterization") {
  auto gg = build_grid_graph(build_grid_skeleton(1, ReciprocalEps{2}));
  auto w = Walk::from_vertices(gg.g, gg.outer_loop);
  CHECK(w.length() == doctest::Approx(4.0));
  CHECK(w.point_at(0.0).isApprox(gg.g.verts[std::size_t(gg.outer_loop.front())]));
  CHECK(w.point_at(4.0).isApprox(gg.g.verts[std::size_t(gg.outer_loop.front())]));
  // quarter way along the ccw perimeter is the corner (1,0)
  CHECK(w.point_at(1.0).isApprox(Eigen::Vector2d(1.0, 0.0)));
  CHECK(w.point_at(2.0).isApprox(Eigen::Vector2d(1.0, 1.0)));
  auto gp = w.graph_point_at(0.125);
  CHECK(gp.t == doctest::Approx(0.25));
}

TEST_CASE("grid graph structure") {
  auto gg = build_grid_graph(build_grid_skeleton(1, ReciprocalEps{3}));
  CHECK(gg.g.vertex_count() == 16);
  CHECK(gg.g.edge_count() == 24);
  CHECK(gg.outer_loop.size() == 13);  // closed ccw cycle over 12 boundary vertices
  CHECK(gg.outer_loop.front() == gg.outer_loop.back());
  // cell corners are ccw starting at the low corner
  for (std::int64_t c = 0; c < gg.skeleton.cell_count; ++c) {
    const auto& q = gg.cell_corners[std::size_t(c)];
    const Eigen::Vector2d lo = gg.skeleton.cell_corner(c);
    CHECK(gg.g.verts[std::size_t(q[0])].isApprox(lo));
    const double e = gg.skeleton.eps.value();
    CHECK(gg.g.verts[std::size_t(q[1])].isApprox(lo + Eigen::Vector2d(e, 0)));
    CHECK(gg.g.verts[std::size_t(q[2])].isApprox(lo + Eigen::Vector2d(e, e)));
    CHECK(gg.g.verts[std::size_t(q[3])].isApprox(lo + Eigen::Vector2d(0, e)));
  }
}

TEST_CASE("cone graph structure") {
  auto cg = build_cone_graph(build_cone_complex(1, ReciprocalEps{4}));
  CHECK(cg.ring == 16);
  CHECK(cg.levels == 16);
  CHECK(cg.complex.cell_count() == 272);
  CHECK(std::int64_t(cg.cell_corners.size()) == cg.complex.cell_count());
  // rim loop is a closed cycle of ring vertices at the top level
  CHECK(cg.rim_loop.size() == std::size_t(cg.ring) + 1);
  CHECK(cg.rim_loop.front() == cg.rim_loop.back());
  for (int v : cg.rim_loop) CHECK(cg.is_lateral(v));
  // cap vertices sit at t = 0
  for (int v : cg.cap_vertices) CHECK(cg.g.verts[std::size_t(v)][2] == doctest::Approx(0.0));
  // every cell's corners form a closed 4-cycle in the graph
  for (const auto& q : cg.cell_corners)
    for (int i = 0; i < 4; ++i) {
      const auto& nb = cg.g.adj[std::size_t(q[std::size_t(i)])];
      CHECK(std::find(nb.begin(), nb.end(), q[std::size_t((i + 1) % 4)]) != nb.end());
    }
}
