#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "carnot/complexes.hpp"

using namespace carnot;

TEST_CASE("choose_epsilon picks the largest strict reciprocal") {
  // (m/2)^{k+1} > m^{n+1}, largest eps = 1/m
  CHECK(choose_epsilon(1, 2).m == 9);   // m^3/8 > m^2 first at m = 9
  CHECK(choose_epsilon(2, 4).m == 6);   // m^2 > 32 first at m = 6
  CHECK(choose_epsilon(3, 5).m == 9);   // m^2 > 64 first at m = 9
  // the chosen m satisfies the inequality and m-1 does not
  for (auto [n, k] : {std::pair{1, 2}, std::pair{2, 4}, std::pair{3, 5}}) {
    const auto eps = choose_epsilon(n, k);
    auto holds = [&](std::int64_t m) {
      return std::pow(m / 2.0, k + 1) > std::pow(double(m), n + 1);
    };
    CHECK(holds(eps.m));
    CHECK_FALSE(holds(eps.m - 1));
  }
}

TEST_CASE("grid skeleton counts and cell geometry") {
  auto g = build_grid_skeleton(1, ReciprocalEps{3});
  CHECK(g.cell_count == 9);
  CHECK(g.vertex_count() == 16);
  CHECK(g.edge_count() == 24);  // 2 * 4 * 3
  CHECK(g.n_face_count() == 24);
  // lexicographic numbering by center
  CHECK(g.cell_corner(0).isApprox(Eigen::Vector2d(0, 0)));
  CHECK(g.cell_center(0).isApprox(Eigen::Vector2d(1.0 / 6, 1.0 / 6)));
  CHECK(g.cell_corner(8).isApprox(Eigen::Vector2d(2.0 / 3, 2.0 / 3)));
  // interior face shared by two cells, boundary face by one
  auto shared = g.cells_of_face(0, {1, 0});
  CHECK(shared.size() == 2);
  auto boundary = g.cells_of_face(0, {0, 0});
  CHECK(boundary.size() == 1);
}

TEST_CASE("hole domain placement and membership") {
  auto d = build_hole_domain(2, ReciprocalEps{10}, 100);
  CHECK(d.subcubes_per_axis() == 5);
  CHECK(d.hole_side() == doctest::Approx(0.1));
  // hole 0 sits centered in the first subcube: corner at 0.05
  CHECK(d.hole_corner(0).isApprox(Eigen::Vector3d(0.05, 0.05, 0.05)));
  CHECK(d.hole_center(0).isApprox(Eigen::Vector3d(0.1, 0.1, 0.1)));
  // membership: hole interior vs complement
  Eigen::Vector3d inside(0.1, 0.1, 0.1), outside(0.01, 0.01, 0.01);
  CHECK(d.membership(inside).value() == 0);
  CHECK_FALSE(d.membership(outside).has_value());
  // low-inclusive, high-exclusive faces
  Eigen::Vector3d low = d.hole_corner(0), high = low + Eigen::Vector3d::Constant(0.1);
  CHECK(d.membership(low).has_value());
  CHECK_FALSE(d.membership(high).has_value());
}

TEST_CASE("hole domain rejects bad grids") {
  // odd 1/eps cannot be tiled by subcubes of side 2 eps
  CHECK_THROWS(build_hole_domain(2, ReciprocalEps{9}, 81));
  // 1/eps = 8 gives 4^3 = 64 subcubes; 65 holes do not fit
  CHECK_NOTHROW(build_hole_domain(2, ReciprocalEps{8}, 64));
  CHECK_THROWS(build_hole_domain(2, ReciprocalEps{8}, 65));
}

TEST_CASE("cone complex counts") {
  auto c = build_cone_complex(1, ReciprocalEps{4});
  CHECK(c.lateral_cell_count() == 256);  // 4 * 4^3
  CHECK(c.cap_cell_count() == 16);
  CHECK(c.cell_count() == 272);
  CHECK(c.rim_cell_count() == 16);  // 4m rim cells at the top level
  // rim cells are the last level of each lateral face
  std::int64_t rim_seen = 0;
  for (std::int64_t i = 0; i < c.cell_count(); ++i) rim_seen += c.is_rim_cell(i) ? 1 : 0;
  CHECK(rim_seen == c.rim_cell_count());
}

TEST_CASE("substitution tower descent and hole boxes") {
  auto d = build_hole_domain(2, ReciprocalEps{10}, 100);
  auto t = make_tower(d, 0.1);
  CHECK(t.holes_at_depth(0) == 100);
  CHECK(t.holes_at_depth(2) == 1000000);
  CHECK(t.hole_side_at_depth(1) == doctest::Approx(0.01));

  // the address chain of a nested hole center terminates inside that hole
  auto box = t.hole_box({0, 0});
  CHECK(box.side == doctest::Approx(0.01));
  Eigen::Vector3d p = box.corner + Eigen::Vector3d::Constant(0.005);
  auto desc = t.descend(p, 1);
  CHECK(desc.address == std::vector<std::int64_t>{0, 0});
  CHECK(desc.in_hole_at_end);

  // a point of K stops immediately
  auto desc0 = t.descend(Eigen::Vector3d(0.01, 0.01, 0.01), 5);
  CHECK(desc0.address.empty());
  CHECK_FALSE(desc0.in_hole_at_end);

  // local coordinates rescale the last K-copy to the unit cube
  Eigen::Vector3d q = d.hole_corner(3) + 0.1 * Eigen::Vector3d(0.01, 0.01, 0.01);
  auto desc1 = t.descend(q, 5);
  CHECK(desc1.address == std::vector<std::int64_t>{3});
  CHECK_FALSE(desc1.in_hole_at_end);
  CHECK(desc1.local.isApprox(Eigen::Vector3d(0.01, 0.01, 0.01), 1e-9));
}

TEST_CASE("tower text round trip") {
  auto d = build_hole_domain(2, ReciprocalEps{10}, 81);
  auto t = make_tower(d, 0.25);
  t.depth = 3;
  auto t2 = tower_from_text(tower_to_text(t));
  CHECK(t2.base.k == t.base.k);
  CHECK(t2.base.eps.m == t.base.eps.m);
  CHECK(t2.base.hole_count == t.base.hole_count);
  CHECK(t2.depth == t.depth);
  CHECK(t2.domain_scale == t.domain_scale);
  CHECK(t2.codomain_scale == t.codomain_scale);
}

TEST_CASE("refine_tower adds one level") {
  auto d = build_hole_domain(2, ReciprocalEps{10}, 100);
  auto t = make_tower(d, 0.1);
  auto t2 = refine_tower(t);
  CHECK(t2.depth == t.depth + 1);
}
