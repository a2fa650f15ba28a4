#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "carnot/treefactor.hpp"

using namespace carnot;

namespace {

// unit 4-cycle distance matrix (path metric on C4, edge length 1)
Eigen::MatrixXd four_cycle() {
  Eigen::MatrixXd d(4, 4);
  d << 0, 1, 2, 1,
       1, 0, 1, 2,
       2, 1, 0, 1,
       1, 2, 1, 0;
  return d;
}

}  // namespace

TEST_CASE("four point defect of the unit 4-cycle is 1") {
  CHECK(four_point_defect(four_cycle(), 0, 1, 2, 3) == doctest::Approx(1.0));
}

TEST_CASE("four point defect vanishes on a star tree") {
  // leaves at distances 1, 2, 3 from a center
  Eigen::MatrixXd d(4, 4);
  d << 0, 1, 2, 3,
       1, 0, 3, 4,
       2, 3, 0, 5,
       3, 4, 5, 0;
  CHECK(four_point_defect(d, 0, 1, 2, 3) == doctest::Approx(0.0));
}

TEST_CASE("signed area of circles") {
  std::vector<Eigen::Vector2d> ccw, cw;
  const int M = 20000;
  for (int i = 0; i <= M; ++i) {
    const double th = 2.0 * M_PI * i / M;
    ccw.emplace_back(std::cos(th), std::sin(th));
    cw.emplace_back(std::cos(-th), std::sin(-th));
  }
  CHECK(signed_area(ccw) == doctest::Approx(M_PI).epsilon(1e-6));
  CHECK(signed_area(cw) == doctest::Approx(-M_PI).epsilon(1e-6));
}

TEST_CASE("signed area rejects open curves") {
  std::vector<Eigen::Vector2d> open{{0, 0}, {1, 0}, {1, 1}};
  CHECK_THROWS_AS(signed_area(open), TreeError);
}

TEST_CASE("height map quotient is an interval") {
  auto mesh = height_map_mesh(40, 40);
  auto z = quotient(mesh, 1e-6 * mesh.lip_f * mesh.mesh_diameter());
  CHECK(z.class_count() == 41);  // 39 latitude rings plus the two poles
  // the class graph is a path: every class meets at most two neighbors
  std::vector<int> degree(std::size_t(z.class_count()), 0);
  for (const auto& e : z.class_edges) {
    ++degree[std::size_t(e[0])];
    ++degree[std::size_t(e[1])];
  }
  int endpoints = 0;
  for (int d : degree) {
    CHECK(d <= 2);
    endpoints += d == 1 ? 1 : 0;
  }
  CHECK(endpoints == 2);
  // its diameter matches the image interval [0,1] up to sampling slack
  CHECK(z.diameter() == doctest::Approx(1.0).epsilon(2.0 * mesh.sampling_tol));
  auto cert = certify_tree(z);
  CHECK(cert.delta <= 1e-9);
}

TEST_CASE("tripod quotient certifies as a star tree and factors") {
  auto mesh = tripod_map_mesh(20, 24);
  auto z = quotient(mesh, 1e-6 * mesh.lip_f * mesh.mesh_diameter());
  CHECK(z.class_count() == 61);  // 3 x 20 rings plus the merged zero set
  auto cert = certify_tree(z);
  CHECK(cert.delta <= 1e-12 * z.diameter() + 1e-12);
  auto fp = factor_maps(mesh, z, 7);
  CHECK(fp.lip_phi <= 1.0 + 1e-9);
  CHECK(fp.lip_psi <= mesh.quasi_convexity * mesh.lip_f * (1.0 + 1e-9));
  CHECK(fp.length_inequality_ok);
  // psi o phi-style composition reproduces f at representatives
  for (int c = 0; c < z.class_count(); ++c) {
    const int rep = z.representative[std::size_t(c)];
    CHECK(fp.psi[std::size_t(rep)] == c);
    CHECK((fp.phi[std::size_t(c)] - mesh.values[std::size_t(rep)]).norm() < 1e-12);
  }
}

TEST_CASE("constant map quotient has a single class") {
  auto mesh = uv_sphere_mesh(12, 12);
  apply_map(mesh, [](const Eigen::VectorXd&) { return Eigen::VectorXd::Zero(2); },
            [](const Eigen::VectorXd& a, const Eigen::VectorXd& b) { return (a - b).norm(); });
  auto z = quotient(mesh, 0.0);
  CHECK(z.class_count() == 1);
  CHECK(z.diameter() == 0.0);
}

TEST_CASE("pullback distances come from the image lengths") {
  auto mesh = height_map_mesh(16, 16);
  // pole to pole along any meridian costs the full interval
  const int north = 0, south = mesh.vertex_count() - 1;
  CHECK(pullback_metric(mesh, north, south) == doctest::Approx(1.0).epsilon(1e-9));
  // mesh without values is rejected
  auto bare = uv_sphere_mesh(8, 8);
  CHECK_THROWS_AS(pullback_distances(bare, {0}), TreeError);
}

TEST_CASE("ambiguous quotient thresholds are rejected") {
  auto mesh = height_map_mesh(16, 16);
  // tau at the scale of the inter-ring distances leaves near-threshold pairs
  CHECK_THROWS_WITH_AS(quotient(mesh, 0.03), doctest::Contains("tau exceeds"), TreeError);
}

TEST_CASE("negative control: the plane projection does not factor as a tree") {
  auto mesh = plane_projection_mesh(12, 12);
  auto z = quotient(mesh, 1e-9 * mesh.lip_f * mesh.mesh_diameter());
  CHECK(z.class_count() > 100);  // nothing collapses
  auto cert = certify_tree(z, 20000, 3);
  CHECK(cert.delta > 1e-2 * z.diameter());
  auto residuals = loop_area_test(mesh, z, 60, 1e-3, 5);
  int failures = 0;
  for (const auto& r : residuals) failures += r.pass ? 0 : 1;
  CHECK(failures > 0);
}

TEST_CASE("loop areas vanish on tree quotients") {
  auto mesh = tripod_map_mesh(16, 18);
  auto z = quotient(mesh, 1e-6 * mesh.lip_f * mesh.mesh_diameter());
  auto residuals = loop_area_test(mesh, z, 60, 1e-3, 5);
  CHECK(residuals.size() == 60);
  for (const auto& r : residuals) {
    CHECK(r.pass);
    CHECK(std::abs(r.residual) <= 1e-3 * r.normalizer + 1e-12);
  }
}

TEST_CASE("witness pair on the circle meets its certified lower bound") {
  SampledLoop loop;
  loop.period = 2.0 * M_PI;
  const int M = 4096;
  for (int i = 0; i < M; ++i) loop.t.push_back(loop.period * i / M);
  loop.d = [&loop](int i, int j) {
    const double d = std::abs(loop.t[std::size_t(i)] - loop.t[std::size_t(j)]);
    return std::min(d, loop.period - d);
  };
  auto wp = witness_pair(loop, 0.0, M_PI / 2, 0.1, 0.2);
  CHECK(wp.lip_gamma == doctest::Approx(1.0));
  CHECK(wp.lower_bound == doctest::Approx(M_PI / 2 - 0.4));
  CHECK(wp.area == doctest::Approx(M_PI / 2).epsilon(0.05));
  CHECK(wp.area >= wp.lower_bound);

  // eps too large for the endpoint separation
  CHECK_THROWS_WITH_AS(witness_pair(loop, 0.0, M_PI / 2, 0.1, 1.0),
                       doctest::Contains("eps"), TreeError);
  // delta neighborhood swallowing other parts of the loop
  CHECK_THROWS_AS(witness_pair(loop, 0.0, M_PI / 2, 2.0, 0.2), TreeError);
}

TEST_CASE("prune projects onto a finite subtree within eps plus the defect") {
  auto mesh = tripod_map_mesh(16, 18);
  auto z = quotient(mesh, 1e-6 * mesh.lip_f * mesh.mesh_diameter());
  auto cert = certify_tree(z);
  // greedy 0.2-net over the classes
  std::vector<int> net;
  for (int c = 0; c < z.class_count(); ++c) {
    bool covered = false;
    for (int n : net) covered = covered || z.dist(c, n) <= 0.2;
    if (!covered) net.push_back(c);
  }
  auto t = prune_project(z, net, 0.2, cert, 1e-6);
  CHECK(t.max_displacement <= 0.2 + cert.delta + 1e-9);
  CHECK(t.edges.size() + 1 == t.nodes.size());  // a tree
  for (int c = 0; c < z.class_count(); ++c) {
    const int p = t.projection[std::size_t(c)];
    CHECK(std::find(t.nodes.begin(), t.nodes.end(), p) != t.nodes.end());
  }

  // certification gate
  TreeCertificate bad;
  bad.delta = 1.0;
  CHECK_THROWS_WITH_AS(prune_project(z, net, 0.2, bad, 1e-6),
                       doctest::Contains("certif"), TreeError);
}
