#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "carnot/heistower.hpp"

#include <random>

using namespace carnot;

namespace {

HeisPoint<double> rim_circle(double s) {
  const double th = 0.5 * M_PI * s;
  return {std::cos(th), std::sin(th), -0.5 * th + 0.25 * std::sin(2.0 * th)};
}

HeisPoint<double> random_point(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> uni(-1.5, 1.5);
  return {uni(rng), uni(rng), uni(rng)};
}

}  // namespace

TEST_CASE("horizontal interpolation hits both endpoints and stays horizontal") {
  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 100; ++trial) {
    auto p = random_point(rng), q = random_point(rng);
    auto a = horizontal_interp(p, q, 0.0);
    auto b = horizontal_interp(p, q, 1.0);
    CHECK(gauge_dist(a, p) < 1e-7);
    CHECK(gauge_dist(b, q) < 1e-7);
    // discrete horizontality along the path; steps across the commutator
    // corners leave a residual of order step squared
    HeisPoint<double> prev = p;
    const int M = 1024;
    for (int i = 1; i <= M; ++i) {
      auto cur = horizontal_interp(p, q, double(i) / M);
      CHECK(horizontality_residual(prev, cur) < 1e-3);
      prev = cur;
    }
  }
}

TEST_CASE("horizontal interpolation length matches the certified formula") {
  std::mt19937_64 rng(7);
  for (int trial = 0; trial < 50; ++trial) {
    auto p = random_point(rng), q = random_point(rng);
    const double len = horizontal_interp_length(p, q);
    CHECK(len >= gauge_dist(p, q, GaugeMetric{GaugeVariant::PathUpperBound}) - 1e-10);
    // sampled arclength converges to the reported length
    double sampled = 0.0;
    HeisPoint<double> prev = p;
    const int M = 2048;
    for (int i = 1; i <= M; ++i) {
      auto cur = horizontal_interp(p, q, double(i) / M);
      sampled += gauge_dist(prev, cur);
      prev = cur;
    }
    CHECK(sampled == doctest::Approx(len).epsilon(0.02));
  }
}

TEST_CASE("commutator square closes a purely vertical displacement") {
  HeisPoint<double> e = HeisPoint<double>::identity(1);
  for (double z : {1.0, -1.0, 0.25}) {
    HeisPoint<double> q(0.0, 0.0, z);
    auto end = horizontal_interp(e, q, 1.0);
    CHECK(gauge_dist(end, q) < 1e-10);
    CHECK(horizontal_interp_length(e, q) == doctest::Approx(4.0 * std::sqrt(std::abs(z))));
  }
}

TEST_CASE("cone extension of constant rim data is the constant map") {
  auto graph = std::make_shared<ConeGraph>(build_cone_graph(build_cone_complex(1, ReciprocalEps{4})));
  HeisPoint<double> c(0.3, -0.2, 0.1);
  std::vector<HeisPoint<double>> rim(std::size_t(graph->ring), c);
  auto cm = cone_extend(rim, graph);
  CHECK(cm.lip_raw == 0.0);
  for (int v = 0; v < graph->g.vertex_count(); ++v) CHECK(gauge_dist(cm.vertex_value(v), c) < 1e-12);
}

TEST_CASE("cone extension restricts to the rim data exactly") {
  auto graph = std::make_shared<ConeGraph>(build_cone_graph(build_cone_complex(1, ReciprocalEps{8})));
  std::vector<HeisPoint<double>> rim(std::size_t(graph->ring));
  for (int p = 0; p < graph->ring; ++p) rim[std::size_t(p)] = rim_circle(4.0 * p / graph->ring);
  auto cm = cone_extend(rim, graph);
  const int top = graph->levels;
  for (int p = 0; p < graph->ring; ++p) {
    const int v = graph->lateral_vertex(p, top);
    CHECK(gauge_dist(cm.vertex_value(v), rim[std::size_t(p)]) < 1e-7);
  }
  // cap collapses to the translate
  for (int v : graph->cap_vertices) CHECK(gauge_dist(cm.vertex_value(v), cm.translate) < 1e-10);
  CHECK(cm.lip_raw > 0.0);
  CHECK(cone_vertex_constant(cm) > 0.0);
}

TEST_CASE("cone extension contracts along the cone parameter") {
  auto graph = std::make_shared<ConeGraph>(build_cone_graph(build_cone_complex(1, ReciprocalEps{8})));
  std::vector<HeisPoint<double>> rim(std::size_t(graph->ring));
  for (int p = 0; p < graph->ring; ++p) rim[std::size_t(p)] = rim_circle(4.0 * p / graph->ring);
  auto cm = cone_extend(rim, graph);
  // gauge distance to the translate shrinks toward the cap
  for (int p = 0; p < graph->ring; p += 5) {
    double prev = -1.0;
    for (int j = 0; j <= graph->levels; ++j) {
      const double d = gauge_dist(cm.vertex_value(graph->lateral_vertex(p, j)), cm.translate);
      CHECK(d >= prev - 1e-12);
      prev = d;
    }
  }
}

TEST_CASE("tower measurements satisfy the per-level extension inequality") {
  auto ht = build_heis_tower(ReciprocalEps{4}, 3, ReciprocalEps{10}, 1, 3, rim_circle);
  CHECK(ht.lip_alpha > 0.0);
  CHECK(ht.c > 0.0);
  REQUIRE(ht.lip_sigma.size() >= 4);
  for (int i = 0; i <= 3; ++i)
    CHECK(ht.lip_sigma[std::size_t(i)] <= std::pow(ht.c, i + 1) * ht.lip_alpha * (1.0 + 1e-9));
}

TEST_CASE("tower of constant rim data is constant") {
  auto ht = build_heis_tower(ReciprocalEps{4}, 3, ReciprocalEps{10}, 1,
                             2, [](double) { return HeisPoint<double>(0.1, 0.2, 0.3); });
  CHECK(ht.lip_alpha == 0.0);
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> uni(0.0, 1.0);
  for (int s = 0; s < 50; ++s) {
    Eigen::VectorXd x(4);
    for (int j = 0; j < 4; ++j) x[j] = uni(rng);
    auto v = ht.evaluate(x, 2);
    CHECK(gauge_dist(v.value, HeisPoint<double>(0.1, 0.2, 0.3)) < 1e-7);
  }
}

TEST_CASE("tower evaluations at consecutive depths stay within the bound") {
  auto ht = build_heis_tower(ReciprocalEps{4}, 3, ReciprocalEps{10}, 1, 2, rim_circle);
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> uni(0.0, 1.0);
  for (int s = 0; s < 300; ++s) {
    Eigen::VectorXd x(4);
    for (int j = 0; j < 4; ++j) x[j] = uni(rng);
    for (int d = 0; d < 2; ++d) {
      auto a = ht.evaluate(x, d);
      auto b = ht.evaluate(x, d + 1);
      if (a.exact && b.exact) {
        CHECK(gauge_dist(a.value, b.value) < 1e-7);
      } else {
        CHECK(gauge_dist(a.value, b.value) <= a.error_bound + b.error_bound + 1e-7);
      }
    }
  }
}

TEST_CASE("nested copies restrict to their parent traces") {
  auto ht = build_heis_tower(ReciprocalEps{4}, 3, ReciprocalEps{10}, 1, 2, rim_circle);
  const auto& parent = ht.copy({});
  const auto& child = ht.copy({5});
  const int R = ht.graph->ring;
  const int per_edge = R / 4;
  const auto& corners = ht.graph->cell_corners[5];
  for (int p = 0; p < R; ++p) {
    const int e = p / per_edge;
    const double frac = double(p % per_edge) / double(per_edge);
    const auto parent_val =
        parent.value({corners[std::size_t(e)], corners[std::size_t((e + 1) % 4)], frac});
    const auto child_val = child.vertex_value(ht.graph->lateral_vertex(p, ht.graph->levels));
    CHECK(gauge_dist(parent_val, child_val) < 1e-7);
  }
}
