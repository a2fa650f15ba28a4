#pragma once

// Cone extensions into the Heisenberg group and the self-similar extension
// tower: rim data on the cone complex is extended by dilation along the cone
// parameter, edges are filled with horizontal interpolation paths, and copies
// are glued along cell boundary traces.

#include "carnot/heis.hpp"
#include "carnot/selfsim.hpp"
#include "carnot/walk.hpp"

#include <cstdint>
#include <map>
#include <memory>
#include <vector>

namespace carnot {

// Horizontal path from p to q: chord lift plus a commutator square closing
// the vertical residual, parameterized by arclength fraction s in [0,1].
HeisPoint<double> horizontal_interp(const HeisPoint<double>& p, const HeisPoint<double>& q,
                                    double s);
// its total horizontal length
double horizontal_interp_length(const HeisPoint<double>& p, const HeisPoint<double>& q);

// Extension of rim data over the cone graph. Values are stored normalized
// (unit Lipschitz rim, identity at the rim corner); the actual map is
// v -> translate . s_scale(raw(v)).
struct ConeMap {
  std::shared_ptr<const ConeGraph> graph;
  std::vector<HeisPoint<double>> raw;
  double scale = 1.0;               // Lipschitz constant of the rim data
  HeisPoint<double> translate;      // rim corner value
  double lip_raw = 0.0;             // sampled Lip of the normalized extension
  double rim_lip_raw = 0.0;         // sampled Lip of the normalized rim data (~1)

  HeisPoint<double> vertex_value(int v) const;
  HeisPoint<double> value(const GraphPoint& gp) const;
};

// Vertex map f_bar(v, t) = s_{eps t}(f(v)) on the lateral wall, identity on
// the cap. Constant rim data extends to the constant map.
ConeMap cone_extend(const std::vector<HeisPoint<double>>& rim_values,
                    std::shared_ptr<const ConeGraph> graph, std::uint64_t seed = 1);

// max over edges of gauge_dist(endpoint values) / eps for the raw extension
double cone_vertex_constant(const ConeMap& f);

struct HeisValue {
  HeisPoint<double> value;
  double error_bound = 0.0;
  int level = 0;
  bool exact = true;
};

// Factored map sigma o gamma: gamma maps the holed-cube tower into nested
// cone-graph copies via the shared base-map machinery; sigma extends rim data
// copy by copy. Copies are memoized by address.
struct HeisTower {
  std::shared_ptr<const ConeGraph> graph;
  BaseMap base;             // K -> cone graph (gamma's base)
  SubstitutionTower tower;  // domain tower (scale decoupled from the codomain)
  ConeMap sigma0;
  int depth = 0;
  double lip_alpha = 0.0;     // measured rim Lipschitz constant of alpha
  double c = 0.0;             // max observed cone extension factor
  std::vector<double> lip_sigma;  // measured shell Lipschitz constants per level
  double unit_diam = 0.0;     // intrinsic diameter of the unit cone graph

  mutable std::map<std::vector<std::int64_t>, ConeMap> copies;

  const ConeMap& copy(const std::vector<std::int64_t>& address) const;
  HeisValue evaluate(const Eigen::VectorXd& x, int depth) const;
};

// alpha: rim arclength in [0,4) -> H^1. eps_dom controls the domain hole
// grid; hole count is min(cone cell count, available subcubes).
HeisTower build_heis_tower(ReciprocalEps eps_cone, int k, ReciprocalEps eps_dom,
                           int sweep_count, int depth,
                           const std::function<HeisPoint<double>(double)>& alpha);

}  // namespace carnot
