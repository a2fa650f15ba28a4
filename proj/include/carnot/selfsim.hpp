#pragma once

// Self-similar rank-degenerate maps: a base map h = Gamma o W (unit-speed
// walk composed with a scalar bump field) on the holed cube, substituted into
// itself along the tower addresses.

#include "carnot/complexes.hpp"
#include "carnot/homotopy.hpp"
#include "carnot/walk.hpp"

#include <Eigen/Dense>

#include <cstdint>
#include <memory>
#include <stdexcept>
#include <vector>

namespace carnot {

struct SelfSimError : std::runtime_error {
  std::string code;
  SelfSimError(std::string c, const std::string& what)
      : std::runtime_error(what), code(std::move(c)) {}
};

// h: K -> |J| with h = Gamma(W(x)). Gamma walks the outer loop, a double tour
// of every edge, then visits each cell boundary loop once. W sweeps the walk
// parameter: w_out on the bulk, blended near hole i onto the cell-i loop
// window [a_i, a_i + 4 * cell_side], exactly attained on the hole boundary.
struct BaseMap {
  HoleDomain domain;  // K
  std::shared_ptr<const EmbeddedGraph> target;
  Walk walk;                            // Gamma
  std::vector<double> cell_loop_start;  // a_i for hole/cell i
  double cell_side = 0.0;               // codomain cell side
  double bump_radius = 0.0;             // rho, sup-norm reach of each blend
  int sweep_count = 1;                  // boundary sweep multiplicity
  double lip_bound = 0.0;               // certified Lip(h)

  // d-fold triangle sweep of [0,1] onto [0,1]
  double sweep(double s) const;
  double w_out(const Eigen::VectorXd& x) const { return 4.0 * sweep(x[0]); }
  double field(const Eigen::VectorXd& x) const;  // W
  GraphPoint graph_value(const Eigen::VectorXd& x) const;
  Eigen::VectorXd value(const Eigen::VectorXd& x) const;  // embedded
};

// Assemble h for a grid target (Euclidean codomain) or a cone target. Checks
// the homology-level gluing identity for the requested sweep before building.
BaseMap assemble_base_map(const HoleDomain& domain, const GridGraph& target, int sweep_count);
BaseMap assemble_base_map(const HoleDomain& domain, const ConeGraph& target, int sweep_count);

// Canonical boundary sweep profile with multiplicity d, as a closed loop on
// the boundary of I^2 (the only beta shapes the synthesizer supports).
LoopMap default_sweep(int d, int samples = 160);

// Recover the sweep multiplicity of a canonical profile; UNSUPPORTED when the
// loop is not a canonical sweep within tol.
int recognize_sweep(const LoopMap& beta, double tol = 1e-6);

// Spec-shaped entry point: beta must be a canonical sweep profile (LoopMap);
// sphere-map betas are not synthesized.
BaseMap assemble_base_map(const CellularMap& beta, const HoleDomain& domain,
                          const GridGraph& target);

// Kaufman-style self-similar map r: I^{k+1} -> I^{n+1} (n = 1 targets).
struct SelfSimilarMap {
  BaseMap base;
  SubstitutionTower tower;
  GridSkeleton codomain;  // cells of the target grid, indexed like the holes

  struct Value {
    Eigen::VectorXd value;
    double error_bound = 0.0;  // 0 when the point resolved inside a K-copy
    int level = 0;             // K-copy level, or depth+1 for anchored points
    bool exact = true;
  };

  // Exact on K-copies up to `depth`; cell-center anchor with a certified
  // gauge error bound for points still inside a depth-level hole.
  Value evaluate(const Eigen::VectorXd& x, int depth) const;

  // optional bounded memo keyed by (point bytes, depth); hits are bit-identical
  void enable_cache(std::size_t capacity = 4096);
  struct EvalCache;
  std::shared_ptr<EvalCache> cache;

  // finite-difference step that keeps probes inside one walk edge at `depth`
  double matched_step(int depth) const;

  // true when probes of size `step` at x could straddle a non-smooth feature
  // (hole faces, blend rings, sweep creases, walk vertices, copy boundaries)
  bool near_feature(const Eigen::VectorXd& x, int depth, double step) const;
};

SelfSimilarMap build_kaufman_map(int k, ReciprocalEps eps, std::int64_t holes, int sweep_count);

}  // namespace carnot
