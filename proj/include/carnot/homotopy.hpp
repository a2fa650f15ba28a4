#pragma once

// Degree and winding-number computations: pi_n(J) ~ Z^N via degree vectors,
// suspension of sphere maps, and the homology-level splitting check.

#include "carnot/complexes.hpp"

#include <Eigen/Dense>

#include <array>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

namespace carnot {

struct HomotopyError : std::runtime_error {
  std::string code;
  HomotopyError(std::string c, const std::string& what)
      : std::runtime_error(what), code(std::move(c)) {}
};

// PL map S^1 -> R^2 as a closed polyline (edge i joins vertex i to i+1 mod N).
struct LoopMap {
  std::vector<Eigen::Vector2d> values;
};

// PL map S^2 -> R^3 on a triangulated sphere.
struct SphereMap {
  std::vector<Eigen::Vector3d> domain;           // vertex positions on S^2
  std::vector<std::array<int, 3>> tris;          // consistently oriented
  std::vector<Eigen::Vector3d> values;
};

using CellularMap = std::variant<LoopMap, SphereMap>;

using DegreeVector = std::vector<std::int64_t>;

struct WindingConfig {
  double margin = 1e-9;        // reject z closer than this to the PL image
  std::uint64_t seed = 1;      // ray direction stream for n = 2
  int max_redraws = 16;
};

// n = 1: total signed angle / 2pi. Throws IMAGE_TOO_CLOSE within margin.
std::int64_t winding_number(const LoopMap& f, const Eigen::Vector2d& z,
                            const WindingConfig& cfg = {});

// n = 2: signed crossings of a generic ray from z, with perturbation retry.
std::int64_t winding_number(const SphereMap& f, const Eigen::Vector3d& z,
                            const WindingConfig& cfg = {});

std::int64_t winding_number(const CellularMap& f, const Eigen::VectorXd& z,
                            const WindingConfig& cfg = {});

// (w_i(f))_i = winding numbers about the grid cell centers. The PL image must
// lie within margin eps/100 of |J|.
DegreeVector decompose_in_basis(const CellularMap& f, const GridSkeleton& grid,
                                const WindingConfig& cfg = {});

// Suspension in cylindrical coordinates: (x,t) -> (beta0(x), t).
// S^0 -> S^0 maps are encoded as a pair of signs.
LoopMap suspend(const std::array<int, 2>& g, int segments_per_meridian = 64);
SphereMap suspend(const LoopMap& g, int levels = 32);

struct SplittingCheck {
  bool degree_vectors_agree = false;  // necessary, not sufficient, for (*)
  DegreeVector lhs;                   // (sum_j i_j) o beta
  DegreeVector rhs;                   // sum_j (i_j o beta)
};

// Homology-level necessary condition for (sum i_j) o beta = sum (i_j o beta),
// realized on m circles in the plane and checked with the winding oracle.
SplittingCheck check_splitting(const LoopMap& beta, int m, const WindingConfig& cfg = {});

// Degree vector of the obstruction class g = iota o beta - sum_i (iota_i o beta)
// for a circle map beta, computed term-by-term with the winding oracle.
DegreeVector obstruction_vector(const LoopMap& beta, const GridSkeleton& grid,
                                const WindingConfig& cfg = {});

// sup-norm radial projection of a loop onto the boundary of the square
// [c - r, c + r]^2
LoopMap project_to_square_boundary(const LoopMap& f, const Eigen::Vector2d& center, double r);

// continuous angle lift of a loop about a center; back() - front() = 2 pi deg
std::vector<double> angle_lift(const LoopMap& f, const Eigen::Vector2d& center);

}  // namespace carnot
