#pragma once

// Cubical combinatorics: eps-grid skeleta, hole domains, cone complexes
// and substitution towers with address-based cell genealogy.

#include <Eigen/Dense>

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace carnot {

// Exact rational 1/m side length.
struct ReciprocalEps {
  std::int64_t m = 1;  // eps = 1/m, m >= 1
  double value() const { return 1.0 / double(m); }
};

// Largest reciprocal-integer eps with (2 eps)^{-(k+1)} > eps^{-(n+1)} (strict).
ReciprocalEps choose_epsilon(int n, int k);

// n-skeleton of the eps-grid of I^{n+1}: N = eps^{-(n+1)} cells numbered
// lexicographically by center coordinates.
struct GridSkeleton {
  int n = 1;             // skeleton dimension; ambient n+1
  ReciprocalEps eps;
  std::int64_t cell_count = 0;  // N

  Eigen::VectorXd cell_center(std::int64_t i) const;     // z_i, 0-based
  Eigen::VectorXd cell_corner(std::int64_t i) const;     // lexicographically least corner
  std::vector<std::int64_t> cell_index(std::int64_t i) const;  // multi-index

  std::int64_t vertex_count() const;
  std::int64_t edge_count() const;
  std::int64_t n_face_count() const;
  // cells sharing a given n-face (axis = normal direction, idx = face multi-index)
  std::vector<std::int64_t> cells_of_face(int axis, const std::vector<std::int64_t>& idx) const;
};

GridSkeleton build_grid_skeleton(int n, ReciprocalEps eps);

// I^{k+1} minus N cubical holes of side eps, each centered in one of the
// (2 eps)^{-(k+1)} subcubes of side 2 eps (lexicographic selection).
struct HoleDomain {
  int k = 2;  // ambient k+1
  ReciprocalEps eps;
  std::int64_t hole_count = 0;  // N

  double subcube_side() const { return 2.0 * eps.value(); }
  double hole_side() const { return eps.value(); }
  std::int64_t subcubes_per_axis() const { return eps.m / 2; }

  Eigen::VectorXd hole_center(std::int64_t i) const;
  Eigen::VectorXd hole_corner(std::int64_t i) const;  // low corner of hole i

  // hole index containing p, or nullopt when p is in K
  std::optional<std::int64_t> membership(const Eigen::VectorXd& p) const;
};

HoleDomain build_hole_domain(int k, ReciprocalEps eps, std::int64_t N);

// n-skeleton of the tiling of ((dI^{n+1}) x [0,1/eps]) u (I^{n+1} x {0}) by
// eps-cubes; the rim dI^{n+1} x {1/eps} is identified with dI^{n+1}.
struct ConeComplex {
  int n = 1;
  ReciprocalEps eps;

  std::int64_t lateral_cell_count() const;  // (2n+2) eps^{-(n+2)}
  std::int64_t cap_cell_count() const;      // eps^{-(n+1)}
  std::int64_t cell_count() const { return lateral_cell_count() + cap_cell_count(); }

  // cells are numbered: lateral cells (face-major, then t-level, then in-face
  // lexicographic), then cap cells. Rim cells are the top t-level.
  bool is_rim_cell(std::int64_t i) const;
  std::int64_t rim_cell_count() const;
};

ConeComplex build_cone_complex(int n, ReciprocalEps eps);

// Substitution tower over a HoleDomain: depth-i holes carry addresses of
// length i+1 over {0..N-1}. Addresses are implicit (counts can exceed memory);
// geometry is reconstructed per address.
struct SubstitutionTower {
  HoleDomain base;
  int depth = 0;
  double domain_scale = 0.0;    // hole side per level (eps for the Euclidean case)
  double codomain_scale = 0.0;  // eps for both cases

  std::int64_t holes_at_depth(int i) const;           // N^{i+1} (may overflow for big i; throws)
  double hole_side_at_depth(int i) const;             // domain_scale^{i+1}
  double total_hole_volume_at_depth(int i) const;

  // low corner and side of the hole at the given address chain
  struct HoleBox {
    Eigen::VectorXd corner;
    double side = 0.0;
  };
  HoleBox hole_box(const std::vector<std::int64_t>& address) const;

  // Address chain of p down to max_level: returns the addresses of the nested
  // holes containing p (empty if p is in K at level 0). `in_hole_at_end` is
  // true when p is still inside a hole at the last level probed.
  struct Descent {
    std::vector<std::int64_t> address;
    bool in_hole_at_end = false;
    Eigen::VectorXd local;  // local coordinates in the last K-copy (unit cube)
  };
  Descent descend(const Eigen::VectorXd& p, int max_level) const;
};

// domain_scale is the base hole side; codomain_scale is the target grid eps.
SubstitutionTower make_tower(HoleDomain base, double codomain_scale);
SubstitutionTower refine_tower(const SubstitutionTower& t);

// deterministic export/import as structured text
std::string tower_to_text(const SubstitutionTower& t);
SubstitutionTower tower_from_text(const std::string& text);

}  // namespace carnot
