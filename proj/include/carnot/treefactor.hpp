#pragma once

// Factoring Lipschitz maps through metric trees: pull-back pseudometric on a
// meshed sphere, metric quotient, factor maps, four-point tree certification,
// signed-area functionals with witness pairs, and finite-subtree projection.

#include <Eigen/Dense>

#include <array>
#include <cstdint>
#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

namespace carnot {

struct TreeError : std::runtime_error {
  std::string code;
  TreeError(std::string c, const std::string& what)
      : std::runtime_error(what), code(std::move(c)) {}
};

using TargetDist = std::function<double(const Eigen::VectorXd&, const Eigen::VectorXd&)>;

// Meshed domain X (vertices on S^k) carrying per-vertex target values and
// per-edge image lengths of the map f.
struct DomainMesh {
  std::vector<Eigen::VectorXd> vertices;
  std::vector<std::array<int, 2>> edges;
  std::vector<double> edge_lengths;  // chordal
  std::vector<std::vector<std::pair<int, int>>> adj;  // (neighbor, edge id)

  // optional curved edges: (edge id, s in [0,1]) -> point on the sphere.
  // Fiber-aligned edges (latitude rings, circles about an anchor) get exactly
  // zero image length this way; unset edges are great-circle arcs.
  std::function<Eigen::VectorXd(int, double)> edge_path;

  std::vector<Eigen::VectorXd> values;  // f at vertices
  TargetDist target_dist;
  std::vector<double> image_lengths;  // per edge, sampled along the edge
  double lip_f = 0.0;                 // measured max edge ratio
  double quasi_convexity = 0.0;       // C: sampled max graph/chordal distance
  double sampling_tol = 0.0;          // edge image-length quadrature slack

  int vertex_count() const { return int(vertices.size()); }
  void finalize_geometry();  // adj + edge lengths + C
  double mesh_diameter() const;
};

DomainMesh uv_sphere_mesh(int rings, int cols);

// Evaluate f at vertices and sample image lengths along great-circle edge
// paths; records lip_f and the sampling tolerance.
void apply_map(DomainMesh& mesh,
               const std::function<Eigen::VectorXd(const Eigen::VectorXd&)>& f,
               TargetDist dist, int edge_samples = 8);

// test corpus
DomainMesh height_map_mesh(int rings, int cols);      // S^2 -> horizontal line in H^1
DomainMesh tripod_map_mesh(int rings, int cols);      // S^2 -> three horizontal rays
DomainMesh plane_projection_mesh(int rings, int cols);  // negative control, S^2 -> R^2

// Dijkstra over image-length edge weights from several sources at once.
std::vector<double> pullback_distances(const DomainMesh& mesh, const std::vector<int>& sources);
double pullback_metric(const DomainMesh& mesh, int u, int v);

struct QuotientSpace {
  std::vector<int> class_of;       // per vertex
  std::vector<int> representative;  // per class
  Eigen::MatrixXd dist;            // class distance matrix
  std::vector<std::array<int, 2>> class_edges;  // classes joined by a mesh edge
  double tau = 0.0;

  int class_count() const { return int(representative.size()); }
  double diameter() const { return dist.size() ? dist.maxCoeff() : 0.0; }
};

QuotientSpace quotient(const DomainMesh& mesh, double tau);

struct FactorPair {
  std::vector<int> psi;              // X -> Z (class ids per vertex)
  std::vector<Eigen::VectorXd> phi;  // Z -> Y (representative values)
  double lip_psi = 0.0;
  double lip_phi = 0.0;
  bool length_inequality_ok = true;  // length(psi o path) <= length(f o path)
};

FactorPair factor_maps(const DomainMesh& mesh, const QuotientSpace& z, std::uint64_t seed = 1);

struct TreeCertificate {
  double delta = 0.0;
  double delta_rel = 0.0;
  std::array<int, 4> worst{{0, 0, 0, 0}};
  bool exhaustive = false;
  std::size_t quadruples = 0;
};

// four-point defect over all quadruples when class count <= 40, else sampled
TreeCertificate certify_tree(const QuotientSpace& z, std::size_t sample_quadruples = 20000,
                             std::uint64_t seed = 1);

// defect of one quadruple of a distance matrix: (largest pairing sum minus the
// next one) / 2
double four_point_defect(const Eigen::MatrixXd& d, int a, int b, int c, int e);

// trapezoid rule for A = integral of g1 dg2 over a closed sampled curve
double signed_area(const std::vector<Eigen::Vector2d>& loop);

struct AreaResidual {
  double residual = 0.0;
  double normalizer = 0.0;
  bool pass = true;
};

// |A(pi o loop)| for seeded random mesh loops, with pi a pair of 1-Lipschitz
// distance coordinates on Z
std::vector<AreaResidual> loop_area_test(const DomainMesh& mesh, const QuotientSpace& z,
                                         int loop_count, double tol, std::uint64_t seed = 1);

// A loop sampled in an abstract metric space.
struct SampledLoop {
  std::vector<double> t;                   // parameters, t.front() ~ start, closed
  std::function<double(int, int)> d;        // metric between samples
  double period = 0.0;                     // parameter period
};

struct WitnessPair {
  std::vector<double> pi1, pi2;  // values at the loop samples
  double area = 0.0;
  double lower_bound = 0.0;
  double lip_gamma = 0.0;
};

WitnessPair witness_pair(const SampledLoop& loop, double a, double b, double delta, double eps);

struct PrunedTree {
  std::vector<int> nodes;                  // class ids in T
  std::vector<std::array<int, 2>> edges;   // class-graph edges of T
  std::vector<int> projection;             // per class: nearest node of T
  double max_displacement = 0.0;
};

PrunedTree prune_project(const QuotientSpace& z, const std::vector<int>& net, double eps,
                         const TreeCertificate& cert, double cert_tol);

}  // namespace carnot
