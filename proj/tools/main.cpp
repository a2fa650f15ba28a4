// Experiment driver: builds instances, runs verification suites, emits
// deterministic key-value reports. The kaufman and tree binaries are this
// same program dispatched on its executable name.

#include "carnot/analysis.hpp"
#include "carnot/heistower.hpp"
#include "carnot/io.hpp"
#include "carnot/selfsim.hpp"
#include "carnot/treefactor.hpp"

#include <CLI11.hpp>

#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <iostream>

namespace {

using namespace carnot;

std::string default_out_dir() {
  if (const char* env = std::getenv("CARNOT_OUT_DIR")) return env;
  return ".";
}

void emit(const Report& rep, const std::string& out) {
  const std::string path =
      out.find('/') == std::string::npos ? default_out_dir() + "/" + out : out;
  write_atomic(path, rep.to_text());
}

Eigen::VectorXd parse_point(const std::string& s) {
  std::vector<double> vals;
  std::stringstream ss(s);
  std::string tok;
  while (std::getline(ss, tok, ',')) vals.push_back(std::stod(tok));
  Eigen::VectorXd p(Eigen::Index(vals.size()));
  for (size_t i = 0; i < vals.size(); ++i) p[Eigen::Index(i)] = vals[i];
  return p;
}

SampledMap map_as_sampled(const SelfSimilarMap& m, int depth) {
  const int dim = m.base.domain.k + 1;
  auto f = SampledMap::euclidean(
      dim, Eigen::VectorXd::Zero(dim), Eigen::VectorXd::Ones(dim),
      [m, depth](const Eigen::VectorXd& x) { return m.evaluate(x, depth).value; });
  f.nominal_lip = m.base.lip_bound;
  return f;
}

int cmd_kaufman_build(const std::string& eps_s, int n, int k, std::int64_t holes, int sweep,
                      const std::string& beta_file, const std::string& out) {
  if (n != 1) throw SelfSimError("UNSUPPORTED", "only n = 1 codomains are synthesized");
  const auto eps = parse_reciprocal(eps_s);
  if (holes < 0) {
    std::int64_t cells = 1, subcubes = 1;
    for (int a = 0; a < n + 1; ++a) cells *= eps.m;
    for (int a = 0; a < k + 1; ++a) subcubes *= eps.m / 2;
    holes = std::min(cells, subcubes);
  }
  if (!beta_file.empty()) sweep = recognize_sweep(loop_from_text(read_file(beta_file)));
  const auto m = build_kaufman_map(k, eps, holes, sweep);
  write_atomic(out, map_to_text(m));
  std::cerr << "built map: holes=" << holes << " lip=" << m.base.lip_bound << "\n";
  return 0;
}

int cmd_kaufman_eval(const std::string& map_file, const std::string& point, int depth,
                     const std::string& out) {
  auto m = map_from_text(read_file(map_file));
  m.enable_cache();
  const auto v = m.evaluate(parse_point(point), depth);
  Report rep;
  rep.suite = "kaufman-eval";
  rep.add("depth", std::int64_t(depth));
  rep.add("level", std::int64_t(v.level));
  rep.add("exact", v.exact ? "true" : "false");
  rep.add("error_bound", v.error_bound);
  for (Eigen::Index i = 0; i < v.value.size(); ++i)
    rep.add("value." + std::to_string(i), v.value[i]);
  if (out.empty()) std::cout << rep.to_text();
  else emit(rep, out);
  return 0;
}

int kaufman_verify_lip(const SelfSimilarMap& m, Report& rep, std::uint64_t seed,
                       std::size_t samples, int max_depth) {
  bool ok = true;
  for (int d = 0; d <= max_depth; ++d) {
    const auto est = lipschitz_estimate(map_as_sampled(m, d), fork_seed(seed, "lip"), samples);
    const bool pass = est.value <= m.base.lip_bound * 1.05;
    rep.add("lip.depth" + std::to_string(d), est.value);
    rep.add_check("lip.depth" + std::to_string(d), pass);
    ok = ok && pass;
  }
  rep.add("lip.recorded", m.base.lip_bound);
  return ok ? 0 : 1;
}

int kaufman_verify_rank(const SelfSimilarMap& m, Report& rep, std::uint64_t seed,
                        std::size_t samples, int depth) {
  const double step = m.matched_step(depth);
  const auto dirs = dense_directions(m.base.domain.k + 1, 8, fork_seed(seed, "rank-dirs"));
  auto exclude = [&m, depth, step](const Eigen::VectorXd& x) {
    return m.near_feature(x, depth, step);
  };
  const auto dg = degeneracy_fraction(map_as_sampled(m, depth), samples, dirs, step, 0.05,
                                      fork_seed(seed, "rank"), 1, exclude);
  rep.add("rank.fraction", dg.fraction_degenerate);
  rep.add("rank.excluded", std::int64_t(dg.excluded));
  rep.add("rank.tested", std::int64_t(dg.tested));
  rep.add("rank.step", step);
  const bool pass = dg.fraction_degenerate >= 0.95;
  rep.add_check("rank", pass);
  return pass ? 0 : 1;
}

int kaufman_verify_cover(const SelfSimilarMap& m, Report& rep, int depth) {
  // one rim sample per depth-`depth` hole; mark the codomain cells its value touches
  const std::int64_t N = m.base.domain.hole_count;
  const std::int64_t m_cod = m.codomain.eps.m;
  std::int64_t cells_per_axis = 1;
  for (int l = 0; l <= depth; ++l) cells_per_axis *= m_cod;
  const std::int64_t total = cells_per_axis * cells_per_axis;
  std::vector<bool> hit(size_t(total), false);
  const double cell = 1.0 / double(cells_per_axis);
  const double hs = m.base.domain.hole_side();
  const int dim = m.base.domain.k + 1;
  std::vector<std::int64_t> addr(size_t(depth + 1), 0);
  std::int64_t marked = 0;
  for (;;) {
    // domain point on a high face of the innermost hole, in K at level `depth`
    Eigen::VectorXd local = m.base.domain.hole_corner(addr[size_t(depth)]);
    local[0] += hs;
    for (int a = 1; a < dim; ++a) local[a] += 0.5 * hs;
    Eigen::VectorXd x = local;
    for (int l = depth - 1; l >= 0; --l)
      x = m.base.domain.hole_corner(addr[size_t(l)]) + hs * x;
    const auto v = m.evaluate(x, depth);
    for (double dx : {-1e-9, 1e-9})
      for (double dy : {-1e-9, 1e-9}) {
        auto ix = std::int64_t(std::floor((v.value[0] + dx) / cell));
        auto iy = std::int64_t(std::floor((v.value[1] + dy) / cell));
        ix = std::clamp<std::int64_t>(ix, 0, cells_per_axis - 1);
        iy = std::clamp<std::int64_t>(iy, 0, cells_per_axis - 1);
        const auto idx = size_t(ix * cells_per_axis + iy);
        if (!hit[idx]) {
          hit[idx] = true;
          ++marked;
        }
      }
    // next address
    int l = depth;
    for (; l >= 0; --l) {
      if (++addr[size_t(l)] < N) break;
      addr[size_t(l)] = 0;
    }
    if (l < 0) break;
  }
  rep.add("cover.cells", total);
  rep.add("cover.hit", marked);
  const bool pass = marked == total;
  rep.add_check("cover", pass);
  return pass ? 0 : 1;
}

int cmd_kaufman_verify(const std::string& map_file, const std::string& suite, std::uint64_t seed,
                       std::size_t samples, int depth, const std::string& out) {
  auto m = map_from_text(read_file(map_file));
  Report rep;
  rep.suite = "kaufman-" + suite;
  rep.add("seed", std::int64_t(seed));
  rep.add("samples", std::int64_t(samples));
  int rc = 0;
  if (suite == "lip") rc = kaufman_verify_lip(m, rep, seed, samples, depth);
  else if (suite == "rank") rc = kaufman_verify_rank(m, rep, seed, samples, depth);
  else if (suite == "cover") rc = kaufman_verify_cover(m, rep, depth);
  else throw std::invalid_argument("unknown suite " + suite);
  emit(rep, out);
  return rc;
}

HeisPoint<double> circle_alpha(double s) {
  // horizontal lift of the unit circle, arclength-parameterized rim data
  const double th = 0.5 * M_PI * s;  // rim arclength 4 -> angle 2 pi
  return {std::cos(th), std::sin(th), 0.5 * th + 0.25 * std::sin(2.0 * th)};
}

int cmd_heis_verify(const std::string& suite, int k, const std::string& eps_dom_s, int depth,
                    std::uint64_t seed, const std::string& out) {
  Report rep;
  rep.suite = "heis-" + suite;
  rep.add("seed", std::int64_t(seed));
  int rc = 0;
  if (suite == "cone") {
    double cmin = 1e300, cmax = 0;
    for (std::int64_t me : {4, 8, 16}) {
      auto graph = std::make_shared<ConeGraph>(
          build_cone_graph(build_cone_complex(1, ReciprocalEps{me})));
      std::vector<HeisPoint<double>> rim(size_t(graph->ring));
      for (int p = 0; p < graph->ring; ++p)
        rim[size_t(p)] = circle_alpha(4.0 * p / graph->ring);
      const auto cm = cone_extend(rim, graph, fork_seed(seed, "cone"));
      const double c = cm.lip_raw;
      rep.add("cone.C.eps_1_" + std::to_string(me), c);
      rep.add("cone.vertex.eps_1_" + std::to_string(me), cone_vertex_constant(cm));
      cmin = std::min(cmin, c);
      cmax = std::max(cmax, c);
    }
    const bool pass = cmax <= 1.5 * cmin;
    rep.add("cone.ratio", cmax / cmin);
    rep.add_check("cone.stable", pass);
    rc = pass ? 0 : 1;
  } else if (suite == "tower" || suite == "shell") {
    const auto ht = build_heis_tower(ReciprocalEps{4}, k, parse_reciprocal(eps_dom_s), 1, depth,
                                     circle_alpha);
    rep.add("tower.c", ht.c);
    rep.add("tower.lip_alpha", ht.lip_alpha);
    bool ok = true;
    for (int i = 0; i <= depth; ++i) {
      const double bound = std::pow(ht.c, i + 1) * ht.lip_alpha * 1.1;
      const bool pass = ht.lip_sigma[size_t(i)] <= bound;
      rep.add("tower.lip_sigma." + std::to_string(i), ht.lip_sigma[size_t(i)]);
      rep.add_check("tower.level" + std::to_string(i), pass);
      ok = ok && pass;
    }
    if (suite == "shell") {
      std::mt19937_64 rng(fork_seed(seed, "shell"));
      std::uniform_real_distribution<double> uni(0.0, 1.0);
      const double bound = ht.c * ht.base.lip_bound * ht.lip_alpha * 1.1;
      double worst = 0.0;
      for (int s = 0; s < 2000; ++s) {
        Eigen::VectorXd a(k + 1), b(k + 1);
        for (int j = 0; j <= k; ++j) a[j] = uni(rng);
        for (int j = 0; j <= k; ++j) b[j] = std::clamp(a[j] + 0.02 * (uni(rng) - 0.5), 0.0, 1.0);
        const auto va = ht.evaluate(a, depth);
        const auto vb = ht.evaluate(b, depth);
        if (va.level != vb.level || !va.exact || !vb.exact) continue;
        const double dd = (a - b).norm();
        if (dd > 1e-12) worst = std::max(worst, gauge_dist(va.value, vb.value) / dd);
      }
      rep.add("shell.worst", worst);
      const bool pass = worst <= bound;
      rep.add_check("shell", pass);
      ok = ok && pass;
    }
    rc = ok ? 0 : 1;
  } else {
    throw std::invalid_argument("unknown suite " + suite);
  }
  emit(rep, out);
  return rc;
}

DomainMesh corpus_mesh(const std::string& name, int rings, int cols) {
  if (name == "height") return height_map_mesh(rings, cols);
  if (name == "tripod") return tripod_map_mesh(rings, cols);
  if (name == "plane") return plane_projection_mesh(rings, cols);
  throw std::invalid_argument("unknown corpus map " + name);
}

int cmd_tree_factor(const std::string& map_name, int rings, int cols, double tau,
                    std::uint64_t seed, bool certify, const std::string& out) {
  const auto mesh = corpus_mesh(map_name, rings, cols);
  const double tau_eff = tau >= 0 ? tau : 1e-6 * mesh.lip_f * mesh.mesh_diameter();
  const auto z = quotient(mesh, tau_eff);
  const auto fp = factor_maps(mesh, z, fork_seed(seed, "factor"));
  Report rep;
  rep.suite = certify ? "tree-certify" : "tree-factor";
  rep.add("map", map_name);
  rep.add("tau", tau_eff);
  rep.add("classes", std::int64_t(z.class_count()));
  rep.add("lip_f", mesh.lip_f);
  rep.add("quasi_convexity", mesh.quasi_convexity);
  rep.add("lip_psi", fp.lip_psi);
  rep.add("lip_phi", fp.lip_phi);
  bool ok = fp.lip_phi <= 1.05 && fp.lip_psi <= mesh.quasi_convexity * mesh.lip_f * 1.1 &&
            fp.length_inequality_ok;
  rep.add_check("factor.lip_phi", fp.lip_phi <= 1.05);
  rep.add_check("factor.lip_psi", fp.lip_psi <= mesh.quasi_convexity * mesh.lip_f * 1.1);
  rep.add_check("factor.length_inequality", fp.length_inequality_ok);
  if (certify) {
    const auto cert = certify_tree(z, 20000, fork_seed(seed, "certify"));
    rep.add("certify.delta", cert.delta);
    rep.add("certify.delta_rel", cert.delta_rel);
    const bool pass = cert.delta <= 1e-3 * z.diameter();
    rep.add_check("certify", pass);
    ok = ok && pass;
  }
  emit(rep, out);
  return ok ? 0 : 1;
}

int cmd_tree_witness(double a, double b, double delta, double eps, int samples,
                     const std::string& out) {
  SampledLoop loop;
  loop.period = 2.0 * M_PI;
  for (int i = 0; i < samples; ++i) loop.t.push_back(loop.period * i / samples);
  loop.d = [&loop](int i, int j) {
    const double d = std::abs(loop.t[size_t(i)] - loop.t[size_t(j)]);
    return std::min(d, loop.period - d);
  };
  const auto wp = witness_pair(loop, a, b, delta, eps);
  Report rep;
  rep.suite = "tree-witness";
  rep.add("area", wp.area);
  rep.add("lower_bound", wp.lower_bound);
  rep.add("lip_gamma", wp.lip_gamma);
  const bool pass = wp.area >= wp.lower_bound - 1e-6 && wp.area > 0;
  rep.add_check("witness", pass);
  emit(rep, out);
  return pass ? 0 : 1;
}

int cmd_tree_prune(const std::string& map_name, int rings, int cols, const std::string& net_s,
                   double eps, std::uint64_t seed, const std::string& out) {
  const auto mesh = corpus_mesh(map_name, rings, cols);
  const auto z = quotient(mesh, 1e-6 * mesh.lip_f * mesh.mesh_diameter());
  const auto cert = certify_tree(z, 20000, fork_seed(seed, "certify"));
  std::vector<int> net;
  if (net_s == "auto") {
    // greedy eps-net over the quotient classes
    for (int c = 0; c < z.class_count(); ++c) {
      bool covered = false;
      for (int n : net) covered = covered || z.dist(c, n) <= eps;
      if (!covered) net.push_back(c);
    }
  } else {
    std::stringstream ss(net_s);
    std::string tok;
    while (std::getline(ss, tok, ',')) net.push_back(std::stoi(tok));
  }
  const auto t = prune_project(z, net, eps, cert, 1e-3 * z.diameter());
  Report rep;
  rep.suite = "tree-prune";
  rep.add("nodes", std::int64_t(t.nodes.size()));
  rep.add("edges", std::int64_t(t.edges.size()));
  rep.add("max_displacement", t.max_displacement);
  rep.add_check("prune.displacement", t.max_displacement <= eps + cert.delta + 1e-9);
  emit(rep, out);
  return rep.all_passed() ? 0 : 1;
}

int cmd_report_merge(const std::vector<std::string>& files, const std::string& out) {
  std::vector<Report> reps;
  for (const auto& f : files) reps.push_back(report_from_text(read_file(f)));
  const auto merged = merge_reports(reps);
  if (out.empty()) std::cout << merged.to_text();
  else emit(merged, out);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  using namespace carnot;
  CLI::App app{"carnot: Heisenberg-target map toolkit"};
  app.require_subcommand(1);

  // kaufman
  auto* kaufman = app.add_subcommand("kaufman", "self-similar Euclidean-target maps");
  kaufman->require_subcommand(1);
  std::string eps_s = "1/10", beta_file, map_file, out = "report.rep", point = "0.5,0.5,0.5";
  std::string suite = "lip";
  int n = 1, k = 2, sweep = 1, depth = 3;
  std::int64_t holes = -1;
  std::uint64_t seed = 1;
  std::size_t samples = 100000;

  auto* kb = kaufman->add_subcommand("build", "assemble a map file");
  kb->add_option("--n", n);
  kb->add_option("--k", k);
  kb->add_option("--epsilon", eps_s);
  kb->add_option("--holes", holes);
  kb->add_option("--sweep", sweep);
  kb->add_option("--beta", beta_file);
  kb->add_option("--out", out)->required();

  auto* ke = kaufman->add_subcommand("eval", "evaluate at a point");
  ke->add_option("--map", map_file)->required();
  ke->add_option("--point", point);
  ke->add_option("--depth", depth);
  ke->add_option("--out", out);

  auto* kv = kaufman->add_subcommand("verify", "run a verification suite");
  kv->add_option("--map", map_file)->required();
  kv->add_option("--suite", suite)->check(CLI::IsMember({"lip", "rank", "cover"}));
  kv->add_option("--seed", seed);
  kv->add_option("--samples", samples);
  kv->add_option("--depth", depth);
  kv->add_option("--out", out);

  // heis
  auto* heis = app.add_subcommand("heis", "Heisenberg cone extensions and towers");
  heis->require_subcommand(1);
  std::string heis_suite = "cone", eps_dom_s = "1/10";
  int hk = 3, hdepth = 3;
  auto* hv = heis->add_subcommand("verify", "cone/tower/shell measurements");
  hv->add_option("--suite", heis_suite)->check(CLI::IsMember({"cone", "tower", "shell"}));
  hv->add_option("--k", hk);
  hv->add_option("--eps-dom", eps_dom_s);
  hv->add_option("--depth", hdepth);
  hv->add_option("--seed", seed);
  hv->add_option("--out", out);

  // tree
  auto* tree = app.add_subcommand("tree", "factoring maps through metric trees");
  tree->require_subcommand(1);
  std::string tree_map = "tripod", net_s = "auto";
  int rings = 40, cols = 40, wsamples = 4096;
  double tau = -1.0, wa = 0.0, wb = M_PI / 2, wdelta = 0.1, weps = 0.2, peps = 0.3;

  auto* tf = tree->add_subcommand("factor", "quotient and factor a corpus map");
  tf->add_option("--map", tree_map);
  tf->add_option("--rings", rings);
  tf->add_option("--cols", cols);
  tf->add_option("--tau", tau);
  tf->add_option("--seed", seed);
  tf->add_option("--out", out);

  auto* tc = tree->add_subcommand("certify", "factor + four-point certification");
  tc->add_option("--map", tree_map);
  tc->add_option("--rings", rings);
  tc->add_option("--cols", cols);
  tc->add_option("--tau", tau);
  tc->add_option("--seed", seed);
  tc->add_option("--out", out);

  auto* tw = tree->add_subcommand("witness", "witness pair on the circle control");
  tw->add_option("--a", wa);
  tw->add_option("--b", wb);
  tw->add_option("--delta", wdelta);
  tw->add_option("--eps", weps);
  tw->add_option("--samples", wsamples);
  tw->add_option("--out", out);

  auto* tp = tree->add_subcommand("prune", "finite subtree projection");
  tp->add_option("--map", tree_map);
  tp->add_option("--rings", rings);
  tp->add_option("--cols", cols);
  tp->add_option("--net", net_s);
  tp->add_option("--eps", peps);
  tp->add_option("--seed", seed);
  tp->add_option("--out", out);

  // report
  auto* report = app.add_subcommand("report", "merge reports");
  std::vector<std::string> merge_files;
  std::string merge_out;
  report->add_option("--merge", merge_files)->expected(-1);
  report->add_option("--out", merge_out);

  // name-based dispatch: the kaufman/tree binaries skip the first level
  std::vector<std::string> args(argv + 1, argv + argc);
  const std::string prog = std::filesystem::path(argv[0]).filename().string();
  if (prog == "kaufman" || prog == "tree") args.insert(args.begin(), prog);

  try {
    std::vector<std::string> rev(args.rbegin(), args.rend());
    app.parse(rev);
    const auto t0 = std::chrono::steady_clock::now();
    int rc = 1;
    if (kb->parsed()) rc = cmd_kaufman_build(eps_s, n, k, holes, sweep, beta_file, out);
    else if (ke->parsed()) rc = cmd_kaufman_eval(map_file, point, depth, ke->count("--out") ? out : "");
    else if (kv->parsed()) rc = cmd_kaufman_verify(map_file, suite, seed, samples, depth, out);
    else if (hv->parsed()) rc = cmd_heis_verify(heis_suite, hk, eps_dom_s, hdepth, seed, out);
    else if (tf->parsed()) rc = cmd_tree_factor(tree_map, rings, cols, tau, seed, false, out);
    else if (tc->parsed()) rc = cmd_tree_factor(tree_map, rings, cols, tau, seed, true, out);
    else if (tw->parsed()) rc = cmd_tree_witness(wa, wb, wdelta, weps, wsamples, out);
    else if (tp->parsed()) rc = cmd_tree_prune(tree_map, rings, cols, net_s, peps, seed, out);
    else if (report->parsed()) rc = cmd_report_merge(merge_files, merge_out);
    const auto t1 = std::chrono::steady_clock::now();
    std::cerr << "elapsed_ms "
              << std::chrono::duration_cast<std::chrono::milliseconds>(t1 - t0).count() << "\n";
    return rc;
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
}
