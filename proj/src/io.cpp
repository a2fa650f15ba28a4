#include "carnot/io.hpp"

#include <cerrno>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace carnot {

ReciprocalEps parse_reciprocal(const std::string& s) {
  const auto slash = s.find('/');
  if (slash == std::string::npos)
    throw std::invalid_argument("expected a rational like 1/10, got '" + s + "'");
  const std::string num = s.substr(0, slash), den = s.substr(slash + 1);
  if (num != "1") throw std::invalid_argument("numerator must be 1 in '" + s + "'");
  if (den.empty() || den.find_first_not_of("0123456789") != std::string::npos)
    throw std::invalid_argument("denominator must be a positive integer in '" + s + "'");
  const std::int64_t m = std::stoll(den);
  if (m < 1) throw std::invalid_argument("denominator must be >= 1 in '" + s + "'");
  return ReciprocalEps{m};
}

std::string format_real(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void Report::add(const std::string& key, const std::string& value) {
  entries.emplace_back(key, value);
}

void Report::add_check(const std::string& name, bool pass) {
  entries.emplace_back("check." + name, pass ? "pass" : "fail");
}

bool Report::all_passed() const {
  for (const auto& [k, v] : entries)
    if (k.rfind("check.", 0) == 0 && v != "pass") return false;
  return true;
}

std::string Report::to_text() const {
  std::ostringstream os;
  os << "schema = " << schema << "\n";
  os << "suite = " << suite << "\n";
  for (const auto& [k, v] : entries) os << k << " = " << v << "\n";
  return os.str();
}

Report report_from_text(const std::string& text) {
  Report r;
  r.schema.clear();
  std::istringstream is(text);
  std::string line;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    const auto sep = line.find(" = ");
    if (sep == std::string::npos) throw std::runtime_error("malformed report line: " + line);
    const std::string key = line.substr(0, sep), value = line.substr(sep + 3);
    if (key == "schema") r.schema = value;
    else if (key == "suite") r.suite = value;
    else r.entries.emplace_back(key, value);
  }
  if (r.schema != "carnot-report v1") throw std::runtime_error("unknown report schema");
  return r;
}

Report merge_reports(const std::vector<Report>& reports) {
  Report merged;
  merged.suite = "merged";
  for (const auto& r : reports) {
    merged.add("merge.suite", r.suite);
    for (const auto& [k, v] : r.entries) merged.add(r.suite + "." + k, v);
  }
  return merged;
}

void write_atomic(const std::string& path, const std::string& content) {
  const std::string tmp = path + ".tmp";
  {
    std::ofstream os(tmp, std::ios::binary | std::ios::trunc);
    if (!os) throw std::runtime_error("cannot open " + tmp);
    os << content;
    if (!os.flush()) throw std::runtime_error("write failed on " + tmp);
  }
  if (std::rename(tmp.c_str(), path.c_str()) != 0)
    throw std::runtime_error("rename to " + path + " failed: " + std::strerror(errno));
}

std::string read_file(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw std::runtime_error("cannot open " + path);
  std::ostringstream os;
  os << is.rdbuf();
  return os.str();
}

std::uint64_t fork_seed(std::uint64_t base, const std::string& suite) {
  std::uint64_t h = 1469598103934665603ULL ^ base;
  for (unsigned char c : suite) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return h;
}

std::string curve_to_text(const HeisCurve<double>& c) {
  std::ostringstream os;
  const Eigen::Index n = c.pts.empty() ? 0 : c.pts.front().n();
  os << "curve v1 n " << n << " samples " << c.size() << " horizontal "
     << (c.horizontal ? 1 : 0) << "\n";
  for (std::size_t i = 0; i < c.size(); ++i) {
    os << format_real(c.t[i]);
    for (Eigen::Index j = 0; j < n; ++j) os << " " << format_real(c.pts[i].x[j]);
    for (Eigen::Index j = 0; j < n; ++j) os << " " << format_real(c.pts[i].y[j]);
    os << " " << format_real(c.pts[i].z) << "\n";
  }
  return os.str();
}

HeisCurve<double> curve_from_text(const std::string& text) {
  std::istringstream is(text);
  std::string tag, ver, kn, ks, kh;
  Eigen::Index n = 0;
  std::size_t samples = 0;
  int horizontal = 0;
  is >> tag >> ver >> kn >> n >> ks >> samples >> kh >> horizontal;
  if (tag != "curve" || ver != "v1" || kn != "n" || ks != "samples" || kh != "horizontal")
    throw std::runtime_error("curve_from_text: bad header");
  HeisCurve<double> c;
  c.horizontal = horizontal != 0;
  for (std::size_t i = 0; i < samples; ++i) {
    double t = 0;
    is >> t;
    HeisPoint<double> p;
    p.x.resize(n);
    p.y.resize(n);
    for (Eigen::Index j = 0; j < n; ++j) is >> p.x[j];
    for (Eigen::Index j = 0; j < n; ++j) is >> p.y[j];
    is >> p.z;
    if (!is) throw std::runtime_error("curve_from_text: truncated table");
    c.t.push_back(t);
    c.pts.push_back(std::move(p));
  }
  return c;
}

std::string loop_to_text(const LoopMap& f) {
  std::ostringstream os;
  os << "loop v1 samples " << f.values.size() << "\n";
  for (const auto& v : f.values)
    os << format_real(v.x()) << " " << format_real(v.y()) << "\n";
  return os.str();
}

LoopMap loop_from_text(const std::string& text) {
  std::istringstream is(text);
  std::string tag, ver, ks;
  std::size_t samples = 0;
  is >> tag >> ver >> ks >> samples;
  if (tag != "loop" || ver != "v1" || ks != "samples")
    throw std::runtime_error("loop_from_text: bad header");
  LoopMap f;
  for (std::size_t i = 0; i < samples; ++i) {
    double x = 0, y = 0;
    is >> x >> y;
    if (!is) throw std::runtime_error("loop_from_text: truncated table");
    f.values.emplace_back(x, y);
  }
  return f;
}

std::string mesh_to_text(const DomainMesh& m) {
  std::ostringstream os;
  os << "mesh v1 vertices " << m.vertices.size() << " edges " << m.edges.size() << " dim "
     << (m.vertices.empty() ? 0 : m.vertices.front().size()) << "\n";
  for (const auto& v : m.vertices) {
    for (Eigen::Index j = 0; j < v.size(); ++j) os << (j ? " " : "") << format_real(v[j]);
    os << "\n";
  }
  for (const auto& e : m.edges) os << e[0] << " " << e[1] << "\n";
  return os.str();
}

DomainMesh mesh_from_text(const std::string& text) {
  std::istringstream is(text);
  std::string tag, ver, kv, ke, kd;
  std::size_t nv = 0, ne = 0;
  Eigen::Index dim = 0;
  is >> tag >> ver >> kv >> nv >> ke >> ne >> kd >> dim;
  if (tag != "mesh" || ver != "v1" || kv != "vertices" || ke != "edges" || kd != "dim")
    throw std::runtime_error("mesh_from_text: bad header");
  DomainMesh m;
  for (std::size_t i = 0; i < nv; ++i) {
    Eigen::VectorXd v(dim);
    for (Eigen::Index j = 0; j < dim; ++j) is >> v[j];
    m.vertices.push_back(std::move(v));
  }
  for (std::size_t i = 0; i < ne; ++i) {
    int a = 0, b = 0;
    is >> a >> b;
    m.edges.push_back({a, b});
  }
  if (!is) throw std::runtime_error("mesh_from_text: truncated table");
  m.finalize_geometry();
  return m;
}

std::string map_to_text(const SelfSimilarMap& m) {
  std::ostringstream os;
  os << "kaufman-map v1\n";
  os << "k " << m.base.domain.k << "\n";
  os << "eps 1/" << m.base.domain.eps.m << "\n";
  os << "holes " << m.base.domain.hole_count << "\n";
  os << "sweep " << m.base.sweep_count << "\n";
  os << "depth " << m.tower.depth << "\n";
  os << "lip " << format_real(m.base.lip_bound) << "\n";
  os << "walk_length " << format_real(m.base.walk.length()) << "\n";
  return os.str();
}

SelfSimilarMap map_from_text(const std::string& text) {
  std::istringstream is(text);
  std::string header;
  std::getline(is, header);
  if (header != "kaufman-map v1") throw std::runtime_error("map_from_text: bad header");
  int k = 0, sweep = 0, depth = 0;
  std::int64_t holes = 0;
  std::string eps_s;
  double lip = 0, walk_len = 0;
  std::string key;
  while (is >> key) {
    if (key == "k") is >> k;
    else if (key == "eps") is >> eps_s;
    else if (key == "holes") is >> holes;
    else if (key == "sweep") is >> sweep;
    else if (key == "depth") is >> depth;
    else if (key == "lip") is >> lip;
    else if (key == "walk_length") is >> walk_len;
    else throw std::runtime_error("map_from_text: unknown key " + key);
  }
  auto m = build_kaufman_map(k, parse_reciprocal(eps_s), holes, sweep);
  m.tower.depth = depth;
  if (std::abs(m.base.lip_bound - lip) > 1e-9 * std::max(1.0, lip) ||
      std::abs(m.base.walk.length() - walk_len) > 1e-9 * std::max(1.0, walk_len))
    throw std::runtime_error("map_from_text: stored constants disagree with the rebuild");
  return m;
}

}  // namespace carnot
