#pragma once

// Text serialization: key-value reports with atomic writes, curve tables,
// mesh and map files, exact rational epsilon parsing, seed forking.

#include "carnot/heis.hpp"
#include "carnot/homotopy.hpp"
#include "carnot/selfsim.hpp"
#include "carnot/treefactor.hpp"

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

namespace carnot {

// "1/m" parsed exactly; decimal or malformed input rejected.
ReciprocalEps parse_reciprocal(const std::string& s);

// 17 significant digits, bit-stable round trips
std::string format_real(double v);

struct Report {
  std::string suite;
  std::string schema = "carnot-report v1";
  std::vector<std::pair<std::string, std::string>> entries;

  void add(const std::string& key, const std::string& value);
  void add(const std::string& key, double v) { add(key, format_real(v)); }
  void add(const std::string& key, std::int64_t v) { add(key, std::to_string(v)); }
  void add_check(const std::string& name, bool pass);
  bool all_passed() const;
  std::string to_text() const;
};

Report report_from_text(const std::string& text);
Report merge_reports(const std::vector<Report>& reports);

// write to <path>.tmp then rename; interrupted runs never leave partial files
void write_atomic(const std::string& path, const std::string& content);
std::string read_file(const std::string& path);

// FNV-1a fork of a base seed by suite name
std::uint64_t fork_seed(std::uint64_t base, const std::string& suite);

std::string curve_to_text(const HeisCurve<double>& c);
HeisCurve<double> curve_from_text(const std::string& text);

std::string loop_to_text(const LoopMap& f);
LoopMap loop_from_text(const std::string& text);

// mesh geometry (counts header, vertex rows, edge rows)
std::string mesh_to_text(const DomainMesh& m);
DomainMesh mesh_from_text(const std::string& text);

// self-similar map file: construction parameters, versioned, deterministic order
std::string map_to_text(const SelfSimilarMap& m);
SelfSimilarMap map_from_text(const std::string& text);

}  // namespace carnot
