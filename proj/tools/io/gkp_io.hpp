#pragma once

#include <algorithm>
#include <exception>
#include <functional>
#include <map>
#include <ostream>
#include <string>
#include <thread>
#include <vector>

#include "json.hpp"

#include "gkp/lattice.hpp"
#include "gkp/oracle.hpp"
#include "gkp/pipeline.hpp"

namespace gkp::io {

// key = value lines; '#' starts a comment. Lists are comma separated or a
// start:stop:step range (inclusive).
class KeyValueConfig {
 public:
  static KeyValueConfig parse(const std::string& text);
  static KeyValueConfig load(const std::string& path);

  bool has(const std::string& key) const { return values_.count(key) != 0; }
  void set(const std::string& key, const std::string& value) { values_[key] = value; }

  std::string get_string(const std::string& key, const std::string& fallback) const;
  int get_int(const std::string& key, int fallback) const;
  double get_double(const std::string& key, double fallback) const;
  bool get_bool(const std::string& key, bool fallback) const;
  std::vector<double> get_list(const std::string& key, const std::vector<double>& fallback) const;

  // Throws Errc::config naming the first key not in `known`.
  void require_known(const std::vector<std::string>& known) const;

 private:
  std::map<std::string, std::string> values_;
};

std::vector<double> parse_list(const std::string& text);

// Flags shared by every subcommand; unset values defer to the config file.
struct CommonFlags {
  std::string config;
  std::string out;
  int s_max = -1;
  int threads = -1;
  int quadrature_nodes = -1;
};

// Loads the config file (if any) and layers the flags on top.
KeyValueConfig resolve_config(const CommonFlags& flags);

struct SweepConfig {
  std::string code = "square";
  NoiseFamily family = NoiseFamily::envelope;
  std::vector<double> delta_db;
  std::vector<double> params{0.0};
  int s_max = 1;
  int quadrature_nodes = 64;
  bool baseline = false;
  bool residual = true;
  int threads = 0;
};

SweepConfig sweep_config(const KeyValueConfig& kv);

// Curve rows per parameter in input order, each followed by its baseline row when enabled.
std::vector<PointSpec> sweep_points(const SweepConfig& cfg);
std::vector<PointResult> run_sweep(const SweepConfig& cfg);
void write_sweep_csv(std::ostream& os, const std::vector<PointResult>& rows);

struct BlochConfig {
  std::vector<double> delta_db;
  int s_max = 2;
  bool orthonormalize = false;
  bool vacuum_row = true;  // Delta -> infinity limit via the Fock decoder
  int threads = 0;
};

BlochConfig bloch_config(const KeyValueConfig& kv);

struct BlochRow {
  double delta_db = 0;
  double nbar_est = 0;
  std::string state;
  double r[3] = {0, 0, 0};
  bool inside = false;
};

std::vector<BlochRow> run_bloch_trajectory(const BlochConfig& cfg);
void write_bloch_csv(std::ostream& os, const std::vector<BlochRow>& rows);

struct OracleConfig {
  std::vector<double> delta_db{6, 8, 10};
  std::vector<double> gamma{0, 0.01, 0.05};
  OracleOptions options;
  double tolerance = 1e-5;
  int threads = 0;
};

OracleConfig oracle_config(const KeyValueConfig& kv);
std::vector<OracleResult> run_oracle_check(const OracleConfig& cfg);

// "square", "hexagonal", "rectangular" (alpha), "repetition" (alpha, three modes),
// "square2" (two-mode square).
GkpCode make_code(const std::string& name, double alpha);

// Unimodular Pauli-label maps by name; "cz2" is CZ applied twice.
IMat clifford_by_name(const std::string& gate);

// Code definition: {"sigma": rows, "dims": [...], "name": "...", "cell": {"box": [[lo, hi], ...]} or
// {"voronoi": {"radius": r}}}. The cell defaults to Voronoi.
struct CodeSpec {
  GkpCode code;
  PrimitiveCell cell;
};
CodeSpec code_from_json(const nlohmann::json& j);
CodeSpec load_code_file(const std::string& path);

// Shortest-error lengths per Pauli class and the standard form of the generator matrix.
nlohmann::json lattice_report(const std::string& code, double alpha);
nlohmann::json lattice_report(const CodeSpec& spec);
// Cell-invariance verdict of a logical Clifford; cell is "voronoi" or "box".
nlohmann::json clifford_report(const std::string& code, double alpha, const std::string& gate,
                               const std::string& cell);
nlohmann::json clifford_report(const CodeSpec& spec, const std::string& gate);
nlohmann::json oracle_report(const OracleConfig& cfg, const std::vector<OracleResult>& results);

// Per-term {weight, kind, modes, amp, Q: {re, im}, l: {re, im}}, quadrature grid inline.
nlohmann::json to_json(const ChannelCharFn& c);
ChannelCharFn channel_from_json(const nlohmann::json& j);

// Coefficients are written as decimal strings so long double values survive the round trip.
nlohmann::json to_json(const LogicalSuperop& e);
LogicalSuperop superop_from_json(const nlohmann::json& j);

// Number with 17 significant digits in scientific notation.
std::string sci17(long double v);

// Runs f(0..n-1) over a worker pool and returns the results in index order.
template <class T>
std::vector<T> ordered_parallel_map(size_t n, int threads, const std::function<T(size_t)>& f) {
  std::vector<T> out(n);
  size_t nt = threads > 0 ? static_cast<size_t>(threads) : std::max(1u, std::thread::hardware_concurrency());
  nt = std::max<size_t>(1, std::min(nt, n));
  // Errors are kept per index so the one reported does not depend on scheduling.
  std::vector<std::exception_ptr> err(n);
  auto work = [&](size_t t) {
    for (size_t i = t; i < n; i += nt) {
      try {
        out[i] = f(i);
      } catch (...) {
        err[i] = std::current_exception();
      }
    }
  };
  std::vector<std::thread> pool;
  for (size_t t = 1; t < nt; ++t) pool.emplace_back(work, t);
  work(0);
  for (auto& th : pool) th.join();
  for (const auto& e : err)
    if (e) std::rethrow_exception(e);
  return out;
}

}  // namespace gkp::io
