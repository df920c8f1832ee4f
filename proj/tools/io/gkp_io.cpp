#include "gkp_io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <set>
#include <sstream>

#include "gkp/fock.hpp"
#include "gkp/metrics.hpp"
#include "gkp/subsystem.hpp"

namespace gkp::io {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

double to_double(const std::string& key, const std::string& text) {
  const std::string t = trim(text);
  try {
    size_t used = 0;
    const double v = std::stod(t, &used);
    if (used == t.size()) return v;
  } catch (const std::exception&) {
  }
  throw Error(Errc::config, "config: '" + key + "' expects a number, got '" + t + "'");
}

int to_int(const std::string& key, const std::string& text) {
  const std::string t = trim(text);
  try {
    size_t used = 0;
    const long v = std::stol(t, &used);
    if (used == t.size() && v >= std::numeric_limits<int>::min() && v <= std::numeric_limits<int>::max())
      return static_cast<int>(v);
  } catch (const std::exception&) {
  }
  throw Error(Errc::config, "config: '" + key + "' expects an integer, got '" + t + "'");
}

void require_positive(const std::string& key, int v) {
  if (v < 1) throw Error(Errc::config, "config: '" + key + "' must be positive");
}

void require_nonempty(const std::string& key, const std::vector<double>& v) {
  if (v.empty()) throw Error(Errc::config, "config: '" + key + "' must list at least one value");
}

nlohmann::json matrix_json(const Mat& m) {
  nlohmann::json rows = nlohmann::json::array();
  for (int i = 0; i < m.rows(); ++i) {
    nlohmann::json row = nlohmann::json::array();
    for (int j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
    rows.push_back(row);
  }
  return rows;
}

nlohmann::json matrix_json(const IMat& m) { return matrix_json(Mat(m.cast<double>())); }

// Entries as [re, im] pairs.
nlohmann::json matrix_json(const CMat& m) {
  nlohmann::json rows = nlohmann::json::array();
  for (int i = 0; i < m.rows(); ++i) {
    nlohmann::json row = nlohmann::json::array();
    for (int j = 0; j < m.cols(); ++j) row.push_back({m(i, j).real(), m(i, j).imag()});
    rows.push_back(row);
  }
  return rows;
}

// Infinite lengths (no boundary of that class) become null.
nlohmann::json length_json(double v) { return std::isfinite(v) ? nlohmann::json(v) : nlohmann::json(); }

nlohmann::json distances_json(const PrimitiveCell& cell, int mode) {
  const int n = cell.code().modes();
  return {{"X", length_json(shortest_error_length(cell, LogicalClass::x(n, mode)))},
          {"Y", length_json(shortest_error_length(cell, LogicalClass::y(n, mode)))},
          {"Z", length_json(shortest_error_length(cell, LogicalClass::z(n, mode)))},
          {"any", length_json(shortest_error_length(cell, LogicalClass::any()))}};
}

Mat mat_from_json(const nlohmann::json& j) {
  if (!j.is_array() || j.empty()) throw Error(Errc::config, "matrix: expected a non-empty array of rows");
  const int r = static_cast<int>(j.size()), c = static_cast<int>(j[0].size());
  Mat m(r, c);
  for (int i = 0; i < r; ++i) {
    if (static_cast<int>(j[i].size()) != c) throw Error(Errc::config, "matrix: ragged rows");
    for (int k = 0; k < c; ++k) m(i, k) = j[i][k].get<double>();
  }
  return m;
}

nlohmann::json cplx_json(cplx z) { return {z.real(), z.imag()}; }
cplx cplx_from_json(const nlohmann::json& j) { return {j.at(0).get<double>(), j.at(1).get<double>()}; }

nlohmann::json cmat_json(const CMat& m) { return {{"re", matrix_json(Mat(m.real()))}, {"im", matrix_json(Mat(m.imag()))}}; }
// Empty matrices are legal here (identity kernels carry no quadratic form).
CMat cmat_from_json(const nlohmann::json& j) {
  const auto& jr = j.at("re");
  if (jr.is_array() && jr.empty() && j.at("im").is_array() && j.at("im").empty()) return CMat(0, 0);
  const Mat re = mat_from_json(j.at("re")), im = mat_from_json(j.at("im"));
  if (re.rows() != im.rows() || re.cols() != im.cols()) throw Error(Errc::config, "complex matrix: part sizes differ");
  CMat m(re.rows(), re.cols());
  m.real() = re;
  m.imag() = im;
  return m;
}

nlohmann::json cvec_json(const CVec& v) {
  nlohmann::json re = nlohmann::json::array(), im = nlohmann::json::array();
  for (int i = 0; i < v.size(); ++i) {
    re.push_back(v[i].real());
    im.push_back(v[i].imag());
  }
  return {{"re", re}, {"im", im}};
}
CVec cvec_from_json(const nlohmann::json& j) {
  const auto& re = j.at("re");
  const auto& im = j.at("im");
  if (re.size() != im.size()) throw Error(Errc::config, "complex vector: part sizes differ");
  CVec v(re.size());
  for (size_t i = 0; i < re.size(); ++i) v[i] = cplx(re[i].get<double>(), im[i].get<double>());
  return v;
}

const char* kind_name(KernelKind k) {
  switch (k) {
    case KernelKind::regular: return "regular";
    case KernelKind::diagonal_delta: return "diagonal_delta";
    case KernelKind::identity: return "identity";
  }
  return "regular";
}

KernelKind kind_from_name(const std::string& s) {
  if (s == "regular") return KernelKind::regular;
  if (s == "diagonal_delta") return KernelKind::diagonal_delta;
  if (s == "identity") return KernelKind::identity;
  throw Error(Errc::config, "channel: unknown kernel kind '" + s + "'");
}

std::string long_str(long double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.21Le", v);
  return buf;
}

long double long_from(const nlohmann::json& j) {
  if (j.is_number()) return j.get<double>();
  const std::string s = j.get<std::string>();
  char* end = nullptr;
  const long double v = std::strtold(s.c_str(), &end);
  if (end == s.c_str() || *end != '\0') throw Error(Errc::config, "superop: bad number '" + s + "'");
  return v;
}

IVec ivec_from_json(const nlohmann::json& j) {
  IVec v(j.size());
  for (size_t i = 0; i < j.size(); ++i) v[i] = j[i].get<int>();
  return v;
}

}  // namespace

CodeSpec code_from_json(const nlohmann::json& j) {
  try {
    const Mat sigma = mat_from_json(j.at("sigma"));
    const auto dims = j.at("dims").get<std::vector<int>>();
    GkpCode code(sigma, dims, j.value("name", std::string("custom")));
    const nlohmann::json cell = j.value("cell", nlohmann::json{{"voronoi", nlohmann::json::object()}});
    if (cell.contains("box")) {
      std::vector<Interval> iv;
      for (const auto& p : cell["box"]) iv.push_back({p.at(0).get<double>(), p.at(1).get<double>()});
      return {code, PrimitiveCell::box(code, iv)};
    }
    if (cell.contains("voronoi")) return {code, PrimitiveCell::voronoi(code, cell["voronoi"].value("radius", 3))};
    throw Error(Errc::config, "code: cell must be \"box\" or \"voronoi\"");
  } catch (const nlohmann::json::exception& e) {
    throw Error(Errc::config, std::string("code: ") + e.what());
  }
}

CodeSpec load_code_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(Errc::config, "cannot read code file '" + path + "'");
  try {
    return code_from_json(nlohmann::json::parse(in));
  } catch (const nlohmann::json::parse_error& e) {
    throw Error(Errc::config, "code file '" + path + "': " + e.what());
  }
}

nlohmann::json to_json(const ChannelCharFn& c) {
  nlohmann::json terms = nlohmann::json::array();
  for (const auto& t : c.terms) {
    terms.push_back({{"weight", cplx_json(t.weight)},
                     {"kind", kind_name(t.kernel.kind)},
                     {"modes", t.kernel.modes},
                     {"amp", cplx_json(t.kernel.form.amp)},
                     {"Q", cmat_json(t.kernel.form.Q)},
                     {"l", cvec_json(t.kernel.form.l)}});
  }
  nlohmann::json j = {{"modes", c.modes}, {"terms", terms}};
  if (c.quadrature) j["quadrature"] = {{"phi", c.quadrature->phi}, {"weight", c.quadrature->weight}};
  return j;
}

ChannelCharFn channel_from_json(const nlohmann::json& j) {
  try {
    ChannelCharFn c;
    c.modes = j.at("modes").get<int>();
    for (const auto& t : j.at("terms")) {
      KernelTerm term;
      term.weight = cplx_from_json(t.at("weight"));
      term.kernel.kind = kind_from_name(t.at("kind").get<std::string>());
      term.kernel.modes = t.at("modes").get<int>();
      if (term.kernel.modes != c.modes) throw Error(Errc::dimension, "channel: term mode count differs");
      term.kernel.form.amp = cplx_from_json(t.at("amp"));
      term.kernel.form.Q = cmat_from_json(t.at("Q"));
      term.kernel.form.l = cvec_from_json(t.at("l"));
      if (term.kernel.form.Q.rows() != term.kernel.form.l.size())
        throw Error(Errc::dimension, "channel: Q and l sizes differ");
      c.terms.push_back(term);
    }
    if (j.contains("quadrature")) {
      PhaseQuadrature q;
      q.phi = j["quadrature"].at("phi").get<std::vector<double>>();
      q.weight = j["quadrature"].at("weight").get<std::vector<double>>();
      c.quadrature = q;
    }
    return c;
  } catch (const nlohmann::json::exception& e) {
    throw Error(Errc::config, std::string("channel: ") + e.what());
  }
}

nlohmann::json to_json(const LogicalSuperop& e) {
  nlohmann::json coeffs = nlohmann::json::array();
  for (const auto& [key, v] : e.coefficients())
    coeffs.push_back({{"s", key.first}, {"t", key.second}, {"re", long_str(v.real())}, {"im", long_str(v.imag())}});
  return {{"dims", e.dims()},
          {"s_max", e.s_max()},
          {"integration_error", e.integration_error},
          {"converged", e.converged},
          {"coefficients", coeffs}};
}

LogicalSuperop superop_from_json(const nlohmann::json& j) {
  try {
    LogicalSuperop e(j.at("dims").get<std::vector<int>>(), j.at("s_max").get<int>());
    for (const auto& c : j.at("coefficients"))
      e.add(ivec_from_json(c.at("s")), ivec_from_json(c.at("t")), cplxl(long_from(c.at("re")), long_from(c.at("im"))));
    e.integration_error = j.value("integration_error", 0.0);
    e.converged = j.value("converged", true);
    return e;
  } catch (const nlohmann::json::exception& ex) {
    throw Error(Errc::config, std::string("superop: ") + ex.what());
  }
}

std::vector<double> parse_list(const std::string& text) {
  std::vector<double> out;
  const std::string t = trim(text);
  if (t.empty()) return out;
  if (t.find(':') != std::string::npos) {
    std::vector<std::string> parts;
    std::stringstream ss(t);
    std::string p;
    while (std::getline(ss, p, ':')) parts.push_back(p);
    if (parts.size() != 3) throw Error(Errc::config, "config: range must be start:stop:step, got '" + t + "'");
    const double a = to_double("range", parts[0]), b = to_double("range", parts[1]), h = to_double("range", parts[2]);
    if (!(h > 0) || b < a) throw Error(Errc::config, "config: range needs step > 0 and stop >= start");
    const long count = std::lround(std::floor((b - a) / h + 1e-9)) + 1;
    if (count > 1000000) throw Error(Errc::config, "config: range too long");
    for (long i = 0; i < count; ++i) out.push_back(a + static_cast<double>(i) * h);
    return out;
  }
  std::stringstream ss(t);
  std::string p;
  while (std::getline(ss, p, ',')) {
    if (trim(p).empty()) throw Error(Errc::config, "config: empty list entry in '" + t + "'");
    out.push_back(to_double("list", p));
  }
  return out;
}

KeyValueConfig KeyValueConfig::parse(const std::string& text) {
  KeyValueConfig kv;
  std::stringstream ss(text);
  std::string line;
  int lineno = 0;
  while (std::getline(ss, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.resize(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw Error(Errc::config, "config line " + std::to_string(lineno) + ": expected key = value");
    const std::string key = trim(line.substr(0, eq));
    if (key.empty()) throw Error(Errc::config, "config line " + std::to_string(lineno) + ": empty key");
    if (kv.has(key)) throw Error(Errc::config, "config line " + std::to_string(lineno) + ": duplicate key '" + key + "'");
    kv.values_[key] = trim(line.substr(eq + 1));
  }
  return kv;
}

KeyValueConfig KeyValueConfig::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(Errc::config, "cannot read config file '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse(ss.str());
}

std::string KeyValueConfig::get_string(const std::string& key, const std::string& fallback) const {
  const auto it = values_.find(key);
  return it == values_.end() ? fallback : it->second;
}

int KeyValueConfig::get_int(const std::string& key, int fallback) const {
  const auto it = values_.find(key);
  return it == values_.end() ? fallback : to_int(key, it->second);
}

double KeyValueConfig::get_double(const std::string& key, double fallback) const {
  const auto it = values_.find(key);
  return it == values_.end() ? fallback : to_double(key, it->second);
}

bool KeyValueConfig::get_bool(const std::string& key, bool fallback) const {
  const auto it = values_.find(key);
  if (it == values_.end()) return fallback;
  const std::string& v = it->second;
  if (v == "true" || v == "1" || v == "yes" || v == "on") return true;
  if (v == "false" || v == "0" || v == "no" || v == "off") return false;
  throw Error(Errc::config, "config: '" + key + "' expects a boolean, got '" + v + "'");
}

std::vector<double> KeyValueConfig::get_list(const std::string& key, const std::vector<double>& fallback) const {
  const auto it = values_.find(key);
  return it == values_.end() ? fallback : parse_list(it->second);
}

void KeyValueConfig::require_known(const std::vector<std::string>& known) const {
  const std::set<std::string> ok(known.begin(), known.end());
  for (const auto& [k, v] : values_)
    if (!ok.count(k)) throw Error(Errc::config, "config: unknown key '" + k + "'");
}

KeyValueConfig resolve_config(const CommonFlags& flags) {
  KeyValueConfig kv = flags.config.empty() ? KeyValueConfig{} : KeyValueConfig::load(flags.config);
  if (flags.s_max >= 0) kv.set("s_max", std::to_string(flags.s_max));
  if (flags.threads >= 0) kv.set("threads", std::to_string(flags.threads));
  if (flags.quadrature_nodes >= 0) kv.set("quadrature_nodes", std::to_string(flags.quadrature_nodes));
  return kv;
}

SweepConfig sweep_config(const KeyValueConfig& kv) {
  kv.require_known({"code", "family", "delta_db", "params", "s_max", "quadrature_nodes", "baseline", "residual",
                    "threads"});
  SweepConfig c;
  c.code = kv.get_string("code", c.code);
  if (c.code != "square") throw Error(Errc::unsupported, "sweep: only the square code is supported");
  try {
    c.family = parse_noise_family(kv.get_string("family", "envelope"));
  } catch (const Error& e) {
    throw Error(Errc::config, std::string("config: ") + e.what());
  }
  if (!kv.has("delta_db")) throw Error(Errc::config, "config: 'delta_db' is required");
  c.delta_db = kv.get_list("delta_db", {});
  require_nonempty("delta_db", c.delta_db);
  c.params = kv.get_list("params", c.family == NoiseFamily::envelope ? std::vector<double>{0.0} : std::vector<double>{});
  require_nonempty("params", c.params);
  for (double p : c.params) {
    if (c.family == NoiseFamily::loss && !(p >= 0 && p < 1))
      throw Error(Errc::config, "config: loss parameters must lie in [0, 1)");
    if (!(p >= 0)) throw Error(Errc::config, "config: noise parameters must be non-negative");
  }
  c.s_max = kv.get_int("s_max", c.s_max);
  if (c.s_max < 0) throw Error(Errc::config, "config: 's_max' must be non-negative");
  c.quadrature_nodes = kv.get_int("quadrature_nodes", c.quadrature_nodes);
  require_positive("quadrature_nodes", c.quadrature_nodes);
  c.baseline = kv.get_bool("baseline", c.baseline);
  if (c.baseline && c.family != NoiseFamily::loss && c.family != NoiseFamily::dephasing)
    throw Error(Errc::config, "config: baselines exist for loss and dephasing only");
  c.residual = kv.get_bool("residual", c.residual);
  c.threads = kv.get_int("threads", c.threads);
  if (c.threads < 0) throw Error(Errc::config, "config: 'threads' must be non-negative");
  return c;
}

std::vector<PointSpec> sweep_points(const SweepConfig& cfg) {
  std::vector<PointSpec> pts;
  for (double p : cfg.params) {
    for (double db : cfg.delta_db) {
      PointSpec s;
      s.family = cfg.family;
      s.delta_db = db;
      s.param = p;
      s.s_max = cfg.s_max;
      s.quadrature_nodes = cfg.quadrature_nodes;
      s.residual = cfg.residual;
      pts.push_back(s);
    }
    if (cfg.baseline) {
      PointSpec s;
      s.family = cfg.family;
      s.param = p;
      s.delta_db = std::numeric_limits<double>::quiet_NaN();  // marks the baseline row
      pts.push_back(s);
    }
  }
  return pts;
}

std::vector<PointResult> run_sweep(const SweepConfig& cfg) {
  const auto pts = sweep_points(cfg);
  return ordered_parallel_map<PointResult>(pts.size(), cfg.threads, [&](size_t i) {
    const PointSpec& s = pts[i];
    return std::isnan(s.delta_db) ? baseline_point(s.family, s.param) : evaluate_point(s);
  });
}

std::string sci17(long double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.16Le", v);
  return buf;
}

void write_sweep_csv(std::ostream& os, const std::vector<PointResult>& rows) {
  os << "delta_db,nbar_est,noise_param,avg_gate_infidelity,tp_defect,min_choi_eig,smax_residual,baseline\n";
  for (const auto& r : rows) {
    os << sci17(r.delta_db) << ',' << sci17(r.nbar_est) << ',' << sci17(r.noise_param) << ',' << sci17(r.infidelity)
       << ',' << sci17(r.tp_defect) << ',' << sci17(r.min_choi_eig) << ','
       << (r.baseline ? std::string("nan") : sci17(r.smax_residual)) << ',' << (r.baseline ? 1 : 0) << '\n';
  }
}

BlochConfig bloch_config(const KeyValueConfig& kv) {
  kv.require_known({"delta_db", "s_max", "orthonormalize", "vacuum_row", "threads", "quadrature_nodes"});
  BlochConfig c;
  if (!kv.has("delta_db")) throw Error(Errc::config, "config: 'delta_db' is required");
  c.delta_db = kv.get_list("delta_db", {});
  require_nonempty("delta_db", c.delta_db);
  c.s_max = kv.get_int("s_max", c.s_max);
  if (c.s_max < 0) throw Error(Errc::config, "config: 's_max' must be non-negative");
  c.orthonormalize = kv.get_bool("orthonormalize", c.orthonormalize);
  c.vacuum_row = kv.get_bool("vacuum_row", c.vacuum_row);
  c.threads = kv.get_int("threads", c.threads);
  if (c.threads < 0) throw Error(Errc::config, "config: 'threads' must be non-negative");
  return c;
}

namespace {

const char* const kBlochStates[] = {"0", "1", "+", "-"};

CMat bloch_input(int i) {
  CVec v(2);
  const double h = 1 / std::sqrt(2.0);
  switch (i) {
    case 0: v << 1, 0; break;
    case 1: v << 0, 1; break;
    case 2: v << h, h; break;
    default: v << h, -h; break;
  }
  return v * v.adjoint();
}

}  // namespace

std::vector<BlochRow> run_bloch_trajectory(const BlochConfig& cfg) {
  static const GkpCode code = square_code();
  static const PrimitiveCell cell = PrimitiveCell::centered_box(code);
  auto per_delta = ordered_parallel_map<std::vector<BlochRow>>(cfg.delta_db.size(), cfg.threads, [&](size_t i) {
    const double db = cfg.delta_db[i];
    const double delta = delta_from_db(db);
    LogicalSuperop ch = logical_channel(code, cell, single(envelope_charfun(delta)), {cfg.s_max});
    if (cfg.orthonormalize) ch = lowdin_orthonormalize(ch).channel;
    std::vector<BlochRow> rows;
    for (int s = 0; s < 4; ++s) {
      const CMat out = ch.apply(bloch_input(s));
      const BlochResult b = bloch_and_octahedron(out / out.trace().real());
      rows.push_back({db, nbar_estimate(delta), kBlochStates[s], {b.r.x, b.r.y, b.r.z}, b.inside_octahedron});
    }
    return rows;
  });
  std::vector<BlochRow> out;
  for (auto& r : per_delta) out.insert(out.end(), r.begin(), r.end());
  if (cfg.vacuum_row) {
    // Every approximate codeword tends to the vacuum as Delta grows.
    const CMat vac = CMat::Ones(1, 1);
    DecodeOptions opt;
    opt.threads = cfg.threads;
    const BlochResult b = bloch_and_octahedron(ideal_decode(vac, cell, opt).rho);
    for (const char* s : kBlochStates)
      out.push_back({-std::numeric_limits<double>::infinity(), 0.0, s, {b.r.x, b.r.y, b.r.z}, b.inside_octahedron});
  }
  return out;
}

void write_bloch_csv(std::ostream& os, const std::vector<BlochRow>& rows) {
  os << "delta_db,nbar_est,state,r_x,r_y,r_z,inside_octahedron\n";
  for (const auto& r : rows)
    os << sci17(r.delta_db) << ',' << sci17(r.nbar_est) << ',' << r.state << ',' << sci17(r.r[0]) << ','
       << sci17(r.r[1]) << ',' << sci17(r.r[2]) << ',' << (r.inside ? 1 : 0) << '\n';
}

OracleConfig oracle_config(const KeyValueConfig& kv) {
  kv.require_known({"delta_db", "gamma", "cutoff", "j_max", "s_max", "nodes", "check_nodes", "tolerance", "threads",
                    "quadrature_nodes"});
  OracleConfig c;
  c.delta_db = kv.get_list("delta_db", c.delta_db);
  require_nonempty("delta_db", c.delta_db);
  c.gamma = kv.get_list("gamma", c.gamma);
  require_nonempty("gamma", c.gamma);
  for (double g : c.gamma)
    if (!(g >= 0 && g < 1)) throw Error(Errc::config, "config: gamma must lie in [0, 1)");
  c.options.cutoff = kv.get_int("cutoff", c.options.cutoff);
  require_positive("cutoff", c.options.cutoff);
  c.options.j_max = kv.get_int("j_max", c.options.j_max);
  if (c.options.j_max < 0) throw Error(Errc::config, "config: 'j_max' must be non-negative");
  c.options.s_max = kv.get_int("s_max", c.options.s_max);
  if (c.options.s_max < 0) throw Error(Errc::config, "config: 's_max' must be non-negative");
  c.options.decode.nodes = kv.get_int("nodes", c.options.decode.nodes);
  require_positive("nodes", c.options.decode.nodes);
  c.options.decode.check_nodes = kv.get_int("check_nodes", c.options.decode.check_nodes);
  c.tolerance = kv.get_double("tolerance", c.tolerance);
  c.threads = kv.get_int("threads", c.threads);
  if (c.threads < 0) throw Error(Errc::config, "config: 'threads' must be non-negative");
  return c;
}

std::vector<OracleResult> run_oracle_check(const OracleConfig& cfg) {
  std::vector<std::pair<double, double>> cases;
  for (double db : cfg.delta_db)
    for (double g : cfg.gamma) cases.emplace_back(db, g);
  OracleOptions opt = cfg.options;
  opt.decode.threads = 1;  // parallelism is over cases
  return ordered_parallel_map<OracleResult>(cases.size(), cfg.threads, [&](size_t i) {
    return oracle_loss_check(cases[i].first, cases[i].second, opt);
  });
}

nlohmann::json oracle_report(const OracleConfig& cfg, const std::vector<OracleResult>& results) {
  nlohmann::json cases = nlohmann::json::array();
  double worst = 0;
  for (const auto& r : results) {
    worst = std::max(worst, r.max_trace_distance);
    cases.push_back({{"delta_db", r.delta_db},
                     {"gamma", r.gamma},
                     {"trace_distance", r.trace_distance},
                     {"max_trace_distance", r.max_trace_distance},
                     {"grid_change", r.grid_change}});
  }
  return {{"cutoff", cfg.options.cutoff},
          {"j_max", cfg.options.j_max},
          {"s_max", cfg.options.s_max},
          {"inputs", {"0", "1", "+", "-", "+i", "-i"}},
          {"cases", cases},
          {"max_trace_distance", worst},
          {"tolerance", cfg.tolerance},
          {"pass", worst <= cfg.tolerance}};
}

GkpCode make_code(const std::string& name, double alpha) {
  if (name == "square") return square_code();
  if (name == "square2") return square_code_multi(2);
  if (name == "hexagonal") return hexagonal_code();
  if (name == "rectangular") return rectangular_code(alpha);
  if (name == "repetition") return repetition_code(3, alpha);
  throw Error(Errc::config, "unknown code '" + name + "'");
}

IMat clifford_by_name(const std::string& gate) {
  if (gate == "hadamard") return clifford_n_hadamard();
  if (gate == "phase") return clifford_n_phase();
  if (gate == "permutation") return clifford_n_permutation();
  if (gate == "cz") return clifford_n_cz();
  if (gate == "cz2") return clifford_n_cz() * clifford_n_cz();
  if (gate == "cnot") return clifford_n_cnot();
  throw Error(Errc::config, "unknown gate '" + gate + "'");
}

nlohmann::json lattice_report(const CodeSpec& spec) {
  const GkpCode& code = spec.code;
  const StandardForm sf = standard_form(code.stabilizer_basis().transpose());
  return {{"code", code.name()},
          {"modes", code.modes()},
          {"dims", code.dims()},
          {"sigma", matrix_json(code.sigma())},
          {"standard_form", {{"dims", sf.dims}, {"sigma", matrix_json(sf.sigma)}}},
          {"cells", {{"given", distances_json(spec.cell, 0)}}}};
}

nlohmann::json lattice_report(const std::string& name, double alpha) {
  const GkpCode code = make_code(name, alpha);
  const StandardForm sf = standard_form(code.stabilizer_basis().transpose());
  nlohmann::json j = {{"code", name},
                      {"modes", code.modes()},
                      {"dims", code.dims()},
                      {"sigma", matrix_json(code.sigma())},
                      {"standard_form", {{"dims", sf.dims}, {"sigma", matrix_json(sf.sigma)}}}};
  if (name == "rectangular" || name == "repetition") j["alpha"] = alpha;
  nlohmann::json cells = nlohmann::json::object();
  cells["voronoi"] = distances_json(PrimitiveCell::voronoi(code), 0);
  if (name == "repetition") {
    const PrimitiveCell concat = repetition_concatenated_cell(code);
    cells["concatenated"] = distances_json(concat, 0);
    cells["symmetric"] = distances_json(repetition_symmetric_cell(code), 0);
  } else if (code.modes() == 1 || name == "square2") {
    const Mat& mb = code.dual_basis();
    if ((mb - Mat(mb.diagonal().asDiagonal())).cwiseAbs().maxCoeff() < 1e-12)
      cells["box"] = distances_json(PrimitiveCell::centered_box(code), 0);
  }
  j["cells"] = cells;
  return j;
}

namespace {

nlohmann::json clifford_json(const GkpCode& code, const PrimitiveCell& cell, const std::string& gate) {
  const IMat n_a = clifford_by_name(gate);
  if (n_a.rows() != code.dim())
    throw Error(Errc::dimension, "gate '" + gate + "' acts on " + std::to_string(n_a.rows() / 2) +
                                     " mode(s) but the code has " + std::to_string(code.modes()));
  const Mat s_a = logical_symplectic(code, n_a);
  return {{"code", code.name()},
          {"gate", gate},
          {"n_a", matrix_json(n_a)},
          {"s_a", matrix_json(s_a)},
          {"symplectic", check_symplectic(s_a, 1e-9)},
          {"logical_unitary", matrix_json(clifford_unitary(code.dims(), n_a))},
          {"exit_fraction", sample_cell_exit_fraction(s_a, cell, 2000, 7)},
          {"invariant", is_cell_invariant(s_a, cell)}};
}

}  // namespace

nlohmann::json clifford_report(const CodeSpec& spec, const std::string& gate) {
  nlohmann::json j = clifford_json(spec.code, spec.cell, gate);
  j["cell"] = "given";
  return j;
}

nlohmann::json clifford_report(const std::string& name, double alpha, const std::string& gate,
                               const std::string& cell_kind) {
  const GkpCode code = make_code(name, alpha);
  const PrimitiveCell cell = cell_kind == "box"       ? PrimitiveCell::centered_box(code)
                             : cell_kind == "voronoi" ? PrimitiveCell::voronoi(code)
                                                      : throw Error(Errc::config, "unknown cell '" + cell_kind + "'");
  nlohmann::json j = clifford_json(code, cell, gate);
  j["code"] = name;
  j["cell"] = cell_kind;
  return j;
}

}  // namespace gkp::io
