#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include <gtest/gtest.h>

#include "io/gkp_io.hpp"

using namespace gkp;
using namespace gkp::io;

namespace {

std::vector<std::string> lines(const std::string& s) {
  std::vector<std::string> out;
  std::istringstream is(s);
  for (std::string l; std::getline(is, l);) out.push_back(l);
  return out;
}

std::vector<std::string> fields(const std::string& line) {
  std::vector<std::string> out;
  std::istringstream is(line);
  for (std::string f; std::getline(is, f, ',');) out.push_back(f);
  return out;
}

std::string sweep_csv(const std::string& cfg_text) {
  std::ostringstream os;
  write_sweep_csv(os, run_sweep(sweep_config(KeyValueConfig::parse(cfg_text))));
  return os.str();
}

std::vector<long double> infidelity_column(const std::string& csv) {
  std::vector<long double> out;
  const auto ls = lines(csv);
  for (size_t i = 1; i < ls.size(); ++i) out.push_back(std::strtold(fields(ls[i])[3].c_str(), nullptr));
  return out;
}

std::string temp_path(const std::string& name) { return ::testing::TempDir() + name; }

int run_cli(const std::string& args) {
  const std::string cmd = std::string(GKPSIM_PATH) + " " + args + " >/dev/null 2>&1";
  const int rc = std::system(cmd.c_str());
  return WIFEXITED(rc) ? WEXITSTATUS(rc) : -1;
}

Errc config_error(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "no error thrown";
  return Errc::domain;
}

}  // namespace

TEST(Config, ParsesKeysListsAndRanges) {
  const auto kv = KeyValueConfig::parse("# header\nfamily = loss  # trailing\n delta_db = 6:12:2\nparams=0.01, 0.05\n\nbaseline = true\n");
  EXPECT_EQ(kv.get_string("family", ""), "loss");
  EXPECT_EQ(kv.get_list("delta_db", {}), (std::vector<double>{6, 8, 10, 12}));
  EXPECT_EQ(kv.get_list("params", {}), (std::vector<double>{0.01, 0.05}));
  EXPECT_TRUE(kv.get_bool("baseline", false));
  EXPECT_EQ(kv.get_int("s_max", 3), 3);
}

TEST(Config, RangeEndpointIsInclusiveUnderRounding) {
  EXPECT_EQ(parse_list("0.1:0.3:0.1").size(), 3u);
  EXPECT_EQ(parse_list("6:30.8:0.8").back(), 30.8);
}

TEST(Config, Errors) {
  EXPECT_EQ(config_error([] { KeyValueConfig::parse("a = 1\na = 2\n"); }), Errc::config);
  EXPECT_EQ(config_error([] { KeyValueConfig::parse("just words\n"); }), Errc::config);
  EXPECT_EQ(config_error([] { KeyValueConfig::parse("x = abc").get_double("x", 0); }), Errc::config);
  EXPECT_EQ(config_error([] { KeyValueConfig::parse("x = 1.5").get_int("x", 0); }), Errc::config);
  EXPECT_EQ(config_error([] { parse_list("3:1:1"); }), Errc::config);
  EXPECT_EQ(config_error([] { parse_list("1,,2"); }), Errc::config);
  EXPECT_EQ(config_error([] { sweep_config(KeyValueConfig::parse("delta_db = 10\ncolour = red\n")); }), Errc::config);
  EXPECT_EQ(config_error([] { sweep_config(KeyValueConfig::parse("family = loss\n")); }), Errc::config);
  EXPECT_EQ(config_error([] { sweep_config(KeyValueConfig::parse("family = loss\ndelta_db = 10\nparams = 1.0\n")); }),
            Errc::config);
  EXPECT_EQ(config_error([] { sweep_config(KeyValueConfig::parse("family = sparkle\ndelta_db = 10\n")); }),
            Errc::config);
  EXPECT_EQ(config_error([] { sweep_config(KeyValueConfig::parse("delta_db = 10\nbaseline = true\n")); }), Errc::config);
  EXPECT_EQ(config_error([] { KeyValueConfig::load(temp_path("does-not-exist.cfg")); }), Errc::config);
}

TEST(Config, FlagsOverrideFile) {
  const std::string path = temp_path("flags.cfg");
  std::ofstream(path) << "delta_db = 10\ns_max = 1\nthreads = 1\n";
  CommonFlags f;
  f.config = path;
  f.s_max = 3;
  const auto c = sweep_config(resolve_config(f));
  EXPECT_EQ(c.s_max, 3);
  EXPECT_EQ(c.threads, 1);
}

TEST(Sweep, BaselineRowClosesEachParameterBlock) {
  const auto c = sweep_config(KeyValueConfig::parse("family = loss\ndelta_db = 8, 10\nparams = 0.01, 0.02\nbaseline = true\n"));
  const auto pts = sweep_points(c);
  ASSERT_EQ(pts.size(), 6u);
  for (size_t i = 0; i < pts.size(); ++i) {
    EXPECT_EQ(std::isnan(pts[i].delta_db), i % 3 == 2) << i;
    EXPECT_EQ(pts[i].param, i < 3 ? 0.01 : 0.02);
  }
}

TEST(Sweep, CsvShapeAndBaselineFlag) {
  const std::string csv = sweep_csv("family = loss\ndelta_db = 8, 10\nparams = 0.01\nbaseline = true\nthreads = 1\n");
  const auto ls = lines(csv);
  ASSERT_EQ(ls.size(), 4u);
  EXPECT_EQ(ls[0], "delta_db,nbar_est,noise_param,avg_gate_infidelity,tp_defect,min_choi_eig,smax_residual,baseline");
  int baselines = 0;
  for (size_t i = 1; i < ls.size(); ++i) {
    const auto f = fields(ls[i]);
    ASSERT_EQ(f.size(), 8u);
    if (f[7] == "1") {
      ++baselines;
      EXPECT_EQ(f[0], "nan");
    }
  }
  EXPECT_EQ(baselines, 1);
  EXPECT_EQ(fields(ls[1])[0], "8.0000000000000000e+00");
}

TEST(Sweep, DeterministicAcrossThreadCounts) {
  const std::string base = "family = dephasing\ndelta_db = 6:12:2\nparams = 0.001\nquadrature_nodes = 16\nbaseline = true\n";
  EXPECT_EQ(sweep_csv(base + "threads = 1\n"), sweep_csv(base + "threads = 3\n"));
}

TEST(Sweep, EnvelopeMonotoneDecreasing) {
  const auto inf = infidelity_column(sweep_csv("delta_db = 4:20:2\nthreads = 1\n"));
  for (size_t i = 1; i < inf.size(); ++i) EXPECT_LT(inf[i], inf[i - 1]);
}

TEST(Sweep, LossHasInteriorOptimum) {
  const auto inf = infidelity_column(sweep_csv("family = loss\ndelta_db = 4:24:2\nparams = 0.05\nresidual = false\n"));
  const auto it = std::min_element(inf.begin(), inf.end());
  EXPECT_NE(it, inf.begin());
  EXPECT_NE(it, inf.end() - 1);
}

TEST(Sweep, DephasingHasInteriorOptimum) {
  const auto inf =
      infidelity_column(sweep_csv("family = dephasing\ndelta_db = 4:16:2\nparams = 0.001\nresidual = false\n"));
  const auto it = std::min_element(inf.begin(), inf.end());
  EXPECT_NE(it, inf.begin());
  EXPECT_NE(it, inf.end() - 1);
}

TEST(Bloch, LargeSqueezingReachesPureTargets) {
  BlochConfig c;
  c.delta_db = {30};
  c.vacuum_row = false;
  c.threads = 1;
  const auto rows = run_bloch_trajectory(c);
  ASSERT_EQ(rows.size(), 4u);
  const double want[4][3] = {{0, 0, 1}, {0, 0, -1}, {1, 0, 0}, {-1, 0, 0}};
  for (int s = 0; s < 4; ++s)
    for (int j = 0; j < 3; ++j) EXPECT_NEAR(rows[s].r[j], want[s][j], 1e-6) << rows[s].state;
}

TEST(Bloch, PlusAndZeroRowsExchangeXAndZ) {
  BlochConfig c;
  c.delta_db = {3, 6, 9};
  c.threads = 1;
  const auto rows = run_bloch_trajectory(c);
  ASSERT_EQ(rows.size(), 16u);
  for (size_t i = 0; i < rows.size(); i += 4) {
    EXPECT_NEAR(rows[i].r[0], rows[i + 2].r[2], 1e-12);
    EXPECT_NEAR(rows[i].r[2], rows[i + 2].r[0], 1e-12);
  }
  // Vacuum limit rows close the trajectory outside the octahedron.
  EXPECT_TRUE(std::isinf(rows.back().delta_db));
  EXPECT_FALSE(rows.back().inside);
}

TEST(Reports, RepetitionEqualDistances) {
  const auto j = lattice_report("repetition", std::pow(3.0, -0.25));
  const double x = j["cells"]["voronoi"]["X"].get<double>(), z = j["cells"]["voronoi"]["Z"].get<double>();
  EXPECT_NEAR(x, z, 1e-12);
  EXPECT_NEAR(j["cells"]["symmetric"]["X"].get<double>(), std::pow(3.0, -0.25) / 2, 1e-12);
  EXPECT_EQ(j["standard_form"]["dims"], nlohmann::json({2, 1, 1}));
}

TEST(Reports, CliffordVerdicts) {
  EXPECT_TRUE(clifford_report("square", 1, "hadamard", "voronoi")["invariant"].get<bool>());
  EXPECT_FALSE(clifford_report("square", 1, "phase", "voronoi")["invariant"].get<bool>());
  EXPECT_FALSE(clifford_report("square2", 1, "cz2", "voronoi")["invariant"].get<bool>());
  EXPECT_TRUE(clifford_report("hexagonal", 1, "permutation", "voronoi")["invariant"].get<bool>());
  EXPECT_FALSE(clifford_report("hexagonal", 1, "hadamard", "voronoi")["invariant"].get<bool>());
  EXPECT_EQ(config_error([] { clifford_report("square", 1, "teleport", "voronoi"); }), Errc::config);
  EXPECT_EQ(config_error([] { clifford_report("square", 1, "cnot", "voronoi"); }), Errc::dimension);
}

TEST(Reports, CodeFileDefinition) {
  const double r = 1 / std::sqrt(2.0);
  const auto spec = code_from_json(nlohmann::json::parse(R"({"sigma": [[1, 0], [0, 1]], "dims": [2], "name": "sq",
      "cell": {"box": [[-0.35355339059327373, 0.35355339059327373], [-0.35355339059327373, 0.35355339059327373]]}})"));
  EXPECT_EQ(spec.cell.kind(), CellKind::box);
  const auto j = lattice_report(spec);
  EXPECT_NEAR(j["cells"]["given"]["any"].get<double>(), r / 2, 1e-12);
  EXPECT_TRUE(clifford_report(spec, "hadamard")["invariant"].get<bool>());
  EXPECT_EQ(config_error([] { code_from_json(nlohmann::json::parse(R"({"sigma": [[2, 0], [0, 1]], "dims": [2]})")); }),
            Errc::invalid_lattice);
}

TEST(Serialization, ChannelRoundTrip) {
  const ChannelCharFn chans[] = {compose(loss_charfun(0.1), single(envelope_charfun(0.5))),
                                 random_displacement_charfun(0.2), dephased_envelope_charfun(0.05, 0.4, 8),
                                 single(identity_kernel(1))};
  for (const ChannelCharFn& c : chans) {
    const ChannelCharFn d = channel_from_json(nlohmann::json::parse(to_json(c).dump()));
    Vec u(2), v(2);
    u << 0.1, -0.2;
    v << 0.05, 0.3;
    EXPECT_EQ(c.evaluate(u, v), d.evaluate(u, v));
    EXPECT_EQ(c.diagonal(u), d.diagonal(u));
    EXPECT_EQ(c.quadrature.has_value(), d.quadrature.has_value());
  }
}

TEST(Serialization, SuperopRoundTripIsExact) {
  const GkpCode sq = square_code();
  const LogicalSuperop e =
      logical_channel(sq, PrimitiveCell::centered_box(sq), single(envelope_charfun(delta_from_db(25))), {1});
  const LogicalSuperop f = superop_from_json(nlohmann::json::parse(to_json(e).dump()));
  EXPECT_EQ(f.dims(), e.dims());
  EXPECT_EQ(f.s_max(), e.s_max());
  ASSERT_EQ(f.coefficients().size(), e.coefficients().size());
  for (const auto& [k, v] : e.coefficients()) EXPECT_EQ(f.coefficients().at(k), v);
  EXPECT_EQ(config_error([] { superop_from_json(nlohmann::json::parse(R"({"dims": [2]})")); }), Errc::config);
}

TEST(Formatting, Sci17) {
  EXPECT_EQ(sci17(1.0L), "1.0000000000000000e+00");
  EXPECT_EQ(sci17(-2.5e-300L), "-2.5000000000000000e-300");
  EXPECT_EQ(sci17(std::numeric_limits<long double>::quiet_NaN()), "nan");
}

TEST(ParallelMap, OrderAndLowestIndexError) {
  const auto sq = ordered_parallel_map<int>(50, 4, [](size_t i) { return static_cast<int>(i * i); });
  for (size_t i = 0; i < sq.size(); ++i) EXPECT_EQ(sq[i], static_cast<int>(i * i));
  try {
    ordered_parallel_map<int>(20, 4, [](size_t i) -> int {
      if (i % 7 == 3) throw std::runtime_error("bad " + std::to_string(i));
      return 0;
    });
    FAIL();
  } catch (const std::runtime_error& e) {
    EXPECT_STREQ(e.what(), "bad 3");
  }
}

TEST(Binary, ExitCodes) {
  EXPECT_EQ(run_cli("lattice-report --code hexagonal"), 0);
  EXPECT_EQ(run_cli("lattice-report --code nonsense"), 2);
  EXPECT_EQ(run_cli("sweep --config " + temp_path("missing.cfg")), 2);
  EXPECT_NE(run_cli("--no-such-flag"), 0);
  const std::string out = temp_path("report.json");
  ASSERT_EQ(run_cli("clifford-check --code square --gate hadamard --out " + out), 0);
  std::ifstream in(out);
  const auto j = nlohmann::json::parse(in);
  EXPECT_TRUE(j["invariant"].get<bool>());
}
