#include <cmath>
#include <cstdlib>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <json.hpp>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "doctest.h"
#include "mfld/config.hpp"
#include "mfld/errors.hpp"
#include "mfld/experiment.hpp"
#include "mfld/io.hpp"
#include "mfld/manybody.hpp"
#include "mfld/measure.hpp"
#include "test_helpers.hpp"

using namespace mfld;
using mfld_test::TempDir;
using njson = nlohmann::ordered_json;

namespace {

struct Csv {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
};

Csv load_csv(const std::string& path) {
  std::ifstream in(path);
  REQUIRE(in.good());
  Csv out;
  std::string line;
  bool first = true;
  while (std::getline(in, line)) {
    std::vector<std::string> cells;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) cells.push_back(cell);
    if (first) {
      out.header = cells;
      first = false;
    } else {
      out.rows.push_back(cells);
    }
  }
  return out;
}

std::size_t column(const Csv& csv, const std::string& name) {
  for (std::size_t i = 0; i < csv.header.size(); ++i)
    if (csv.header[i] == name) return i;
  FAIL("missing column ", name);
  return 0;
}

njson load_json(const std::string& path) {
  std::ifstream in(path);
  REQUIRE(in.good());
  return njson::parse(in);
}

void check_record(const ExperimentRecord& rec, const std::string& dir,
                  const std::string& subcommand,
                  const std::vector<std::string>& expected_files) {
  CHECK(rec.success);
  CHECK(rec.subcommand == subcommand);
  std::set<std::string> names;
  for (const auto& a : rec.outputs) {
    names.insert(a.file);
    CHECK(a.hash == file_hash_hex(dir + "/" + a.file));
  }
  for (const auto& f : expected_files) CHECK(names.count(f) == 1);

  njson j = load_json(dir + "/record.json");
  CHECK(j.at("version").get<std::string>() == version_string());
  CHECK(j.at("subcommand").get<std::string>() == subcommand);
  CHECK(j.at("success").get<bool>());
  CHECK(j.at("outputs").size() == rec.outputs.size());
  CHECK(j.at("timings_seconds").contains("total"));
}

ExperimentConfig small_hartree_config(const std::string& dir) {
  ExperimentConfig c;
  c.points = 32;
  c.tau = 1e-2;
  c.times = {0.0, 0.1};
  c.output_directory = dir;
  return c;
}

}  // namespace

TEST_CASE("self test passes on a clean build") {
  SelfTestResult r = self_test(20260822u);
  CHECK(r.checks.size() == 21);
  CHECK(r.failures() == 0);
  CHECK(r.passed());
  CHECK(r.elapsed_seconds > 0);
  for (const auto& c : r.checks) {
    CAPTURE(c.name);
    CAPTURE(c.detail);
    CHECK(c.passed);
  }
}

TEST_CASE("injected K2 defect trips exactly the symmetry check") {
  SelfTestResult r = self_test(20260822u, true);
  CHECK(r.failures() == 1);
  for (const auto& c : r.checks) {
    CAPTURE(c.name);
    if (c.name == "kernel-K2-symmetry")
      CHECK_FALSE(c.passed);
    else
      CHECK(c.passed);
  }
}

TEST_CASE("hartree run writes consistent artifacts") {
  TempDir dir("hartree_run");
  ExperimentConfig c = small_hartree_config(dir.str());
  ExperimentRecord rec = run_hartree(c);
  check_record(rec, dir.str(), "hartree-run",
               {"hartree_trajectory.csv", "hartree_summary.json"});
  CHECK(parse_config(rec.config_text) == c);

  Csv traj = load_csv(dir.str() + "/hartree_trajectory.csv");
  CHECK(traj.header == std::vector<std::string>{"t", "x", "re", "im"});
  CHECK(traj.rows.size() == c.times.size() * static_cast<std::size_t>(c.points));

  njson s = load_json(dir.str() + "/hartree_summary.json");
  CHECK(s.at("grid").at("points").get<int>() == 32);
  CHECK(s.at("tau").get<double>() == c.tau);
  CHECK(s.at("max_norm_defect").get<double>() <= 1e-10);
  CHECK(s.at("max_energy_drift").get<double>() <= 1e-6);
  CHECK(s.at("samples").size() == c.times.size());
  for (const auto& sample : s.at("samples")) {
    CHECK(sample.contains("t"));
    CHECK(sample.contains("energy"));
    CHECK(sample.contains("h2_norm"));
  }
}

TEST_CASE("hartree run is byte reproducible") {
  TempDir dir_a("hartree_a");
  TempDir dir_b("hartree_b");
  ExperimentConfig ca = small_hartree_config(dir_a.str());
  ExperimentConfig cb = small_hartree_config(dir_b.str());
  ExperimentRecord ra = run_hartree(ca);
  ExperimentRecord rb = run_hartree(cb);
  REQUIRE(ra.outputs.size() == rb.outputs.size());
  for (std::size_t i = 0; i < ra.outputs.size(); ++i) {
    CHECK(ra.outputs[i].file == rb.outputs[i].file);
    CHECK(ra.outputs[i].hash == rb.outputs[i].hash);
  }
  CHECK(read_file(dir_a.str() + "/hartree_trajectory.csv") ==
        read_file(dir_b.str() + "/hartree_trajectory.csv"));
}

TEST_CASE("fluctuation run reports the backward solve per requested time") {
  TempDir dir("fluct_run");
  ExperimentConfig c;
  c.points = 16;
  c.tau = 5e-3;
  c.times = {0.0, 0.2};
  c.output_directory = dir.str();
  ExperimentRecord rec = run_fluctuation(c);
  check_record(rec, dir.str(), "fluctuation-run",
               {"fluctuation_norms.csv", "fluctuation_summary.json"});

  Csv norms = load_csv(dir.str() + "/fluctuation_norms.csv");
  CHECK(norms.header ==
        std::vector<std::string>{"t", "s", "norm", "orthogonality_defect"});
  CHECK(norms.rows.size() >= c.times.size());

  njson s = load_json(dir.str() + "/fluctuation_summary.json");
  CHECK(s.at("observable").at("op_norm").get<double>() == doctest::Approx(1.5));
  REQUIRE(s.at("samples").size() == 2);
  const njson& at0 = s.at("samples")[0];
  CHECK(at0.at("t").get<double>() == 0.0);
  CHECK(at0.at("sigma2").get<double>() ==
        doctest::Approx(at0.at("terminal_variance").get<double>()).epsilon(1e-13));
  for (const auto& sample : s.at("samples"))
    CHECK(sample.at("max_orthogonality_defect").get<double>() <= 1e-7);
}

TEST_CASE("oracle run tabulates the exact laws") {
  TempDir dir("oracle_run");
  ExperimentConfig c;
  c.points = 4;
  c.tau = 1e-2;
  c.times = {0.0, 0.1};
  c.n_values = {2, 3};
  c.lambda_min = 1e-2;
  c.lambda_max = 1e-1;
  c.lambda_count = 5;
  c.x_min = 0;
  c.x_max = 0.1;
  c.x_count = 3;
  c.output_directory = dir.str();
  ExperimentRecord rec = run_oracle(c);
  check_record(rec, dir.str(), "oracle-run",
               {"oracle_lmgf.csv", "oracle_tail.csv", "oracle_condensate.csv",
                "oracle_moments.csv", "oracle_manifest.json"});

  njson m = load_json(dir.str() + "/oracle_manifest.json");
  CHECK(m.at("tau").get<double>() == c.tau);
  REQUIRE(m.at("runs").size() == 2);
  CHECK(m.at("runs")[0].at("n").get<int>() == 2);
  CHECK(m.at("runs")[0].at("dimension").get<int>() == 10);
  CHECK(m.at("runs")[1].at("dimension").get<int>() == 20);
  for (const auto& run : m.at("runs")) {
    CHECK(run.at("norm_defect").get<double>() <= 1e-8);
    CHECK(run.at("krylov_steps").get<int>() >= 1);
  }

  // the lambda grid carries a leading zero entry on top of lambda_count points
  std::size_t n_lambdas = static_cast<std::size_t>(c.lambda_count) + 1;
  Csv lmgf = load_csv(dir.str() + "/oracle_lmgf.csv");
  CHECK(lmgf.header == std::vector<std::string>{"n", "t", "lambda", "lmgf"});
  CHECK(lmgf.rows.size() == c.n_values.size() * c.times.size() * n_lambdas);

  // recompute the t=0 law for n=2 and match the tabulated values exactly
  GridSpec g = make_grid(c);
  ComplexField phi0 = make_initial(c, g);
  Observable o = make_observable(c, g);
  SecondQuantizedHamiltonian h = build_hamiltonian(g, make_potential(c, g), 2);
  ManyBodyState psi = product_state(phi0, h.basis());
  SpectralMeasure law = observable_statistics(psi, o, expectation(o, phi0));
  std::size_t lam_col = column(lmgf, "lambda");
  std::size_t val_col = column(lmgf, "lmgf");
  std::size_t matched = 0;
  for (const auto& row : lmgf.rows) {
    if (row[column(lmgf, "n")] != "2" || std::strtod(row[column(lmgf, "t")].c_str(), nullptr) != 0.0)
      continue;
    double lam = std::strtod(row[lam_col].c_str(), nullptr);
    double val = std::strtod(row[val_col].c_str(), nullptr);
    CHECK(val == doctest::Approx(empirical_lmgf(law, lam)).epsilon(1e-12));
    ++matched;
  }
  CHECK(matched == n_lambdas);

  Csv cond = load_csv(dir.str() + "/oracle_condensate.csv");
  for (const auto& row : cond.rows) {
    double overlap = std::strtod(row[column(cond, "overlap")].c_str(), nullptr);
    CHECK(overlap > 0.99);
    CHECK(overlap <= 1.0 + 1e-12);
  }
}

TEST_CASE("compare run on the free chain reproduces the iid law") {
  TempDir dir("compare_free");
  ExperimentConfig c;
  c.points = 4;
  c.potential_kind = "zero";
  c.tau = 5e-3;
  c.times = {0.0, 0.2};
  c.n_values = {2, 3};
  c.lambda_min = 1e-2;
  c.lambda_max = 1e-1;
  c.lambda_count = 6;
  c.x_min = 0;
  c.x_max = 0.05;
  c.x_count = 3;
  c.output_directory = dir.str();
  ExperimentRecord rec = run_compare(c);
  check_record(rec, dir.str(), "compare",
               {"compare_lmgf.csv", "compare_rate.csv", "compare_chebyshev.csv",
                "compare_clt.csv", "compare_summary.json"});

  Csv lmgf = load_csv(dir.str() + "/compare_lmgf.csv");
  for (int n : c.n_values) {
    std::size_t col = column(lmgf, "residual_iid_n" + std::to_string(n));
    for (const auto& row : lmgf.rows)
      CHECK(std::abs(std::strtod(row[col].c_str(), nullptr)) <= 1e-8);
  }

  njson s = load_json(dir.str() + "/compare_summary.json");
  CHECK(s.at("t").get<double>() == 0.2);
  CHECK(s.at("lmgf").at("extrapolation_degree").get<int>() == 1);
  CHECK(s.at("bogoliubov").at("growth_rate").get<double>() ==
        doctest::Approx(0.0).epsilon(1e-9));
  CHECK(s.at("chebyshev").at("min_slack").get<double>() >= -1e-12);
  CHECK(s.at("chebyshev").at("entries").get<std::size_t>() ==
        c.n_values.size() * static_cast<std::size_t>((c.lambda_count + 1) * c.x_count));

  Csv cheb = load_csv(dir.str() + "/compare_chebyshev.csv");
  std::size_t slack_col = column(cheb, "slack");
  for (const auto& row : cheb.rows) {
    double slack = std::strtod(row[slack_col].c_str(), nullptr);
    if (std::isfinite(slack)) CHECK(slack >= -1e-12);
  }
}

TEST_CASE("rejected config still leaves a failure record behind") {
  TempDir dir("bad_config");
  ExperimentConfig c = small_hartree_config(dir.str());
  c.x_min = -0.5;
  CHECK_THROWS_AS(run_hartree(c), config_error);
  njson j = load_json(dir.str() + "/record.json");
  CHECK_FALSE(j.at("success").get<bool>());
  CHECK_FALSE(j.at("error").get<std::string>().empty());
  CHECK(j.at("outputs").empty());
}
