#include <cmath>
#include <fstream>

#include "doctest.h"
#include "mfld/config.hpp"
#include "mfld/io.hpp"
#include "test_helpers.hpp"

using namespace mfld;
using mfld_test::kPi;

TEST_CASE("config round-trips through its serialization") {
  ExperimentConfig def;
  CHECK(parse_config(serialize_config(def)) == def);

  ExperimentConfig c;
  c.dim = 2;
  c.points = 16;
  c.length = 5.5;
  c.potential_kind = "soft-coulomb";
  c.amplitude = 0.125;
  c.width = 1.3;
  c.regularizer = 0.07;
  c.wavenumber = 3;
  c.initial_kind = "mode-mixture";
  c.initial_center = 1.25;
  c.initial_width = 0.45;
  c.coefficients = {{0, 0.6, 0.0}, {1, 0.4, 0.2}, {-2, 0.1, -0.3}};
  c.observable_kind = "matrix";
  c.harmonics = {{1, 0.25}, {3, -0.5}};
  c.observable_center = 2.5;
  c.observable_width = 0.33;
  c.matrix_path = "obs.csv";
  c.tau = 2e-3;
  c.times = {0.0, 0.5, 1.5};
  c.n_values = {2, 4};
  c.oracle_tau = 5e-4;
  c.lambda_min = 1e-4;
  c.lambda_max = 0.2;
  c.lambda_count = 9;
  c.x_min = 0.01;
  c.x_max = 0.3;
  c.x_count = 7;
  c.c1 = 0.5;
  c.c2 = 2.0;
  c.output_directory = "elsewhere";
  c.seed = 999;
  CHECK(parse_config(serialize_config(c)) == c);
}

TEST_CASE("parsing tolerates comments and whitespace") {
  ExperimentConfig def;
  CHECK(parse_config("") == def);
  CHECK(parse_config("# just a comment\n\n   \n") == def);

  ExperimentConfig c = parse_config(
      "# leading comment\n"
      "[grid]\n"
      "  points   =  8 \n"
      "# interior comment\n"
      "[time]\n"
      "tau = 1e-2\n"
      "times = 0, 0.1\n");
  CHECK(c.points == 8);
  CHECK(c.tau == 1e-2);
  CHECK(c.times == std::vector<double>{0.0, 0.1});
  CHECK(c.length == def.length);
}

TEST_CASE("parse rejections") {
  CHECK_THROWS_AS(parse_config("[grid]\nbogus = 3\n"), config_error);
  CHECK_THROWS_AS(parse_config("[nosuch]\nkey = 1\n"), config_error);
  CHECK_THROWS_AS(parse_config("[grid]\npoints = eight\n"), config_error);
  CHECK_THROWS_AS(parse_config("[grid\npoints = 8\n"), config_error);
  CHECK_THROWS_AS(parse_config("points: 8\n"), config_error);
  CHECK_THROWS_AS(parse_config("[initial]\ncoefficients = 1:2\n"), config_error);
  CHECK_THROWS_AS(parse_config("[observable]\nharmonics = 1\n"), config_error);
  CHECK_THROWS_AS(load_config("/nonexistent/path.ini"), config_error);
}

TEST_CASE("config validation") {
  ExperimentConfig c;
  CHECK_NOTHROW(validate_config(c));

  ExperimentConfig bad = c;
  bad.points = 7;
  CHECK_THROWS_AS(validate_config(bad), config_error);
  bad = c;
  bad.tau = 0;
  CHECK_THROWS_AS(validate_config(bad), config_error);
  bad = c;
  bad.times = {0.0, 0.0015};
  CHECK_THROWS_AS(validate_config(bad), config_error);
  bad = c;
  bad.times = {0.5, 0.5};
  CHECK_THROWS_AS(validate_config(bad), config_error);
  bad = c;
  bad.times.clear();
  CHECK_THROWS_AS(validate_config(bad), config_error);
  bad = c;
  bad.lambda_min = 0.2;
  bad.lambda_max = 0.1;
  CHECK_THROWS_AS(validate_config(bad), config_error);
  bad = c;
  bad.x_min = -0.1;
  CHECK_THROWS_AS(validate_config(bad), config_error);
  bad = c;
  bad.c1 = 0;
  CHECK_THROWS_AS(validate_config(bad), config_error);
  bad = c;
  bad.output_directory.clear();
  CHECK_THROWS_AS(validate_config(bad), config_error);
  bad = c;
  bad.n_values = {2, 0};
  CHECK_THROWS_AS(validate_config(bad), config_error);
}

TEST_CASE("oracle validation") {
  ExperimentConfig c;
  CHECK_NOTHROW(validate_oracle_config(c));

  ExperimentConfig bad = c;
  bad.dim = 2;
  CHECK_THROWS_AS(validate_oracle_config(bad), config_error);
  bad = c;
  bad.points = 256;  // sector dimension far past the cap
  CHECK_THROWS_AS(validate_oracle_config(bad), config_error);
  bad = c;
  bad.n_values.clear();
  CHECK_THROWS_AS(validate_oracle_config(bad), config_error);
  bad = c;
  bad.oracle_tau = 3e-4;  // does not divide t = 1
  CHECK_THROWS_AS(validate_oracle_config(bad), config_error);
}

TEST_CASE("factories build the described objects") {
  ExperimentConfig c;
  GridSpec g = make_grid(c);
  CHECK(g.points == 6);
  CHECK(g.dim == 1);

  Potential v = make_potential(c, g);
  CHECK(v.kind == PotentialKind::gaussian);
  CHECK(v.amplitude == 0.25);

  ComplexField phi = make_initial(c, g);
  CHECK(std::abs(l2_norm(phi) - 1.0) <= 1e-12);

  Observable o = make_observable(c, g);
  CHECK(o.kind() == ObservableKind::multiplication);
  RealField want(g);
  for (int i = 0; i < g.points; ++i) {
    double x = g.coordinate(i);
    want[static_cast<std::size_t>(i)] =
        std::cos(2 * kPi * x / g.length) + 0.5 * std::cos(4 * kPi * x / g.length);
  }
  for (std::size_t i = 0; i < want.size(); ++i)
    CHECK(std::abs(o.matrix()(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(i)).real() -
                   want[i]) <= 1e-12);

  ExperimentConfig mix = c;
  mix.initial_kind = "mode-mixture";
  mix.coefficients = {{0, 1.0, 0.0}, {1, 0.5, 0.5}};
  ComplexField mixed = make_initial(mix, g);
  CHECK(std::abs(l2_norm(mixed) - 1.0) <= 1e-12);

  ExperimentConfig empty_mix = mix;
  empty_mix.coefficients.clear();
  CHECK_THROWS_AS(make_initial(empty_mix, g), config_error);

  ExperimentConfig zero = c;
  zero.potential_kind = "zero";
  CHECK(make_potential(zero, g).is_zero());
  ExperimentConfig cons = c;
  cons.potential_kind = "constant";
  Potential vc = make_potential(cons, g);
  for (std::size_t i = 0; i < vc.table.size(); ++i) CHECK(vc.table[i] == vc.table[0]);

  ExperimentConfig proj = c;
  proj.observable_kind = "projector";
  Observable po = make_observable(proj, g);
  CHECK(po.kind() == ObservableKind::rank_one);
  CHECK(std::abs(po.op_norm() - 1.0) <= 1e-10);

  ExperimentConfig unknown = c;
  unknown.observable_kind = "spin";
  CHECK_THROWS_AS(make_observable(unknown, g), config_error);
}

TEST_CASE("format_double round-trips exactly") {
  for (double x : {0.1, 1.0 / 3.0, 2.0, -7.25e-13, 6.283185307179586, 1e300, 0.0}) {
    CHECK(std::stod(format_double(x)) == x);
  }
  CHECK(format_double(2.0) == "2");
  CHECK(format_double(0.5) == "0.5");
}

TEST_CASE("csv writer emits exactly the cells") {
  mfld_test::TempDir dir("io_csv");
  std::string path = dir.str() + "/t.csv";
  write_csv(path, {"a", "b"}, {{"1", "2.5"}, {"-3", "x"}});
  CHECK(read_file(path) == "a,b\n1,2.5\n-3,x\n");
  CHECK_THROWS_AS(write_csv("/nonexistent/dir/t.csv", {"a"}, {}), parameter_error);
  CHECK_THROWS_AS(read_file(dir.str() + "/missing.csv"), parameter_error);
}

TEST_CASE("fnv1a64 is the reference hash") {
  CHECK(fnv1a64("") == 14695981039346656037ULL);
  CHECK(fnv1a64("abc") == 0xe71fa2190541574bULL);
  CHECK(fnv1a64("abc") != fnv1a64("abd"));

  mfld_test::TempDir dir("io_hash");
  std::string path = dir.str() + "/f.txt";
  {
    std::ofstream out(path);
    out << "abc";
  }
  std::string hex = file_hash_hex(path);
  CHECK(hex.size() == 16);
  CHECK(hex == "e71fa2190541574b");
}
