#include "mfld/config.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>

#include "mfld/io.hpp"
#include "mfld/manybody.hpp"

namespace mfld {

namespace {

std::string trim(const std::string& s) {
  std::size_t a = s.find_first_not_of(" \t\r");
  if (a == std::string::npos) return "";
  std::size_t b = s.find_last_not_of(" \t\r");
  return s.substr(a, b - a + 1);
}

double to_double(const std::string& s, const std::string& key) {
  const char* b = s.data();
  const char* e = b + s.size();
  double v;
  auto res = std::from_chars(b, e, v);
  if (res.ec != std::errc{} || res.ptr != e)
    throw config_error("config: bad number '" + s + "' for " + key);
  return v;
}

long to_long(const std::string& s, const std::string& key) {
  const char* b = s.data();
  const char* e = b + s.size();
  long v;
  auto res = std::from_chars(b, e, v);
  if (res.ec != std::errc{} || res.ptr != e)
    throw config_error("config: bad integer '" + s + "' for " + key);
  return v;
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : s) {
    if (c == sep) {
      out.push_back(trim(cur));
      cur.clear();
    } else {
      cur += c;
    }
  }
  out.push_back(trim(cur));
  while (!out.empty() && out.back().empty()) out.pop_back();
  return out;
}

double periodic_distance(double x, double c, double L) {
  double d = std::fmod(std::abs(x - c), L);
  return std::min(d, L - d);
}

}  // namespace

ExperimentConfig parse_config(const std::string& text) {
  ExperimentConfig c;
  std::vector<std::string> cleared;
  auto fresh = [&cleared](const std::string& key) {
    if (std::find(cleared.begin(), cleared.end(), key) != cleared.end()) return false;
    cleared.push_back(key);
    return true;
  };
  std::istringstream in(text);
  std::string line, section;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::size_t hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']')
        throw config_error("config: malformed section at line " + std::to_string(line_no));
      section = trim(line.substr(1, line.size() - 2));
      continue;
    }
    std::size_t eq = line.find('=');
    if (eq == std::string::npos)
      throw config_error("config: expected key = value at line " + std::to_string(line_no));
    std::string key = trim(line.substr(0, eq));
    std::string value = trim(line.substr(eq + 1));
    std::string full = section + "." + key;

    if (full == "grid.dim") c.dim = static_cast<int>(to_long(value, full));
    else if (full == "grid.points") c.points = static_cast<int>(to_long(value, full));
    else if (full == "grid.length") c.length = to_double(value, full);
    else if (full == "potential.kind") c.potential_kind = value;
    else if (full == "potential.amplitude") c.amplitude = to_double(value, full);
    else if (full == "potential.width") c.width = to_double(value, full);
    else if (full == "potential.regularizer") c.regularizer = to_double(value, full);
    else if (full == "potential.wavenumber") c.wavenumber = static_cast<int>(to_long(value, full));
    else if (full == "initial.kind") c.initial_kind = value;
    else if (full == "initial.center") c.initial_center = to_double(value, full);
    else if (full == "initial.width") c.initial_width = to_double(value, full);
    else if (full == "initial.coefficients") {
      if (fresh(full)) c.coefficients.clear();
      for (const auto& item : split(value, ',')) {
        auto parts = split(item, ':');
        if (parts.size() != 3) throw config_error("config: coefficients need mode:re:im");
        c.coefficients.push_back({static_cast<double>(to_long(parts[0], full)),
                                  to_double(parts[1], full), to_double(parts[2], full)});
      }
    } else if (full == "observable.kind") c.observable_kind = value;
    else if (full == "observable.harmonics") {
      if (fresh(full)) c.harmonics.clear();
      for (const auto& item : split(value, ',')) {
        auto parts = split(item, ':');
        if (parts.size() != 2) throw config_error("config: harmonics need index:amplitude");
        c.harmonics.emplace_back(static_cast<int>(to_long(parts[0], full)),
                                 to_double(parts[1], full));
      }
    } else if (full == "observable.center") c.observable_center = to_double(value, full);
    else if (full == "observable.width") c.observable_width = to_double(value, full);
    else if (full == "observable.path") c.matrix_path = value;
    else if (full == "time.tau") c.tau = to_double(value, full);
    else if (full == "time.times") {
      if (fresh(full)) c.times.clear();
      for (const auto& item : split(value, ',')) c.times.push_back(to_double(item, full));
    } else if (full == "oracle.n_values") {
      if (fresh(full)) c.n_values.clear();
      for (const auto& item : split(value, ','))
        c.n_values.push_back(static_cast<int>(to_long(item, full)));
    } else if (full == "oracle.tau") c.oracle_tau = to_double(value, full);
    else if (full == "lambda.min") c.lambda_min = to_double(value, full);
    else if (full == "lambda.max") c.lambda_max = to_double(value, full);
    else if (full == "lambda.count") c.lambda_count = static_cast<int>(to_long(value, full));
    else if (full == "x.min") c.x_min = to_double(value, full);
    else if (full == "x.max") c.x_max = to_double(value, full);
    else if (full == "x.count") c.x_count = static_cast<int>(to_long(value, full));
    else if (full == "envelopes.c1") c.c1 = to_double(value, full);
    else if (full == "envelopes.c2") c.c2 = to_double(value, full);
    else if (full == "output.directory") c.output_directory = value;
    else if (full == "output.seed") c.seed = static_cast<std::uint64_t>(to_long(value, full));
    else throw config_error("config: unknown key '" + full + "'");
  }
  return c;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw config_error("config: cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

std::string serialize_config(const ExperimentConfig& c) {
  std::ostringstream out;
  out << "[grid]\n";
  out << "dim = " << c.dim << "\n";
  out << "points = " << c.points << "\n";
  out << "length = " << format_double(c.length) << "\n";
  out << "\n[potential]\n";
  out << "kind = " << c.potential_kind << "\n";
  out << "amplitude = " << format_double(c.amplitude) << "\n";
  out << "width = " << format_double(c.width) << "\n";
  out << "regularizer = " << format_double(c.regularizer) << "\n";
  out << "wavenumber = " << c.wavenumber << "\n";
  out << "\n[initial]\n";
  out << "kind = " << c.initial_kind << "\n";
  out << "center = " << format_double(c.initial_center) << "\n";
  out << "width = " << format_double(c.initial_width) << "\n";
  out << "coefficients =";
  for (std::size_t i = 0; i < c.coefficients.size(); ++i) {
    out << (i ? ", " : " ") << static_cast<long>(c.coefficients[i][0]) << ":"
        << format_double(c.coefficients[i][1]) << ":" << format_double(c.coefficients[i][2]);
  }
  out << "\n";
  out << "\n[observable]\n";
  out << "kind = " << c.observable_kind << "\n";
  out << "harmonics =";
  for (std::size_t i = 0; i < c.harmonics.size(); ++i) {
    out << (i ? ", " : " ") << c.harmonics[i].first << ":"
        << format_double(c.harmonics[i].second);
  }
  out << "\n";
  out << "center = " << format_double(c.observable_center) << "\n";
  out << "width = " << format_double(c.observable_width) << "\n";
  if (!c.matrix_path.empty()) out << "path = " << c.matrix_path << "\n";
  out << "\n[time]\n";
  out << "tau = " << format_double(c.tau) << "\n";
  out << "times =";
  for (std::size_t i = 0; i < c.times.size(); ++i)
    out << (i ? ", " : " ") << format_double(c.times[i]);
  out << "\n";
  out << "\n[oracle]\n";
  out << "n_values =";
  for (std::size_t i = 0; i < c.n_values.size(); ++i)
    out << (i ? ", " : " ") << c.n_values[i];
  out << "\n";
  out << "tau = " << format_double(c.oracle_tau) << "\n";
  out << "\n[lambda]\n";
  out << "min = " << format_double(c.lambda_min) << "\n";
  out << "max = " << format_double(c.lambda_max) << "\n";
  out << "count = " << c.lambda_count << "\n";
  out << "\n[x]\n";
  out << "min = " << format_double(c.x_min) << "\n";
  out << "max = " << format_double(c.x_max) << "\n";
  out << "count = " << c.x_count << "\n";
  out << "\n[envelopes]\n";
  out << "c1 = " << format_double(c.c1) << "\n";
  out << "c2 = " << format_double(c.c2) << "\n";
  out << "\n[output]\n";
  out << "directory = " << c.output_directory << "\n";
  out << "seed = " << c.seed << "\n";
  return out.str();
}

void validate_config(const ExperimentConfig& c) {
  try {
    GridSpec probe(c.dim, c.points, c.length);
    (void)probe;
  } catch (const parameter_error& e) {
    throw config_error(std::string("config: ") + e.what());
  }
  if (!(c.tau > 0)) throw config_error("config: time.tau must be positive");
  if (c.times.empty()) throw config_error("config: time.times must be nonempty");
  double prev = -1;
  for (double t : c.times) {
    if (t < 0) throw config_error("config: times must be >= 0");
    if (t <= prev) throw config_error("config: times must be strictly increasing");
    prev = t;
    double ratio = t / c.tau;
    if (std::abs(ratio - std::llround(ratio)) > 1e-9 * std::max(1.0, ratio))
      throw config_error("config: tau must divide every requested time");
  }
  if (c.oracle_tau < 0) throw config_error("config: oracle.tau must be >= 0");
  for (int n : c.n_values)
    if (n < 1) throw config_error("config: oracle N values must be positive");
  if (!(c.lambda_min > 0) || !(c.lambda_max > c.lambda_min))
    throw config_error("config: need 0 < lambda.min < lambda.max");
  if (c.lambda_count < 2) throw config_error("config: lambda.count must be >= 2");
  if (!(c.x_max >= c.x_min) || c.x_min < 0)
    throw config_error("config: need 0 <= x.min <= x.max");
  if (c.x_count < 1) throw config_error("config: x.count must be >= 1");
  if (!(c.c1 > 0) || !(c.c2 > 0)) throw config_error("config: envelope constants must be > 0");
  if (c.output_directory.empty()) throw config_error("config: output.directory must be set");
}

void validate_oracle_config(const ExperimentConfig& c) {
  if (c.n_values.empty())
    throw config_error("config: oracle.n_values must list at least one particle number");
  if (c.dim != 1) throw config_error("config: the oracle needs a d=1 grid");
  int n_max = *std::max_element(c.n_values.begin(), c.n_values.end());
  try {
    FockBasis::dimension_for(c.points, n_max);
  } catch (const basis_size_error& e) {
    throw config_error(std::string("config: ") + e.what());
  }
  double otau = c.oracle_tau > 0 ? c.oracle_tau : c.tau;
  for (double t : c.times) {
    if (t == 0) continue;
    double ratio = t / otau;
    if (std::abs(ratio - std::llround(ratio)) > 1e-9 * std::max(1.0, ratio))
      throw config_error("config: oracle tau must divide every requested time");
  }
}

GridSpec make_grid(const ExperimentConfig& c) { return GridSpec(c.dim, c.points, c.length); }

Potential make_potential(const ExperimentConfig& c, const GridSpec& g) {
  if (c.potential_kind == "zero") return Potential::zero_potential(g);
  if (c.potential_kind == "gaussian") return Potential::gaussian(g, c.amplitude, c.width);
  if (c.potential_kind == "soft-coulomb")
    return Potential::soft_coulomb(g, c.amplitude, c.regularizer);
  if (c.potential_kind == "cosine") return Potential::cosine(g, c.amplitude, c.wavenumber);
  if (c.potential_kind == "constant") return Potential::constant(g, c.amplitude);
  throw config_error("config: unknown potential kind '" + c.potential_kind + "'");
}

ComplexField make_initial(const ExperimentConfig& c, const GridSpec& g) {
  ComplexField phi(g);
  if (c.initial_kind == "gaussian") {
    if (!(c.initial_width > 0)) throw config_error("config: initial.width must be positive");
    if (g.dim == 1) {
      for (int i = 0; i < g.points; ++i) {
        double d = periodic_distance(g.coordinate(i), c.initial_center, g.length);
        phi[i] = std::exp(-d * d / (2 * c.initial_width * c.initial_width));
      }
    } else {
      for (int i0 = 0; i0 < g.points; ++i0)
        for (int i1 = 0; i1 < g.points; ++i1) {
          double d0 = periodic_distance(g.coordinate(i0), c.initial_center, g.length);
          double d1 = periodic_distance(g.coordinate(i1), c.initial_center, g.length);
          phi[static_cast<std::size_t>(i0) * g.points + i1] =
              std::exp(-(d0 * d0 + d1 * d1) / (2 * c.initial_width * c.initial_width));
        }
    }
  } else if (c.initial_kind == "mode-mixture") {
    if (c.coefficients.empty())
      throw config_error("config: mode-mixture needs initial.coefficients");
    if (g.dim != 1) throw config_error("config: mode-mixture supports d=1 only");
    for (const auto& entry : c.coefficients) {
      int mode = static_cast<int>(entry[0]);
      cplx coeff(entry[1], entry[2]);
      for (int i = 0; i < g.points; ++i) {
        double phase = 2 * std::numbers::pi * mode * g.coordinate(i) / g.length;
        phi[i] += coeff * std::polar(1.0, phase);
      }
    }
  } else {
    throw config_error("config: unknown initial kind '" + c.initial_kind + "'");
  }
  double n = l2_norm(phi);
  if (!(n > 0)) throw config_error("config: initial field is identically zero");
  scale(phi, 1.0 / n);
  return phi;
}

Observable make_observable(const ExperimentConfig& c, const GridSpec& g) {
  if (c.observable_kind == "identity") return Observable::identity(g);
  if (c.observable_kind == "cosine") {
    if (c.harmonics.empty()) throw config_error("config: cosine observable needs harmonics");
    if (g.dim != 1) throw config_error("config: cosine observable supports d=1 only");
    RealField f(g);
    for (int i = 0; i < g.points; ++i) {
      double acc = 0;
      for (const auto& [j, a] : c.harmonics)
        acc += a * std::cos(2 * std::numbers::pi * j * g.coordinate(i) / g.length);
      f[i] = acc;
    }
    return Observable::multiplication(std::move(f));
  }
  if (c.observable_kind == "gaussian-bump" || c.observable_kind == "projector") {
    if (!(c.observable_width > 0))
      throw config_error("config: observable.width must be positive");
    ComplexField bump(g);
    if (g.dim == 1) {
      for (int i = 0; i < g.points; ++i) {
        double d = periodic_distance(g.coordinate(i), c.observable_center, g.length);
        bump[i] = std::exp(-d * d / (2 * c.observable_width * c.observable_width));
      }
    } else {
      for (int i0 = 0; i0 < g.points; ++i0)
        for (int i1 = 0; i1 < g.points; ++i1) {
          double d0 = periodic_distance(g.coordinate(i0), c.observable_center, g.length);
          double d1 = periodic_distance(g.coordinate(i1), c.observable_center, g.length);
          bump[static_cast<std::size_t>(i0) * g.points + i1] =
              std::exp(-(d0 * d0 + d1 * d1) / (2 * c.observable_width * c.observable_width));
        }
    }
    if (c.observable_kind == "projector") {
      normalize(bump);
      return Observable::rank_one(bump);
    }
    RealField f(g);
    for (std::size_t i = 0; i < f.size(); ++i) f[i] = bump[i].real();
    return Observable::multiplication(std::move(f));
  }
  if (c.observable_kind == "matrix") {
    if (c.matrix_path.empty()) throw config_error("config: matrix observable needs a path");
    return Observable::from_csv(g, c.matrix_path);
  }
  throw config_error("config: unknown observable kind '" + c.observable_kind + "'");
}

}  // namespace mfld
