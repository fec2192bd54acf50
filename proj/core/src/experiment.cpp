#include "mfld/experiment.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <json.hpp>
#include <limits>
#include <random>

#include "mfld/fluctuation.hpp"
#include "mfld/hartree.hpp"
#include "mfld/io.hpp"
#include "mfld/ldp.hpp"
#include "mfld/manybody.hpp"

namespace mfld {

namespace {

using njson = nlohmann::ordered_json;
using steady = std::chrono::steady_clock;

constexpr int kExtrapolationDegree = 3;
constexpr double kDerivativeStep = 1e-4;
constexpr double kResidualFloor = 1e-13;

double seconds_since(steady::time_point t0) {
  return std::chrono::duration<double>(steady::now() - t0).count();
}

njson json_number(double v) {
  if (std::isfinite(v)) return v;
  return format_double(v);
}

std::string cell(double v) { return format_double(v); }

std::vector<double> uniform_grid(double lo, double hi, int count) {
  std::vector<double> out;
  out.reserve(count);
  if (count == 1) {
    out.push_back(lo);
    return out;
  }
  for (int i = 0; i < count; ++i)
    out.push_back(lo + (hi - lo) * static_cast<double>(i) / (count - 1));
  return out;
}

void emit_csv(ExperimentRecord& rec, const std::string& dir, const std::string& name,
              const std::vector<std::string>& header,
              const std::vector<std::vector<std::string>>& rows) {
  std::string path = dir + "/" + name;
  write_csv(path, header, rows);
  rec.outputs.push_back({name, file_hash_hex(path)});
}

void emit_json(ExperimentRecord& rec, const std::string& dir, const std::string& name,
               const njson& j) {
  std::string path = dir + "/" + name;
  std::ofstream out(path, std::ios::binary);
  if (!out) throw dependency_error("cannot write " + path);
  out << j.dump(2) << '\n';
  out.close();
  rec.outputs.push_back({name, file_hash_hex(path)});
}

void note(ExperimentRecord& rec, const std::string& key, double v) {
  rec.diagnostics.emplace_back(key, format_double(v));
}

template <class Body>
ExperimentRecord run_guarded(const ExperimentConfig& c, const char* subcommand, Body&& body) {
  ExperimentRecord rec;
  rec.version = version_string();
  rec.subcommand = subcommand;
  rec.config_text = serialize_config(c);
  auto t0 = steady::now();
  try {
    validate_config(c);
    std::filesystem::create_directories(c.output_directory);
    body(rec);
    rec.success = true;
  } catch (const std::exception& e) {
    rec.error = e.what();
    rec.timings.emplace_back("total", seconds_since(t0));
    try {
      std::filesystem::create_directories(c.output_directory);
      write_record(rec, c.output_directory);
    } catch (...) {
    }
    throw;
  }
  rec.timings.emplace_back("total", seconds_since(t0));
  write_record(rec, c.output_directory);
  return rec;
}

njson grid_json(const GridSpec& g) {
  return njson{{"dim", g.dim}, {"points", g.points}, {"length", g.length}};
}

// Site vector of the Hartree field in the oracle's l2 convention.
Eigen::VectorXcd site_vector(const ComplexField& phi) {
  double root_h = std::sqrt(phi.grid.cell_volume());
  Eigen::VectorXcd u(static_cast<Eigen::Index>(phi.size()));
  for (std::size_t i = 0; i < phi.size(); ++i) u[static_cast<Eigen::Index>(i)] = root_h * phi[i];
  u /= u.norm();
  return u;
}

struct OracleSlice {
  int n = 0;
  std::size_t dimension = 0;
  double t = 0;
  double mean_ref = 0;
  SpectralMeasure law;
  std::vector<double> moments;
  double condensate = 0;
  EvolveReport report;
};

// Evolves the product state of phi0 through the requested times for one N
// and collects the exact law of the centered observable at each of them.
std::vector<OracleSlice> oracle_sweep_one_n(const ExperimentConfig& c, const GridSpec& g,
                                            const Potential& v, const ComplexField& phi0,
                                            const Observable& o, const HartreeTrajectory& traj,
                                            int n) {
  double otau = c.oracle_tau > 0 ? c.oracle_tau : c.tau;
  SecondQuantizedHamiltonian h = build_hamiltonian(g, v, n);
  ManyBodyState psi = product_state(phi0, h.basis());
  EvolveReport total;
  std::vector<OracleSlice> out;
  double prev = 0;
  for (double t : c.times) {
    if (t > prev) {
      EvolveReport rep;
      psi = evolve_exact(psi, h, t - prev, otau, &rep);
      total.steps += rep.steps;
      total.max_subdivisions = std::max(total.max_subdivisions, rep.max_subdivisions);
      total.norm_defect = std::max(total.norm_defect, rep.norm_defect);
      total.energy_drift = std::max(total.energy_drift, rep.energy_drift);
      prev = t;
    }
    OracleSlice slice;
    slice.n = n;
    slice.dimension = h.basis()->dimension();
    slice.t = t;
    slice.mean_ref = expectation(o, traj.at_time(t));
    slice.law = observable_statistics(psi, o, slice.mean_ref);
    slice.moments = observable_moments(psi, o, slice.mean_ref, 4);
    Eigen::MatrixXcd gamma = reduced_density(psi);
    Eigen::VectorXcd u = site_vector(traj.at_time(t));
    slice.condensate = (u.adjoint() * gamma * u)(0, 0).real();
    slice.report = total;
    out.push_back(std::move(slice));
  }
  return out;
}

}  // namespace

const char* version_string() { return "meanfield-ldp 0.1.0"; }

int SelfTestResult::failures() const {
  int n = 0;
  for (const auto& ck : checks)
    if (!ck.passed) ++n;
  return n;
}

void write_record(const ExperimentRecord& rec, const std::string& directory) {
  njson j;
  j["version"] = rec.version;
  j["subcommand"] = rec.subcommand;
  j["success"] = rec.success;
  if (!rec.error.empty()) j["error"] = rec.error;
  j["config"] = rec.config_text;
  njson outs = njson::array();
  for (const auto& a : rec.outputs) outs.push_back(njson{{"file", a.file}, {"hash", a.hash}});
  j["outputs"] = outs;
  njson diag = njson::object();
  for (const auto& [k, v] : rec.diagnostics) diag[k] = v;
  j["diagnostics"] = diag;
  njson times = njson::object();
  for (const auto& [k, v] : rec.timings) times[k] = v;
  j["timings_seconds"] = times;
  std::string path = directory + "/record.json";
  std::ofstream out(path, std::ios::binary);
  if (!out) throw dependency_error("cannot write " + path);
  out << j.dump(2) << '\n';
}

ExperimentRecord run_hartree(const ExperimentConfig& c) {
  return run_guarded(c, "hartree-run", [&](ExperimentRecord& rec) {
    GridSpec g = make_grid(c);
    Potential v = make_potential(c, g);
    ComplexField phi0 = make_initial(c, g);
    auto t0 = steady::now();
    HartreeTrajectory traj = evolve_hartree(phi0, v, c.times.back(), c.tau);
    rec.timings.emplace_back("evolve", seconds_since(t0));

    std::vector<std::string> header =
        g.dim == 1 ? std::vector<std::string>{"t", "x", "re", "im"}
                   : std::vector<std::string>{"t", "x0", "x1", "re", "im"};
    std::vector<std::vector<std::string>> rows;
    for (double t : c.times) {
      const ComplexField& phi = traj.at_time(t);
      for (std::size_t i = 0; i < phi.size(); ++i) {
        std::vector<std::string> row;
        row.push_back(cell(t));
        if (g.dim == 1) {
          row.push_back(cell(g.coordinate(static_cast<int>(i))));
        } else {
          row.push_back(cell(g.coordinate(static_cast<int>(i) / g.points)));
          row.push_back(cell(g.coordinate(static_cast<int>(i) % g.points)));
        }
        row.push_back(cell(phi[i].real()));
        row.push_back(cell(phi[i].imag()));
        rows.push_back(std::move(row));
      }
    }
    emit_csv(rec, c.output_directory, "hartree_trajectory.csv", header, rows);

    njson summary;
    summary["version"] = version_string();
    summary["grid"] = grid_json(g);
    summary["tau"] = c.tau;
    summary["initial_energy"] = json_number(traj.initial_energy);
    summary["max_norm_defect"] = json_number(traj.max_norm_defect);
    summary["max_energy_drift"] = json_number(traj.max_energy_drift);
    summary["mean_field_sup_initial"] = json_number(traj.mean_field_sup_initial);
    summary["mean_field_sup_max"] = json_number(traj.mean_field_sup_max);
    summary["h2_growth_rate"] = json_number(traj.h2_growth_rate);
    njson samples = njson::array();
    for (double t : c.times) {
      const ComplexField& phi = traj.at_time(t);
      samples.push_back(njson{{"t", t},
                              {"energy", json_number(hartree_energy(phi, v))},
                              {"h2_norm", json_number(traj.h2_norms[traj.index_of(t)])}});
    }
    summary["samples"] = samples;
    emit_json(rec, c.output_directory, "hartree_summary.json", summary);

    note(rec, "max_norm_defect", traj.max_norm_defect);
    note(rec, "max_energy_drift", traj.max_energy_drift);
    note(rec, "h2_growth_rate", traj.h2_growth_rate);
  });
}

ExperimentRecord run_fluctuation(const ExperimentConfig& c) {
  return run_guarded(c, "fluctuation-run", [&](ExperimentRecord& rec) {
    GridSpec g = make_grid(c);
    Potential v = make_potential(c, g);
    ComplexField phi0 = make_initial(c, g);
    Observable o = make_observable(c, g);
    auto t0 = steady::now();
    HartreeTrajectory traj = evolve_hartree(phi0, v, c.times.back(), c.tau);
    rec.timings.emplace_back("hartree", seconds_since(t0));

    t0 = steady::now();
    std::vector<std::vector<std::string>> rows;
    njson samples = njson::array();
    double max_defect = 0;
    for (double t : c.times) {
      FluctuationSolution sol = solve_backward(traj, o, t);
      for (std::size_t k = 0; k < sol.times.size(); ++k)
        rows.push_back({cell(t), cell(sol.times[k]), cell(sol.norms[k]),
                        cell(sol.orthogonality_defects[k])});
      samples.push_back(njson{{"t", t},
                              {"terminal_variance", json_number(sol.terminal_variance)},
                              {"sigma2", json_number(sol.sigma2)},
                              {"growth_rate", json_number(sol.growth_rate)},
                              {"max_orthogonality_defect",
                               json_number(sol.max_orthogonality_defect)}});
      max_defect = std::max(max_defect, sol.max_orthogonality_defect);
    }
    rec.timings.emplace_back("solve", seconds_since(t0));
    emit_csv(rec, c.output_directory, "fluctuation_norms.csv",
             {"t", "s", "norm", "orthogonality_defect"}, rows);

    njson summary;
    summary["version"] = version_string();
    summary["grid"] = grid_json(g);
    summary["observable"] = njson{{"op_norm", json_number(o.op_norm())},
                                  {"triple_norm", json_number(o.triple_norm())}};
    summary["samples"] = samples;
    emit_json(rec, c.output_directory, "fluctuation_summary.json", summary);
    note(rec, "max_orthogonality_defect", max_defect);
  });
}

ExperimentRecord run_oracle(const ExperimentConfig& c) {
  return run_guarded(c, "oracle-run", [&](ExperimentRecord& rec) {
    validate_oracle_config(c);
    GridSpec g = make_grid(c);
    Potential v = make_potential(c, g);
    ComplexField phi0 = make_initial(c, g);
    Observable o = make_observable(c, g);
    auto t0 = steady::now();
    HartreeTrajectory traj = evolve_hartree(phi0, v, c.times.back(), c.tau);
    rec.timings.emplace_back("hartree", seconds_since(t0));

    std::vector<double> lambdas =
        geometric_lambda_grid(c.lambda_min, c.lambda_max, c.lambda_count);
    std::vector<double> xs = uniform_grid(c.x_min, c.x_max, c.x_count);

    std::vector<std::vector<std::string>> lmgf_rows, tail_rows, cond_rows, moment_rows;
    njson manifest_runs = njson::array();
    for (int n : c.n_values) {
      t0 = steady::now();
      std::vector<OracleSlice> slices = oracle_sweep_one_n(c, g, v, phi0, o, traj, n);
      double elapsed = seconds_since(t0);
      rec.timings.emplace_back("oracle-n" + std::to_string(n), elapsed);
      for (const OracleSlice& s : slices) {
        for (double lam : lambdas)
          lmgf_rows.push_back({std::to_string(s.n), cell(s.t), cell(lam),
                               cell(empirical_lmgf(s.law, lam))});
        for (double x : xs)
          tail_rows.push_back(
              {std::to_string(s.n), cell(s.t), cell(x), cell(tail_probability(s.law, x))});
        cond_rows.push_back({std::to_string(s.n), cell(s.t), cell(s.condensate)});
        moment_rows.push_back({std::to_string(s.n), cell(s.t), cell(s.moments[1]),
                               cell(s.moments[2]), cell(s.moments[3]), cell(s.moments[4])});
      }
      const OracleSlice& last = slices.back();
      manifest_runs.push_back(njson{{"n", n},
                                    {"dimension", last.dimension},
                                    {"krylov_steps", last.report.steps},
                                    {"max_subdivisions", last.report.max_subdivisions},
                                    {"norm_defect", json_number(last.report.norm_defect)},
                                    {"energy_drift", json_number(last.report.energy_drift)},
                                    {"runtime_seconds", elapsed}});
    }
    emit_csv(rec, c.output_directory, "oracle_lmgf.csv", {"n", "t", "lambda", "lmgf"},
             lmgf_rows);
    emit_csv(rec, c.output_directory, "oracle_tail.csv", {"n", "t", "x", "p"}, tail_rows);
    emit_csv(rec, c.output_directory, "oracle_condensate.csv", {"n", "t", "overlap"},
             cond_rows);
    emit_csv(rec, c.output_directory, "oracle_moments.csv", {"n", "t", "m1", "m2", "m3", "m4"},
             moment_rows);

    njson manifest;
    manifest["version"] = version_string();
    manifest["grid"] = grid_json(g);
    manifest["coupling"] = njson{{"kind", c.potential_kind}, {"amplitude", c.amplitude}};
    manifest["tau"] = c.oracle_tau > 0 ? c.oracle_tau : c.tau;
    manifest["runs"] = manifest_runs;
    emit_json(rec, c.output_directory, "oracle_manifest.json", manifest);
  });
}

ExperimentRecord run_compare(const ExperimentConfig& c) {
  return run_guarded(c, "compare", [&](ExperimentRecord& rec) {
    validate_oracle_config(c);
    GridSpec g = make_grid(c);
    Potential v = make_potential(c, g);
    ComplexField phi0 = make_initial(c, g);
    Observable o = make_observable(c, g);
    double t_obs = c.times.back();

    auto t0 = steady::now();
    HartreeTrajectory traj = evolve_hartree(phi0, v, t_obs, c.tau);
    rec.timings.emplace_back("hartree", seconds_since(t0));

    t0 = steady::now();
    FluctuationSolution sol = solve_backward(traj, o, t_obs);
    double sigma2 = sol.sigma2;
    rec.timings.emplace_back("fluctuation", seconds_since(t0));

    std::vector<double> lambdas =
        geometric_lambda_grid(c.lambda_min, c.lambda_max, c.lambda_count);
    std::vector<double> xs = uniform_grid(c.x_min, c.x_max, c.x_count);
    const ComplexField& phi_t = traj.at_time(t_obs);

    struct PerN {
      int n;
      SpectralMeasure law;
      double variance;
    };
    std::vector<PerN> runs;
    double mean_ref = expectation(o, phi_t);
    for (int n : c.n_values) {
      t0 = steady::now();
      double otau = c.oracle_tau > 0 ? c.oracle_tau : c.tau;
      SecondQuantizedHamiltonian h = build_hamiltonian(g, v, n);
      ManyBodyState psi = product_state(phi0, h.basis());
      if (t_obs > 0) psi = evolve_exact(psi, h, t_obs, otau);
      SpectralMeasure law = observable_statistics(psi, o, mean_ref);
      runs.push_back({n, std::move(law), 0.0});
      runs.back().variance = measure_variance(runs.back().law);
      rec.timings.emplace_back("oracle-n" + std::to_string(n), seconds_since(t0));
    }

    t0 = steady::now();
    std::vector<int> ns(c.n_values.begin(), c.n_values.end());
    int degree = std::min<int>(kExtrapolationDegree, static_cast<int>(ns.size()) - 1);

    // headline LMGF table: oracle curves, iid curve, quadratic prediction,
    // residuals, and the 1/N extrapolation of the residual
    std::vector<std::string> lmgf_header{"lambda"};
    for (const PerN& r : runs) lmgf_header.push_back("lmgf_n" + std::to_string(r.n));
    lmgf_header.insert(lmgf_header.end(), {"iid", "quadratic"});
    for (const PerN& r : runs) lmgf_header.push_back("residual_n" + std::to_string(r.n));
    for (const PerN& r : runs) lmgf_header.push_back("residual_iid_n" + std::to_string(r.n));
    lmgf_header.push_back("residual_extrapolated");

    std::vector<std::vector<std::string>> lmgf_rows;
    std::vector<double> resid_extrapolated, resid_lambdas;
    std::vector<double> monotone_ok;
    for (double lam : lambdas) {
      std::vector<std::string> row{cell(lam)};
      std::vector<double> vals(runs.size());
      for (std::size_t i = 0; i < runs.size(); ++i) {
        vals[i] = empirical_lmgf(runs[i].law, lam);
        row.push_back(cell(vals[i]));
      }
      double iid = iid_lmgf(phi_t, o, lam);
      double quad = 0.5 * lam * lam * sigma2;
      row.push_back(cell(iid));
      row.push_back(cell(quad));
      std::vector<double> resid(runs.size());
      for (std::size_t i = 0; i < runs.size(); ++i) {
        resid[i] = vals[i] - quad;
        row.push_back(cell(resid[i]));
      }
      for (std::size_t i = 0; i < runs.size(); ++i) row.push_back(cell(vals[i] - iid));
      ExtrapolationFit fit = extrapolate_inverse_n(ns, resid, degree);
      row.push_back(cell(fit.extrapolated));
      lmgf_rows.push_back(std::move(row));
      resid_lambdas.push_back(lam);
      resid_extrapolated.push_back(fit.extrapolated);
    }
    emit_csv(rec, c.output_directory, "compare_lmgf.csv", lmgf_header, lmgf_rows);

    // rate table with the theorem envelopes around the quadratic rate
    RateEnvelope env = theorem_envelopes(sigma2, o.triple_norm(), c.c1, c.c2, t_obs, xs);
    std::vector<std::string> rate_header{"x"};
    for (const PerN& r : runs) rate_header.push_back("rate_n" + std::to_string(r.n));
    rate_header.insert(rate_header.end(),
                       {"rate_extrapolated", "quadratic", "lower", "upper", "in_window"});
    std::vector<std::vector<std::string>> rate_rows;
    std::vector<double> window_xs, window_rates;
    for (std::size_t j = 0; j < xs.size(); ++j) {
      std::vector<std::string> row{cell(xs[j])};
      std::vector<double> rates(runs.size());
      for (std::size_t i = 0; i < runs.size(); ++i) {
        double p = tail_probability(runs[i].law, xs[j]);
        rates[i] = -std::log(p) / runs[i].n;
        row.push_back(cell(rates[i]));
      }
      bool finite = std::all_of(rates.begin(), rates.end(),
                                [](double r) { return std::isfinite(r); });
      double extrap = std::numeric_limits<double>::quiet_NaN();
      if (finite) extrap = extrapolate_inverse_n(ns, rates, degree).extrapolated;
      row.push_back(cell(extrap));
      row.push_back(cell(env.quadratic[j]));
      row.push_back(cell(env.lower[j]));
      row.push_back(cell(env.upper[j]));
      bool in_window = xs[j] <= env.window;
      row.push_back(in_window ? "1" : "0");
      rate_rows.push_back(std::move(row));
      if (in_window && std::isfinite(extrap)) {
        window_xs.push_back(xs[j]);
        window_rates.push_back(extrap);
      }
    }
    emit_csv(rec, c.output_directory, "compare_rate.csv", rate_header, rate_rows);

    // exact Chebyshev audit on the oracle's own numbers
    std::vector<std::vector<std::string>> cheb_rows;
    double min_slack = std::numeric_limits<double>::infinity();
    for (const PerN& r : runs) {
      for (double lam : lambdas) {
        double lmgf = empirical_lmgf(r.law, lam);
        for (double x : xs) {
          double p = tail_probability(r.law, x);
          double lhs = std::log(p) / r.n;
          double rhs = lmgf - lam * x;
          double slack = rhs - lhs;
          if (std::isfinite(slack)) min_slack = std::min(min_slack, slack);
          cheb_rows.push_back({std::to_string(r.n), cell(lam), cell(x), cell(lhs), cell(rhs),
                               cell(slack)});
        }
      }
    }
    emit_csv(rec, c.output_directory, "compare_chebyshev.csv",
             {"n", "lambda", "x", "lhs", "rhs", "slack"}, cheb_rows);

    // CLT variance extrapolation against the Bogoliubov sigma2
    std::vector<std::vector<std::string>> clt_rows;
    std::vector<double> nvars;
    for (const PerN& r : runs) {
      double nv = r.n * r.variance;
      nvars.push_back(nv);
      clt_rows.push_back({std::to_string(r.n), cell(r.variance), cell(nv)});
    }
    ExtrapolationFit clt_fit = extrapolate_inverse_n(ns, nvars, degree);
    emit_csv(rec, c.output_directory, "compare_clt.csv", {"n", "variance", "n_times_variance"},
             clt_rows);

    // cubic-shape fit of the extrapolated residual over the top lambda decade
    std::vector<double> fit_xs, fit_ys;
    double decade_lo = c.lambda_max / 10.0 * (1 - 1e-12);
    for (std::size_t i = 0; i < resid_lambdas.size(); ++i) {
      if (resid_lambdas[i] >= decade_lo && std::abs(resid_extrapolated[i]) > kResidualFloor) {
        fit_xs.push_back(resid_lambdas[i]);
        fit_ys.push_back(resid_extrapolated[i]);
      }
    }
    PowerLawFit cubic_fit;
    if (fit_xs.size() >= 3) cubic_fit = fit_power_law(fit_xs, fit_ys);
    double c_hat = cubic_envelope_constant(resid_lambdas, resid_extrapolated);

    std::pair<double, double> fitted =
        smallest_envelope_constants(window_xs, window_rates, sigma2, o.triple_norm(), t_obs);
    rec.timings.emplace_back("assemble", seconds_since(t0));

    njson summary;
    summary["version"] = version_string();
    summary["t"] = t_obs;
    summary["n_values"] = ns;
    summary["grid"] = grid_json(g);
    summary["observable"] = njson{{"kind", c.observable_kind},
                                  {"op_norm", json_number(o.op_norm())},
                                  {"triple_norm", json_number(o.triple_norm())}};
    summary["bogoliubov"] =
        njson{{"sigma2", json_number(sigma2)},
              {"terminal_variance", json_number(sol.terminal_variance)},
              {"growth_rate", json_number(sol.growth_rate)},
              {"max_orthogonality_defect", json_number(sol.max_orthogonality_defect)}};
    njson clt = njson::object();
    njson nv_obj = njson::object();
    for (std::size_t i = 0; i < runs.size(); ++i)
      nv_obj[std::to_string(runs[i].n)] = json_number(nvars[i]);
    clt["n_times_variance"] = nv_obj;
    clt["extrapolated"] = json_number(clt_fit.extrapolated);
    clt["rms_residual"] = json_number(clt_fit.rms_residual);
    clt["ratio_to_sigma2"] = json_number(clt_fit.extrapolated / sigma2);
    summary["clt"] = clt;
    njson lmgf = njson::object();
    lmgf["extrapolation_degree"] = degree;
    lmgf["fit_window"] = njson::array({json_number(c.lambda_max / 10.0),
                                       json_number(c.lambda_max)});
    lmgf["fit_points"] = fit_xs.size();
    lmgf["cubic_fit"] = njson{{"exponent", json_number(cubic_fit.exponent)},
                              {"prefactor", json_number(cubic_fit.prefactor)},
                              {"r_squared", json_number(cubic_fit.r_squared)}};
    lmgf["cubic_envelope_constant"] = json_number(c_hat);
    summary["lmgf"] = lmgf;
    summary["chebyshev"] =
        njson{{"min_slack", json_number(min_slack)}, {"entries", cheb_rows.size()}};
    summary["envelopes"] = njson{{"c1", c.c1},
                                 {"c2", c.c2},
                                 {"window_lower", json_number(env.window_lower)},
                                 {"window_upper", json_number(env.window_upper)},
                                 {"window", json_number(env.window)},
                                 {"fitted_c1", json_number(fitted.first)},
                                 {"fitted_c2", json_number(fitted.second)}};
    emit_json(rec, c.output_directory, "compare_summary.json", summary);

    note(rec, "sigma2", sigma2);
    note(rec, "clt_extrapolated", clt_fit.extrapolated);
    note(rec, "clt_ratio", clt_fit.extrapolated / sigma2);
    note(rec, "chebyshev_min_slack", min_slack);
    note(rec, "cubic_fit_exponent", cubic_fit.exponent);
  });
}

namespace {

ComplexField random_field(const GridSpec& g, std::mt19937_64& rng) {
  std::normal_distribution<double> gauss;
  ComplexField f(g);
  for (auto& z : f.values) z = cplx(gauss(rng), gauss(rng));
  normalize(f);
  return f;
}

ComplexField gaussian_field(const GridSpec& g, double center, double width) {
  ComplexField f(g);
  for (int i = 0; i < g.points; ++i) {
    double d = std::fmod(std::abs(g.coordinate(i) - center), g.length);
    d = std::min(d, g.length - d);
    f[i] = std::exp(-d * d / (2 * width * width));
  }
  normalize(f);
  return f;
}

struct Checker {
  SelfTestResult& res;
  void operator()(const std::string& name, bool ok, const std::string& detail) {
    res.checks.push_back({name, ok, detail});
  }
};

std::string defect_detail(double value, double tol) {
  return "defect " + format_double(value) + " (tol " + format_double(tol) + ")";
}

}  // namespace

SelfTestResult self_test(std::uint64_t seed, bool inject_k2_defect) {
  SelfTestResult res;
  Checker check{res};
  auto t_start = steady::now();
  std::mt19937_64 rng(seed);

  {
    ExperimentConfig base;
    bool ok = parse_config(serialize_config(base)) == base;
    ExperimentConfig mutated;
    mutated.points = 8;
    mutated.potential_kind = "zero";
    mutated.times = {0.0, 0.125, 0.25};
    mutated.coefficients = {{0, 1, 0}, {1, 0.5, -0.25}};
    mutated.n_values = {2, 4};
    ok = ok && parse_config(serialize_config(mutated)) == mutated;
    check("config-roundtrip", ok, ok ? "parse(serialize(c)) == c" : "round-trip mismatch");
  }
  {
    bool threw = false;
    try {
      ExperimentConfig bad;
      bad.points = 7;
      validate_config(bad);
    } catch (const config_error&) {
      threw = true;
    }
    check("config-validate", threw, threw ? "odd M rejected" : "odd M accepted");
  }
  {
    GridSpec g(1, 32, 2 * 3.141592653589793);
    ComplexField f = random_field(g, rng);
    auto coeff = spectral_coefficients(f);
    double spectral = 0;
    for (const cplx& ck : coeff) spectral += std::norm(ck);
    spectral *= g.volume();
    double direct = l2_norm(f) * l2_norm(f);
    double defect = std::abs(spectral - direct) / direct;
    check("grid-parseval", defect <= 1e-12, defect_detail(defect, 1e-12));
  }
  {
    GridSpec g(1, 16, 5.0);
    RealField a(g), b(g);
    for (int i = 0; i < g.points; ++i) {
      double x = g.coordinate(i);
      double d = std::min(x, g.length - x);
      a[i] = std::exp(-d * d);
      b[i] = std::exp(-2 * d * d) + 0.1 * std::cos(2 * 3.141592653589793 * x / g.length);
    }
    RealField fast = convolve(a, b);
    double h = g.spacing();
    double worst = 0;
    for (int i = 0; i < g.points; ++i) {
      double acc = 0;
      for (int j = 0; j < g.points; ++j) {
        int k = ((i - j) % g.points + g.points) % g.points;
        acc += a[static_cast<std::size_t>(k)] * b[static_cast<std::size_t>(j)];
      }
      worst = std::max(worst, std::abs(fast[static_cast<std::size_t>(i)] - h * acc));
    }
    check("grid-convolution", worst <= 1e-12, defect_detail(worst, 1e-12));
  }

  GridSpec g32(1, 32, 2 * 3.141592653589793);
  Potential v32 = Potential::gaussian(g32, 0.4, 1.0);
  ComplexField phi32 = gaussian_field(g32, 3.0, 0.8);
  {
    HartreeTrajectory traj = evolve_hartree(phi32, v32, 0.2, 1e-3);
    bool ok = traj.max_norm_defect <= 1e-10 && traj.max_energy_drift <= 1e-6;
    check("hartree-conservation", ok,
          "norm " + format_double(traj.max_norm_defect) + ", energy " +
              format_double(traj.max_energy_drift));
  }
  {
    GridSpec g(1, 64, 20.0);
    double w = 1.0, a = 1.0 / (4 * w * w), T = 0.25;
    double amp = std::pow(2 * a / 3.141592653589793, 0.25);
    ComplexField raw(g);
    for (int i = 0; i < g.points; ++i) {
      double x = g.coordinate(i) - g.length / 2;
      raw[i] = amp * std::exp(-a * x * x);
    }
    double n0 = l2_norm(raw);
    ComplexField phi0 = raw;
    scale(phi0, 1.0 / n0);
    HartreeTrajectory traj = evolve_hartree(phi0, Potential::zero_potential(g), T, 1e-3);
    const ComplexField& got = traj.at_time(T);
    ComplexField want(g);
    cplx den(1.0, 4 * a * T);
    for (int i = 0; i < g.points; ++i) {
      cplx acc = 0;
      for (int m = -1; m <= 1; ++m) {
        double x = g.coordinate(i) - g.length / 2 + m * g.length;
        acc += amp / std::sqrt(den) * std::exp(-a * x * x / den);
      }
      want[i] = acc / n0;
    }
    double err = l2_norm(axpy(-1.0, got, want));
    check("hartree-free-gaussian", err <= 1e-8, defect_detail(err, 1e-8));
  }

  KernelPair kp = build_kernels(phi32, v32);
  if (inject_k2_defect) kp.k2(0, 1) += 1e-3;
  {
    double defect = (kp.k1 - kp.k1.adjoint()).cwiseAbs().maxCoeff();
    check("kernel-K1-hermiticity", defect <= 1e-12, defect_detail(defect, 1e-12));
  }
  {
    double defect = (kp.k2 - kp.k2.transpose()).cwiseAbs().maxCoeff();
    check("kernel-K2-symmetry", defect <= 1e-12, defect_detail(defect, 1e-12));
  }
  {
    RealField v2(g32), dens(g32);
    for (std::size_t i = 0; i < v2.size(); ++i) {
      v2[i] = v32.table[i] * v32.table[i];
      dens[i] = std::norm(phi32[i]);
    }
    RealField conv = convolve(v2, dens);
    double rhs = 0;
    for (std::size_t i = 0; i < dens.size(); ++i) rhs += dens[i] * conv[i];
    rhs *= g32.cell_volume();
    double lhs = kp.hs_norm_k1 * kp.hs_norm_k1;
    double defect = std::abs(lhs - rhs) / std::max(1.0, std::abs(rhs));
    check("kernel-hs-identity", defect <= 1e-9, defect_detail(defect, 1e-9));
  }

  RealField obs_profile(g32);
  for (int i = 0; i < g32.points; ++i) {
    double x = g32.coordinate(i);
    obs_profile[static_cast<std::size_t>(i)] =
        std::cos(2 * 3.141592653589793 * x / g32.length) +
        0.5 * std::cos(4 * 3.141592653589793 * x / g32.length);
  }
  Observable o32 = Observable::multiplication(obs_profile);
  {
    HartreeTrajectory traj = evolve_hartree(phi32, v32, 0.25, 1e-3);
    FluctuationSolution sol0 = solve_backward(traj, o32, 0.0);
    double defect = std::abs(sol0.sigma2 - variance(o32, phi32));
    check("fluctuation-t0-identity", defect <= 1e-10, defect_detail(defect, 1e-10));
    FluctuationSolution sol = solve_backward(traj, o32, 0.25);
    check("fluctuation-orthogonality", sol.max_orthogonality_defect <= 1e-7,
          defect_detail(sol.max_orthogonality_defect, 1e-7));
  }
  {
    HartreeTrajectory traj =
        evolve_hartree(phi32, Potential::zero_potential(g32), 0.25, 1e-3);
    FluctuationSolution sol = solve_backward(traj, o32, 0.25);
    double worst = 0;
    for (double n : sol.norms) worst = std::max(worst, std::abs(n - sol.norms.back()));
    check("fluctuation-free-norm", worst <= 1e-9, defect_detail(worst, 1e-9));
  }

  GridSpec g4(1, 4, 2 * 3.141592653589793);
  Potential v4 = Potential::gaussian(g4, 0.4, 1.0);
  ComplexField phi4 = gaussian_field(g4, 3.0, 1.0);
  RealField prof4(g4);
  for (int i = 0; i < 4; ++i)
    prof4[static_cast<std::size_t>(i)] =
        std::cos(2 * 3.141592653589793 * g4.coordinate(i) / g4.length);
  Observable o4 = Observable::multiplication(prof4);
  {
    auto basis = build_basis(4, 3);
    SecondQuantizedHamiltonian h = build_hamiltonian(g4, v4, 3);
    ManyBodyState psi = product_state(phi4, basis);
    EvolveReport rep;
    ManyBodyState fwd = evolve_exact(psi, h, 0.2, 1e-2, &rep);
    bool ok = rep.norm_defect <= 1e-8 && rep.energy_drift <= 1e-8;
    check("oracle-unitarity", ok,
          "norm " + format_double(rep.norm_defect) + ", energy " +
              format_double(rep.energy_drift));
    ManyBodyState back = evolve_exact(fwd, h, 0.2, -1e-2);
    double err = (back.amplitudes - psi.amplitudes).norm();
    check("oracle-reversal", err <= 1e-7, defect_detail(err, 1e-7));

    SpectralMeasure law = observable_statistics(fwd, o4, 0.0);
    double wsum = 0;
    for (double w : law.weights) wsum += w;
    check("oracle-weights", std::abs(wsum - 1) <= 1e-10,
          defect_detail(std::abs(wsum - 1), 1e-10));

    double worst_slack = std::numeric_limits<double>::infinity();
    for (double lam : {0.05, 0.2, 1.0}) {
      double lmgf = empirical_lmgf(law, lam);
      for (double x : {-0.1, 0.0, 0.1}) {
        double p = tail_probability(law, x);
        if (p <= 0) continue;
        worst_slack = std::min(worst_slack, lmgf - lam * x - std::log(p) / law.scale);
      }
    }
    check("chebyshev-audit", worst_slack >= -1e-12,
          "min slack " + format_double(worst_slack));

    SpectralMeasure tilted = tilted_measure(law, 0.2 * law.scale);
    double tsum = 0;
    for (double w : tilted.weights) tsum += w;
    double fd = (empirical_lmgf(law, 0.2 + kDerivativeStep) -
                 empirical_lmgf(law, 0.2 - kDerivativeStep)) /
                (2 * kDerivativeStep);
    double mean_defect = std::abs(measure_mean(tilted) - fd);
    check("tilted-normalization", std::abs(tsum - 1) <= 1e-12,
          defect_detail(std::abs(tsum - 1), 1e-12));
    check("tilted-derivative", mean_defect <= 1e-8, defect_detail(mean_defect, 1e-8));
  }
  {
    auto basis = build_basis(4, 3);
    Potential vz = Potential::zero_potential(g4);
    SecondQuantizedHamiltonian h = build_hamiltonian(g4, vz, 3);
    ManyBodyState psi = product_state(phi4, basis);
    ManyBodyState evolved = evolve_exact(psi, h, 0.2, 1e-2);
    ManyBodyState want = product_state(free_evolution(phi4, 0.2), basis);
    double err = (evolved.amplitudes - want.amplitudes).norm();
    check("oracle-free-factorization", err <= 1e-8, defect_detail(err, 1e-8));
  }
  {
    std::vector<double> lams;
    for (double l = 0; l <= 2.0 + 1e-12; l += 1e-4) lams.push_back(l);
    MgfCurve curve = quadratic_curve(0.7, lams);
    double lf = legendre_fenchel(curve, 0.35);
    double want = 0.35 * 0.35 / (2 * 0.7);
    double defect = std::abs(lf - want);
    double duality = std::abs(lf + chebyshev_envelope(curve, 0.35));
    check("lf-gaussian", defect <= 1e-8, defect_detail(defect, 1e-8));
    check("lf-duality", duality <= 1e-8, defect_detail(duality, 1e-8));
  }

  res.elapsed_seconds = seconds_since(t_start);
  return res;
}

}  // namespace mfld
