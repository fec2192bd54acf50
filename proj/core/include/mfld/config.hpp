#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "mfld/grid.hpp"
#include "mfld/observable.hpp"
#include "mfld/potential.hpp"

namespace mfld {

// Flat mirror of the sectioned key=value experiment file. Parsing and
// serialization round-trip exactly (doubles formatted at full precision).
struct ExperimentConfig {
  int dim = 1;
  int points = 6;
  double length = 6.283185307179586;

  std::string potential_kind = "gaussian";  // zero|gaussian|soft-coulomb|cosine|constant
  double amplitude = 0.25;
  double width = 1.0;
  double regularizer = 0.1;
  int wavenumber = 1;

  std::string initial_kind = "gaussian";  // gaussian|mode-mixture
  double initial_center = 3.141592653589793;
  double initial_width = 0.9;
  std::vector<std::array<double, 3>> coefficients;  // mode, re, im

  std::string observable_kind = "cosine";  // identity|cosine|gaussian-bump|projector|matrix
  std::vector<std::pair<int, double>> harmonics = {{1, 1.0}, {2, 0.5}};
  double observable_center = 3.141592653589793;
  double observable_width = 0.7;
  std::string matrix_path;

  double tau = 1e-3;
  std::vector<double> times = {0.0, 1.0};

  std::vector<int> n_values = {2, 3, 4, 5, 6};
  double oracle_tau = 0;  // 0: reuse tau

  double lambda_min = 1e-3;
  double lambda_max = 1e-1;
  int lambda_count = 17;

  double x_min = 0;
  double x_max = 1e-1;
  int x_count = 11;

  double c1 = 1.0;
  double c2 = 1.0;

  std::string output_directory = "out";
  std::uint64_t seed = 12345;

  bool operator==(const ExperimentConfig&) const = default;
};

ExperimentConfig parse_config(const std::string& text);
ExperimentConfig load_config(const std::string& path);
std::string serialize_config(const ExperimentConfig& c);

// Grid/time consistency, tau | times, grid caps. Oracle-specific demands
// (d=1, sector size, oracle tau) are checked by validate_oracle_config so
// PDE-only runs can use grids far past the Fock-sector cap.
void validate_config(const ExperimentConfig& c);
void validate_oracle_config(const ExperimentConfig& c);

GridSpec make_grid(const ExperimentConfig& c);
Potential make_potential(const ExperimentConfig& c, const GridSpec& g);
ComplexField make_initial(const ExperimentConfig& c, const GridSpec& g);
Observable make_observable(const ExperimentConfig& c, const GridSpec& g);

}  // namespace mfld
