#pragma once

#include <stdexcept>
#include <string>

namespace mfld {

// Two fields live on different grids, or a vector length does not match its grid.
class grid_mismatch_error : public std::invalid_argument {
public:
  using std::invalid_argument::invalid_argument;
};

// A parameter is out of its documented range (bad M, negative width, ...).
class parameter_error : public std::invalid_argument {
public:
  using std::invalid_argument::invalid_argument;
};

// A structural consistency check failed (Hermiticity, evenness, convexity, ...).
class consistency_error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

// A monitored invariant blew up during time propagation.
class propagation_error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

// Requested Fock sector exceeds the desk-scale cap.
class basis_size_error : public std::length_error {
public:
  using std::length_error::length_error;
};

// Legendre-Fenchel conjugation point outside the achievable slope interval.
class conjugate_domain_error : public std::domain_error {
public:
  using std::domain_error::domain_error;
};

// Config file could not be parsed or validated.
class config_error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

// An experiment stage is missing an input artifact from an earlier stage.
class dependency_error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

}  // namespace mfld
