#pragma once

#include <cstdint>
#include <filesystem>
#include <string>

#include "optbasis/linalg.hpp"

namespace optbasis {

/// One experiment, read from a JSON document with sections
/// problem / grid / weights / rsvd / nonlinear / output.
/// Unknown keys are rejected.
struct ExperimentConfig {
  // problem
  std::string problem = "elliptic"; ///< elliptic, rte, semilinear_elliptic,
                                    ///< semilinear_rte, identity, elliptic_1d
  double eps = 1.0;
  double eps1 = 1.0;
  double eps2 = 1.0;
  double g = 0.5;
  std::string source = "default"; ///< default, sine, gaussian, zero
  double amplitude = 1.0;

  // grid
  double length = 0.5;
  Index m_intervals = 32;
  Index n_v = 16;

  // weights
  std::string weight_x = "sobolev"; ///< sobolev, identity
  Index p = 1;
  std::string weight_y = "identity"; ///< identity, l2

  // rsvd
  Index rank = 50;
  Index oversample = 10;
  Index power = 2;
  std::uint64_t seed = 0;

  // nonlinear
  double tol = 1e-12;
  Index max_iter = 500;
  double relax = 1.0;

  // output
  std::string out_dir = "out";
  std::string basis_file = "basis.obf";
  Index nmax = 50;
  Index n_step = 1;

  bool is_rte() const { return problem == "rte" || problem == "semilinear_rte"; }
  bool is_semilinear() const {
    return problem == "semilinear_elliptic" || problem == "semilinear_rte";
  }
  /// Number of unknowns implied by the grid.
  Index unknowns() const;

  bool operator==(const ExperimentConfig &) const = default;
};

/// Source amplitude used when the config leaves it out.
double default_amplitude(const std::string &problem);

/// Throws ConfigInvalid naming the offending key.
ExperimentConfig parse_config(const std::string &json_text);
ExperimentConfig load_config(const std::filesystem::path &path);
std::string serialize_config(const ExperimentConfig &cfg);

/// Range and consistency checks; throws ConfigInvalid.
void validate(const ExperimentConfig &cfg);

} // namespace optbasis
