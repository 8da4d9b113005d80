#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "nlsrep/domain.hpp"
#include "nlsrep/evolve.hpp"
#include "nlsrep/grid.hpp"

namespace nlsrep {

enum class InitialKind { gaussian, groundstate, checkpoint };
std::string_view to_string(InitialKind k);

/// gaussian:     A exp(-|x - x0|^2 / w^2) exp(i k x_1), x0 = (center, 0, 0)
/// groundstate:  lambda Q (Q solved on the run grid)
/// checkpoint:   field read from a checkpoint header
struct InitialData {
  InitialKind kind = InitialKind::gaussian;
  double amplitude = 1.0;
  double width = 1.0;
  double center = 0.0;
  double phase_k = 0.0;
  double lambda = 1.0;
  std::filesystem::path path;
};

struct GridSpec {
  GridMode mode = GridMode::cartesian;
  std::size_t n = 512;
  double extent = 16.0;  // L or r_max
};

/// Reference ground state (or bubble) for threshold tests and Glassey bounds.
/// An existing artifact at `path` is reused when its d and alpha match.
struct ReferenceSpec {
  GridSpec grid{GridMode::radial, 4096, 40.0};
  double tol = 1e-10;
  std::filesystem::path path;
};

enum class SweepParameter { amplitude, lambda, alpha, sigma, c };
std::string_view to_string(SweepParameter p);

struct SweepSpec {
  SweepParameter parameter = SweepParameter::amplitude;
  std::vector<double> values;
  unsigned workers = 1;
};

struct ExperimentConfig {
  EquationSpec equation;
  GridSpec grid;
  InitialData initial;
  EvolveConfig evolve;
  double virial_tolerance = 1e-3;
  double morawetz_tolerance = 1e-3;
  ReferenceSpec reference;
  SweepSpec sweep;
  std::filesystem::path output_dir = "run";
  bool write_checkpoints = false;
  std::uint64_t seed = 0;
  /// Random fields drawn by the check suite.
  std::size_t random_fields = 100;

  /// Cross-field checks: the equation itself, grid shape, evolve settings,
  /// localization radii only on radial grids, centred data on radial grids.
  /// Throws Error(config_invalid).
  void validate() const;

  /// Every effective key in a fixed order, INI syntax. Parsing the result
  /// gives back the same configuration.
  std::string canonical() const;
  /// Lowercase hex SHA-256 of canonical() without the [output] section, so
  /// the same experiment hashes alike wherever it is written.
  std::string hash() const;
};

/// Sections: [equation] [grid] [initial] [evolve] [observables] [reference]
/// [sweep] [output] [random]. Unknown sections or keys are rejected.
/// Relative paths resolve against `base_dir`. Throws Error(config_invalid).
ExperimentConfig parse_config(const std::string& text, const std::filesystem::path& base_dir = {});
/// Throws Error(resource) when unreadable.
ExperimentConfig load_config(const std::filesystem::path& path);

std::string sha256_hex(std::string_view bytes);

}  // namespace nlsrep
