#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "nlsrep/config.hpp"
#include "nlsrep/error.hpp"
#include "nlsrep/evolve.hpp"
#include "nlsrep/groundstate.hpp"
#include "nlsrep/observables.hpp"

namespace nlsrep {

/// Process exit statuses of the lab commands.
enum ExitCode : int {
  exit_ok = 0,
  exit_check_failed = 1,
  exit_config = 2,
  exit_resource = 3,
  exit_numerical = 4,
};

int exit_code_for(ErrorCode code) noexcept;

std::string_view code_version() noexcept;

GridPtr make_run_grid(const ExperimentConfig& cfg);

/// Norms of Q (or W in the energy-critical case) together with where they
/// came from. Loaded from reference.path when that artifact matches d and
/// alpha, otherwise solved on the reference grid.
struct Reference {
  ReferenceNorms norms;
  bool bubble = false;
  bool loaded = false;
  std::optional<GroundState> ground_state;
  std::optional<Bubble> bubble_state;
};

/// nullopt when the regime has no threshold profile (mass-subcritical,
/// energy-supercritical).
std::optional<Reference> obtain_reference(const ExperimentConfig& cfg);
Reference solve_reference(const ExperimentConfig& cfg);

/// The configured initial field on `grid`. `gs` supplies Q for
/// groundstate-scaled data; when null it is solved on the run grid.
Field make_initial_field(const ExperimentConfig& cfg, GridPtr grid, const GroundState* gs = nullptr);

/// Random smooth fields for the inequality oracles. Cartesian grids get
/// Fourier coefficients with independent Gaussian real and imaginary parts
/// on |k| <= k_max (other modes zero), times the envelope exp(-|x|^2 / (L/4)^2)
/// so the field lives well inside the box; radial grids get sums of four
/// Gaussians exp(-a r^2), a in [0.2, 5], with Gaussian complex weights.
Field random_band_limited_field(GridPtr grid, std::mt19937_64& rng, double k_max);

struct RunSummary {
  TrajectoryOutcome outcome;
  ObservableRecord initial;
  std::optional<ThresholdVerdict> threshold;
  std::vector<IdentityCheck> checks;
  std::vector<LocalizedVirialCheck> localized;
  double wall_seconds = 0.0;
  std::string config_hash;

  bool checks_pass() const noexcept;
};

/// Evolution plus every identity check that applies to the run. No files.
RunSummary run_experiment(const ExperimentConfig& cfg);

/// CSV schema:
///   t,mass,energy,kinetic,potential_term,nonlinear_term,virial,
///   virial_phiR_<R>...,morawetz_abs,l4_density,linfty
/// with virial_phiR_<R> present only for configured radii on radial grids
/// and l4_density only for d = 3. The first line is "# config_hash=<hex>".
std::string csv_header(const ExperimentConfig& cfg);
std::string records_csv(const ExperimentConfig& cfg, std::span<const ObservableRecord> records,
                        const std::string& config_hash);
std::string summary_json(const ExperimentConfig& cfg, const RunSummary& s);

/// Writes timeseries.csv, summary.json, timing.json, config.ini and the
/// checkpoints (when enabled) into cfg.output_dir, each atomically.
void write_run(const ExperimentConfig& cfg, const RunSummary& s);

/// Subcommands. Each returns an ExitCode; library errors propagate as Error.
int cmd_groundstate(const ExperimentConfig& cfg, std::ostream& log);
int cmd_evolve(const ExperimentConfig& cfg, std::ostream& log);
int cmd_classify(const ExperimentConfig& cfg, std::ostream& log);
int cmd_sweep(const ExperimentConfig& cfg, std::ostream& log);
int cmd_check(const ExperimentConfig& cfg, std::ostream& log);

/// One row of a sweep table.
struct SweepRow {
  double value = 0.0;
  std::string status;  // run status, or "error: ..." for a failed run
  double t_reached = 0.0;
  std::optional<double> tstar;
  std::optional<double> glassey;
  double energy0 = 0.0;
  double mass0 = 0.0;
};

/// Adjacent sweep rows where the status flips between completed and
/// blowup-detected, as index pairs.
std::vector<std::pair<std::size_t, std::size_t>> transition_brackets(const std::vector<SweepRow>& rows);

/// Runs every sweep value on a pool of cfg.sweep.workers threads. Each run
/// writes to its own subdirectory of cfg.output_dir when `write` is set.
std::vector<SweepRow> run_sweep(const ExperimentConfig& cfg, bool write);

/// The configuration of sweep entry `index`.
ExperimentConfig sweep_entry(const ExperimentConfig& cfg, std::size_t index);

/// Every config_hash found in the CSV, INI and JSON files of `dir` and
/// `dir/checkpoints` must equal `hash`. Returns the offending files.
std::vector<std::filesystem::path> hash_mismatches(const std::filesystem::path& dir, const std::string& hash);

}  // namespace nlsrep
