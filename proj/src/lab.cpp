#include "nlsrep/lab.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <chrono>
#include <cmath>
#include <fstream>
#include <mutex>
#include <ostream>
#include <thread>

#include <nlohmann/json.hpp>

#include "nlsrep/field_io.hpp"
#include "nlsrep/fourier.hpp"
#include "nlsrep/kernels.hpp"

#ifndef NLSREP_VERSION
#define NLSREP_VERSION "0.0.0"
#endif

namespace nlsrep {

using json = nlohmann::ordered_json;
namespace fs = std::filesystem;

int exit_code_for(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::config_invalid:
    case ErrorCode::invalid_spec:
    case ErrorCode::invalid_dimension:
    case ErrorCode::resolution_too_small:
    case ErrorCode::invalid_regime:
    case ErrorCode::regime_not_covered:
    case ErrorCode::wrong_dimension:
    case ErrorCode::not_radial:
      return exit_config;
    case ErrorCode::resource:
      return exit_resource;
    case ErrorCode::invalid_field:
    case ErrorCode::no_convergence:
    case ErrorCode::insufficient_records:
    case ErrorCode::bridge_construction_failure:
      return exit_numerical;
  }
  return exit_numerical;
}

std::string_view code_version() noexcept { return NLSREP_VERSION; }

GridPtr make_run_grid(const ExperimentConfig& cfg) {
  return make_grid(cfg.equation.d, cfg.grid.n, cfg.grid.extent, cfg.grid.mode);
}

namespace {

std::string num(double v) {
  if (!std::isfinite(v)) return v != v ? "nan" : (v > 0 ? "inf" : "-inf");
  char buf[32];
  const auto [p, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, p);
}

json opt(const std::optional<double>& v) { return v ? json(*v) : json(nullptr); }

json check_json(const IdentityCheck& c) {
  return json{{"name", c.name}, {"lhs", c.lhs}, {"rhs", c.rhs}, {"rel_error", c.rel_error}, {"pass", c.pass}};
}

bool has_threshold_profile(const EquationSpec& spec) {
  const Regime r = classify_criticality(spec).regime;
  return r == Regime::mass_critical || r == Regime::intercritical || r == Regime::energy_critical;
}

std::optional<Reference> load_reference_artifact(const ExperimentConfig& cfg) {
  if (cfg.reference.path.empty() || !fs::exists(cfg.reference.path)) return std::nullopt;
  json j;
  try {
    j = json::parse(read_file(cfg.reference.path));
  } catch (const json::exception& e) {
    throw Error(ErrorCode::config_invalid, "reference artifact is not JSON: " + std::string(e.what()));
  }
  const bool bubble = j.value("kind", "") == "bubble";
  if (j.value("d", 0) != cfg.equation.d || std::abs(j.value("alpha", 0.0) - cfg.equation.alpha) > 1e-12)
    return std::nullopt;
  Reference ref;
  ref.bubble = bubble;
  ref.loaded = true;
  ref.norms.d = cfg.equation.d;
  ref.norms.alpha = cfg.equation.alpha;
  ref.norms.kinetic = j.at("kinetic").get<double>();
  if (bubble) ref.norms.energy = j.at("energy").get<double>();
  else ref.norms.mass = j.at("mass").get<double>();
  return ref;
}

/// Records from the start with the stride of the first two.
std::span<const ObservableRecord> uniform_prefix(std::span<const ObservableRecord> rec) {
  if (rec.size() < 3) return rec;
  const double h = rec[1].t - rec[0].t;
  std::size_t k = 2;
  while (k < rec.size() && std::abs((rec[k].t - rec[k - 1].t) - h) <= 1e-9 * h) ++k;
  return rec.first(k);
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

}  // namespace

Reference solve_reference(const ExperimentConfig& cfg) {
  const EquationSpec& s = cfg.equation;
  const Regime regime = classify_criticality(s).regime;
  Reference ref;
  if (regime == Regime::energy_critical) {
    auto g = make_grid(3, cfg.reference.grid.n, cfg.reference.grid.extent, GridMode::radial);
    Bubble b = make_bubble(3, g);
    ref.bubble = true;
    ref.norms = b.norms();
    ref.bubble_state = std::move(b);
    return ref;
  }
  if (regime != Regime::mass_critical && regime != Regime::intercritical)
    throw Error(ErrorCode::regime_not_covered, "no threshold profile for a " + std::string(to_string(regime)) +
                                                   " power");
  auto g = make_grid(s.d, cfg.reference.grid.n, cfg.reference.grid.extent, cfg.reference.grid.mode);
  GroundStateOptions opt;
  opt.tol = cfg.reference.tol;
  GroundState gs = solve_ground_state(s.d, s.alpha, g, opt);
  ref.norms = gs.norms();
  ref.ground_state = std::move(gs);
  return ref;
}

std::optional<Reference> obtain_reference(const ExperimentConfig& cfg) {
  if (!has_threshold_profile(cfg.equation)) return std::nullopt;
  if (auto loaded = load_reference_artifact(cfg)) return loaded;
  return solve_reference(cfg);
}

Field make_initial_field(const ExperimentConfig& cfg, GridPtr grid, const GroundState* gs) {
  const InitialData& in = cfg.initial;
  switch (in.kind) {
    case InitialKind::gaussian: {
      const double A = in.amplitude, w2 = in.width * in.width;
      if (grid->radial())
        return sample_radial(grid, [&](double r) { return cplx(A * std::exp(-r * r / w2), 0.0); });
      return sample(grid, [&](double x, double y, double z) {
        const double dx = x - in.center;
        return A * std::exp(-(dx * dx + y * y + z * z) / w2) * std::polar(1.0, in.phase_k * x);
      });
    }
    case InitialKind::groundstate: {
      std::optional<GroundState> own;
      if (gs == nullptr || !gs->profile.grid->same_shape(*grid)) {
        own = solve_ground_state(cfg.equation.d, cfg.equation.alpha, grid, cfg.reference.tol);
        gs = &*own;
      }
      Field u(grid, gs->profile.values);
      for (auto& v : u.values) v *= in.lambda;
      return u;
    }
    case InitialKind::checkpoint: {
      Checkpoint cp = read_checkpoint(in.path);
      if (!cp.field.grid->same_shape(*grid))
        throw Error(ErrorCode::config_invalid, "checkpoint grid does not match [grid]");
      Field u(grid, std::move(cp.field.values));
      return u;
    }
  }
  throw Error(ErrorCode::config_invalid, "unknown initial data");
}

Field random_band_limited_field(GridPtr grid, std::mt19937_64& rng, double k_max) {
  std::normal_distribution<double> gauss(0.0, 1.0);
  Field f(grid);
  if (grid->radial()) {
    std::uniform_real_distribution<double> rate(0.2, 5.0);
    const auto r = grid->radius();
    for (int term = 0; term < 4; ++term) {
      const double a = rate(rng);
      const cplx w(gauss(rng), gauss(rng));
      for (std::size_t i = 0; i < f.size(); ++i) f.values[i] += w * std::exp(-a * r[i] * r[i]);
    }
    return f;
  }
  const auto k2 = grid->k2();
  const double cut = k_max * k_max;
  for (std::size_t i = 0; i < f.size(); ++i) {
    const double re = gauss(rng), im = gauss(rng);
    if (k2[i] <= cut) f.values[i] = cplx(re, im);
  }
  grid->fourier().inverse(f.values);
  const auto r = grid->radius();
  const double w = 0.25 * grid->extent();
  for (std::size_t i = 0; i < f.size(); ++i) f.values[i] *= std::exp(-r[i] * r[i] / (w * w));
  return f;
}

bool RunSummary::checks_pass() const noexcept {
  return std::all_of(checks.begin(), checks.end(), [](const IdentityCheck& c) { return c.pass; });
}

RunSummary run_experiment(const ExperimentConfig& cfg) {
  cfg.validate();
  const auto t0 = std::chrono::steady_clock::now();
  const EquationSpec& spec = cfg.equation;
  RunSummary s;
  s.config_hash = cfg.hash();

  auto grid = make_run_grid(cfg);
  std::optional<Reference> ref;
  if (spec.sign == Nonlinearity::focusing && !spec.outside_main_theorems()) ref = obtain_reference(cfg);
  const GroundState* gs = ref && ref->ground_state ? &*ref->ground_state : nullptr;
  const Field u0 = make_initial_field(cfg, grid, gs);

  EvolveConfig ec = cfg.evolve;
  if (ref) ec.reference = ref->norms;
  s.outcome = evolve(u0, spec, ec);
  const auto& rec = s.outcome.records;
  s.initial = rec.front();
  if (ref)
    s.threshold = threshold_test(spec, s.initial.mass, s.initial.energy, std::sqrt(s.initial.kinetic), ref->norms);

  // Mass and the algebraic agreement of the virial forms hold on every record.
  IdentityCheck mc{"mass conservation", 0.0, 1e-10, 0.0, true};
  IdentityCheck fc{"virial forms agree", 0.0, 1e-10, 0.0, true};
  for (const auto& r : rec) {
    if (s.initial.mass > 0.0) mc.lhs = std::max(mc.lhs, std::abs(r.mass / s.initial.mass - 1.0));
    fc.lhs = std::max(fc.lhs, virial_forms(r, spec).mutual_rel());
  }
  mc.rel_error = mc.lhs;
  mc.pass = mc.lhs <= mc.rhs;
  fc.rel_error = fc.lhs;
  fc.pass = fc.lhs <= fc.rhs;
  s.checks.push_back(mc);
  s.checks.push_back(fc);

  const auto strided = uniform_prefix(rec);
  const bool timed = cfg.evolve.record_interval > 0.0 && strided.size() >= 3;
  if (timed && s.outcome.status == RunStatus::completed && !grid->radial()) {
    s.checks.push_back(virial_identity_check(strided, spec, cfg.virial_tolerance).check);
    s.checks.push_back(morawetz_rate_check(strided, cfg.morawetz_tolerance));
  }
  if (timed && grid->radial()) {
    for (std::size_t i = 0; i < cfg.evolve.R_list.size(); ++i)
      s.localized.push_back(localized_virial_bound_check(strided, spec, i, cfg.evolve.R_list[i], true));
  }

  if (spec.sign == Nonlinearity::defocusing) {
    IdentityCheck kb{"kinetic <= 2 E(u0)", 0.0, 2.0 * s.initial.energy + 1e-6, 0.0, true};
    for (const auto& r : rec) kb.lhs = std::max(kb.lhs, r.kinetic);
    kb.rel_error = kb.rhs > 0.0 ? std::max(0.0, kb.lhs / kb.rhs - 1.0) : 0.0;
    kb.pass = kb.lhs <= kb.rhs;
    s.checks.push_back(kb);
    IdentityCheck nb{"no blow-up detected", s.outcome.status == RunStatus::blowup_detected ? 1.0 : 0.0, 0.0, 0.0,
                     s.outcome.status != RunStatus::blowup_detected};
    s.checks.push_back(nb);
  }

  if (s.outcome.tstar_estimate && s.outcome.glassey_bound) {
    const double ts = *s.outcome.tstar_estimate, gb = *s.outcome.glassey_bound;
    s.checks.push_back({"Tstar <= 1.2 glassey bound", ts, 1.2 * gb, ts / gb - 1.0, ts <= 1.2 * gb});
  }

  if (s.threshold && s.threshold->verdict == Verdict::blowup_branch &&
      s.threshold->regime == Regime::intercritical && s.initial.energy >= 0.0) {
    // The gradient side of the blow-up condition persists until detection.
    const double beta = classify_criticality(spec).beta_c;
    IdentityCheck gc{"grad-mass product stays above Q", std::numeric_limits<double>::infinity(),
                     s.threshold->bound_gm, 0.0, true};
    for (const auto& r : rec) gc.lhs = std::min(gc.lhs, std::sqrt(r.kinetic) * std::pow(r.mass, 0.5 * beta));
    gc.rel_error = gc.lhs / gc.rhs - 1.0;
    gc.pass = gc.lhs > gc.rhs;
    s.checks.push_back(gc);
  }

  s.wall_seconds = seconds_since(t0);
  return s;
}

std::string csv_header(const ExperimentConfig& cfg) {
  std::string h = "t,mass,energy,kinetic,potential_term,nonlinear_term,virial";
  if (cfg.grid.mode == GridMode::radial)
    for (double R : cfg.evolve.R_list) h += ",virial_phiR_" + num(R);
  h += ",morawetz_abs";
  if (cfg.equation.d == 3) h += ",l4_density";
  h += ",linfty";
  return h;
}

std::string records_csv(const ExperimentConfig& cfg, std::span<const ObservableRecord> records,
                        const std::string& config_hash) {
  const bool radial = cfg.grid.mode == GridMode::radial;
  std::string out = "# config_hash=" + config_hash + "\n" + csv_header(cfg) + "\n";
  for (const auto& r : records) {
    out += num(r.t) + ',' + num(r.mass) + ',' + num(r.energy) + ',' + num(r.kinetic) + ',' + num(r.potential_term) +
           ',' + num(r.nonlinear_term) + ',' + num(r.virial);
    if (radial)
      for (double v : r.virial_phiR) out += ',' + num(v);
    out += ',' + num(r.morawetz_abs);
    if (cfg.equation.d == 3) out += ',' + num(r.l4_density);
    out += ',' + num(r.linfty) + '\n';
  }
  return out;
}

namespace {

json threshold_json(const ThresholdVerdict& v) {
  return json{{"verdict", to_string(v.verdict)}, {"regime", to_string(v.regime)},
              {"quantity_em", v.quantity_em},    {"bound_em", v.bound_em},
              {"quantity_gm", v.quantity_gm},    {"bound_gm", v.bound_gm}};
}

json provenance(const std::string& hash) {
  return json{{"config_hash", hash}, {"code_version", code_version()}, {"kernels", kernels::active().name}};
}

}  // namespace

std::string summary_json(const ExperimentConfig& cfg, const RunSummary& s) {
  const auto& o = s.outcome;
  json j;
  j["config_hash"] = s.config_hash;
  j["provenance"] = provenance(s.config_hash);
  j["equation"] = {{"d", cfg.equation.d},
                   {"c", cfg.equation.c},
                   {"sigma", cfg.equation.sigma},
                   {"alpha", cfg.equation.alpha},
                   {"nonlinearity", to_string(cfg.equation.sign)},
                   {"regime", to_string(classify_criticality(cfg.equation).regime)}};
  j["outcome"] = {{"status", to_string(o.status)},
                  {"t_reached", o.t_reached},
                  {"tstar_estimate", opt(o.tstar_estimate)},
                  {"glassey_bound", opt(o.glassey_bound)},
                  {"steps", o.steps},
                  {"records", o.records.size()},
                  {"checkpoints", o.checkpoints.size()},
                  {"warnings", o.warnings}};
  j["initial"] = {{"mass", s.initial.mass},
                  {"energy", s.initial.energy},
                  {"kinetic", s.initial.kinetic},
                  {"virial", s.initial.virial}};
  j["threshold"] = s.threshold ? threshold_json(*s.threshold) : json(nullptr);
  json checks = json::array();
  for (const auto& c : s.checks) checks.push_back(check_json(c));
  j["checks"] = checks;
  json loc = json::array();
  for (const auto& l : s.localized)
    loc.push_back({{"R", l.R},
                   {"slack", l.slack},
                   {"identity_slack", l.identity_slack},
                   {"excess", l.excess},
                   {"consistency", l.consistency}});
  j["localized_virial"] = loc;
  j["checks_pass"] = s.checks_pass();
  return j.dump(2) + "\n";
}

void write_run(const ExperimentConfig& cfg, const RunSummary& s) {
  const fs::path dir = cfg.output_dir;
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw Error(ErrorCode::resource, "cannot create " + dir.string() + ": " + ec.message());
  write_file_atomic(dir / "timeseries.csv", records_csv(cfg, s.outcome.records, s.config_hash));
  write_file_atomic(dir / "summary.json", summary_json(cfg, s));
  write_file_atomic(dir / "timing.json",
                    json{{"config_hash", s.config_hash}, {"wall_seconds", s.wall_seconds}}.dump(2) + "\n");
  write_file_atomic(dir / "config.ini", "# config_hash=" + s.config_hash + "\n" + cfg.canonical());
  if (cfg.write_checkpoints && !s.outcome.checkpoints.empty()) {
    fs::create_directories(dir / "checkpoints", ec);
    if (ec) throw Error(ErrorCode::resource, "cannot create checkpoint directory: " + ec.message());
    for (std::size_t i = 0; i < s.outcome.checkpoints.size(); ++i) {
      char name[32];
      std::snprintf(name, sizeof name, "ckpt_%04zu.json", i);
      write_checkpoint(s.outcome.checkpoints[i], dir / "checkpoints" / name, s.config_hash);
    }
  }
}

namespace {

void write_reference_artifact(const ExperimentConfig& cfg, const Reference& ref, const fs::path& path) {
  std::error_code ec;
  if (path.has_parent_path()) fs::create_directories(path.parent_path(), ec);
  if (ec) throw Error(ErrorCode::resource, "cannot create " + path.parent_path().string());
  const std::string hash = cfg.hash();
  fs::path field = path;
  field.replace_extension();
  field += "_field.json";
  json j;
  if (ref.bubble) {
    const Bubble& b = *ref.bubble_state;
    j = {{"kind", "bubble"},           {"d", 3},
         {"alpha", 4.0},               {"kinetic", b.kineticW},
         {"l6", b.lqW},                {"energy", b.energyW},
         {"cSE", b.cSE},               {"r_max", b.r_max},
         {"truncation_estimate", b.truncation_estimate()}};
    write_checkpoint(b.profile, field, hash);
  } else {
    const GroundState& g = *ref.ground_state;
    j = {{"kind", "groundstate"},
         {"d", g.d},
         {"alpha", g.alpha},
         {"mass", g.massQ},
         {"kinetic", g.kineticQ},
         {"lp", g.lpq},
         {"energy", g.energy()},
         {"residual", g.residual},
         {"cGN", g.cGN},
         {"cGN_closed_form", sharp_gn_constant_closed_form(g, g.d, g.alpha)},
         {"iterations", g.iterations},
         {"grid", {{"mode", to_string(g.profile.grid->mode())},
                   {"n", g.profile.grid->n()},
                   {"extent", g.profile.grid->extent()}}}};
    write_checkpoint(g.profile, field, hash);
  }
  j["field"] = field.filename().string();
  j["config_hash"] = hash;
  j["provenance"] = provenance(hash);
  write_file_atomic(path, j.dump(2) + "\n");
}

}  // namespace

int cmd_groundstate(const ExperimentConfig& cfg, std::ostream& log) {
  cfg.validate();
  const Reference ref = solve_reference(cfg);
  const fs::path path = cfg.reference.path.empty() ? cfg.output_dir / "groundstate.json" : cfg.reference.path;
  write_reference_artifact(cfg, ref, path);
  if (ref.bubble) {
    log << "bubble W: ||grad W||^2 = " << num(ref.norms.kinetic) << ", E(W) = " << num(ref.norms.energy) << "\n";
  } else {
    const GroundState& g = *ref.ground_state;
    log << "ground state Q (d=" << g.d << ", alpha=" << num(g.alpha) << "): mass " << num(g.massQ) << ", kinetic "
        << num(g.kineticQ) << ", residual " << num(g.residual) << ", " << g.iterations << " iterations\n";
  }
  log << "wrote " << path.string() << "\n";
  return exit_ok;
}

int cmd_evolve(const ExperimentConfig& cfg, std::ostream& log) {
  const RunSummary s = run_experiment(cfg);
  write_run(cfg, s);
  const auto& o = s.outcome;
  log << "status " << to_string(o.status) << " at t = " << num(o.t_reached) << " after " << o.steps << " steps\n";
  if (o.tstar_estimate) log << "Tstar estimate " << num(*o.tstar_estimate) << "\n";
  if (o.glassey_bound) log << "Glassey bound " << num(*o.glassey_bound) << "\n";
  if (s.threshold) log << "threshold verdict " << to_string(s.threshold->verdict) << "\n";
  for (const auto& c : s.checks)
    log << (c.pass ? "  ok   " : "  FAIL ") << c.name << ": " << num(c.lhs) << " vs " << num(c.rhs) << "\n";
  for (const auto& w : o.warnings) log << "warning: " << w << "\n";
  log << "wrote " << cfg.output_dir.string() << "\n";
  return o.status == RunStatus::invalid ? exit_numerical : exit_ok;
}

int cmd_classify(const ExperimentConfig& cfg, std::ostream& log) {
  cfg.validate();
  const EquationSpec& spec = cfg.equation;
  auto grid = make_run_grid(cfg);
  const std::optional<Reference> ref = obtain_reference(cfg);
  const GroundState* gs = ref && ref->ground_state ? &*ref->ground_state : nullptr;
  const Field u0 = make_initial_field(cfg, grid, gs);
  const ObservableRecord r = record(u0, spec);
  const std::string hash = cfg.hash();

  json j;
  j["config_hash"] = hash;
  j["provenance"] = provenance(hash);
  j["initial"] = {{"mass", r.mass}, {"energy", r.energy}, {"kinetic", r.kinetic}};
  std::string verdict = std::string(to_string(Verdict::not_applicable));
  if (ref) {
    const ThresholdVerdict v = threshold_test(spec, r.mass, r.energy, std::sqrt(r.kinetic), ref->norms);
    j["threshold"] = threshold_json(v);
    verdict = std::string(to_string(v.verdict));
    log << "regime " << to_string(v.regime) << "\n"
        << "  E M^beta (or E) = " << num(v.quantity_em) << " vs " << num(v.bound_em) << "\n"
        << "  gradient side   = " << num(v.quantity_gm) << " vs " << num(v.bound_gm) << "\n";
  } else {
    j["threshold"] = {{"verdict", verdict}, {"regime", to_string(classify_criticality(spec).regime)}};
    log << "regime " << to_string(classify_criticality(spec).regime) << " has no threshold test\n";
  }
  j["reference"] = ref ? json{{"kind", ref->bubble ? "bubble" : "groundstate"},
                              {"mass", ref->norms.mass},
                              {"kinetic", ref->norms.kinetic},
                              {"loaded", ref->loaded}}
                       : json(nullptr);
  std::error_code ec;
  fs::create_directories(cfg.output_dir, ec);
  if (ec) throw Error(ErrorCode::resource, "cannot create " + cfg.output_dir.string());
  write_file_atomic(cfg.output_dir / "classify.json", j.dump(2) + "\n");
  log << "verdict " << verdict << "\n";
  return exit_ok;
}

ExperimentConfig sweep_entry(const ExperimentConfig& cfg, std::size_t index) {
  ExperimentConfig e = cfg;
  const double v = cfg.sweep.values.at(index);
  switch (cfg.sweep.parameter) {
    case SweepParameter::amplitude: e.initial.amplitude = v; break;
    case SweepParameter::lambda: e.initial.lambda = v; break;
    case SweepParameter::alpha: e.equation.alpha = v; break;
    case SweepParameter::sigma: e.equation.sigma = v; break;
    case SweepParameter::c: e.equation.c = v; break;
  }
  char name[32];
  std::snprintf(name, sizeof name, "sweep_%03zu", index);
  e.output_dir = cfg.output_dir / name;
  e.sweep.values.clear();
  return e;
}

std::vector<std::pair<std::size_t, std::size_t>> transition_brackets(const std::vector<SweepRow>& rows) {
  std::vector<std::pair<std::size_t, std::size_t>> out;
  const auto comp = std::string(to_string(RunStatus::completed));
  const auto blow = std::string(to_string(RunStatus::blowup_detected));
  for (std::size_t i = 0; i + 1 < rows.size(); ++i) {
    const auto& a = rows[i].status;
    const auto& b = rows[i + 1].status;
    if ((a == comp && b == blow) || (a == blow && b == comp)) out.emplace_back(i, i + 1);
  }
  return out;
}

std::vector<SweepRow> run_sweep(const ExperimentConfig& cfg, bool write) {
  cfg.validate();
  const std::size_t n = cfg.sweep.values.size();
  if (n == 0) throw Error(ErrorCode::config_invalid, "sweep.values is empty");
  std::vector<ExperimentConfig> entries;
  for (std::size_t i = 0; i < n; ++i) {
    entries.push_back(sweep_entry(cfg, i));
    entries.back().validate();
  }
  std::vector<SweepRow> rows(n);
  std::atomic<std::size_t> next{0};
  std::mutex fatal_mutex;
  std::exception_ptr fatal;
  auto worker = [&] {
    for (std::size_t i = next++; i < n; i = next++) {
      SweepRow& row = rows[i];
      row.value = cfg.sweep.values[i];
      try {
        const RunSummary s = run_experiment(entries[i]);
        if (write) write_run(entries[i], s);
        row.status = std::string(to_string(s.outcome.status));
        row.t_reached = s.outcome.t_reached;
        row.tstar = s.outcome.tstar_estimate;
        row.glassey = s.outcome.glassey_bound;
        row.energy0 = s.initial.energy;
        row.mass0 = s.initial.mass;
      } catch (const Error& e) {
        if (e.code() == ErrorCode::resource) {
          std::lock_guard<std::mutex> lock(fatal_mutex);
          if (!fatal) fatal = std::current_exception();
        }
        row.status = std::string("error: ") + e.what();
      }
    }
  };
  const unsigned workers = std::min<unsigned>(cfg.sweep.workers, static_cast<unsigned>(n));
  {
    std::vector<std::jthread> pool;
    for (unsigned w = 0; w < workers; ++w) pool.emplace_back(worker);
  }
  if (fatal) std::rethrow_exception(fatal);
  return rows;
}

int cmd_sweep(const ExperimentConfig& cfg, std::ostream& log) {
  const std::vector<SweepRow> rows = run_sweep(cfg, true);
  const std::string hash = cfg.hash();
  std::string table = "# config_hash=" + hash + "\nindex," + std::string(to_string(cfg.sweep.parameter)) +
                      ",status,t_reached,tstar_estimate,glassey_bound,energy0,mass0\n";
  json runs = json::array();
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const auto& r = rows[i];
    table += std::to_string(i) + ',' + num(r.value) + ',' + r.status + ',' + num(r.t_reached) + ',' +
             (r.tstar ? num(*r.tstar) : "") + ',' + (r.glassey ? num(*r.glassey) : "") + ',' + num(r.energy0) + ',' +
             num(r.mass0) + '\n';
    runs.push_back({{"value", r.value},
                    {"status", r.status},
                    {"t_reached", r.t_reached},
                    {"tstar_estimate", opt(r.tstar)},
                    {"glassey_bound", opt(r.glassey)},
                    {"energy0", r.energy0},
                    {"mass0", r.mass0},
                    {"dir", sweep_entry(cfg, i).output_dir.filename().string()}});
    log << to_string(cfg.sweep.parameter) << " = " << num(r.value) << ": " << r.status << "\n";
  }
  json brackets = json::array();
  for (auto [a, b] : transition_brackets(rows)) {
    brackets.push_back({rows[a].value, rows[b].value});
    log << "transition between " << num(rows[a].value) << " and " << num(rows[b].value) << "\n";
  }
  json j{{"config_hash", hash},
         {"provenance", provenance(hash)},
         {"parameter", to_string(cfg.sweep.parameter)},
         {"runs", runs},
         {"transitions", brackets}};
  write_file_atomic(cfg.output_dir / "sweep.csv", table);
  write_file_atomic(cfg.output_dir / "sweep.json", j.dump(2) + "\n");
  const bool any_error = std::any_of(rows.begin(), rows.end(), [](const SweepRow& r) {
    return r.status.rfind("error", 0) == 0 || r.status == to_string(RunStatus::invalid);
  });
  return any_error ? exit_numerical : exit_ok;
}

std::vector<fs::path> hash_mismatches(const fs::path& dir, const std::string& hash) {
  std::vector<fs::path> bad;
  if (!fs::is_directory(dir)) return bad;
  std::vector<fs::path> files;
  for (const auto& sub : {dir, dir / "checkpoints"}) {
    if (!fs::is_directory(sub)) continue;
    for (const auto& e : fs::directory_iterator(sub))
      if (e.is_regular_file()) files.push_back(e.path());
  }
  std::sort(files.begin(), files.end());
  for (const auto& f : files) {
    const auto ext = f.extension().string();
    std::string found;
    if (ext == ".csv" || ext == ".ini") {
      std::ifstream in(f);
      std::string line;
      std::getline(in, line);
      const std::string key = "# config_hash=";
      if (line.rfind(key, 0) == 0) found = line.substr(key.size());
    } else if (ext == ".json") {
      try {
        const json j = json::parse(read_file(f));
        found = j.value("config_hash", "");
      } catch (const json::exception&) {
      }
    } else {
      continue;
    }
    if (found != hash) bad.push_back(f);
  }
  return bad;
}

int cmd_check(const ExperimentConfig& cfg, std::ostream& log) {
  cfg.validate();
  const std::string hash = cfg.hash();
  std::vector<IdentityCheck> suite;

  // Artifacts already in the run directory must belong to this config.
  const auto stale = hash_mismatches(cfg.output_dir, hash);
  suite.push_back({"run directory config_hash", static_cast<double>(stale.size()), 0.0, 0.0, stale.empty()});
  for (const auto& f : stale) log << "hash mismatch: " << f.string() << "\n";

  const RunSummary s = run_experiment(cfg);
  suite.insert(suite.end(), s.checks.begin(), s.checks.end());
  suite.push_back({"run status valid", s.outcome.status == RunStatus::invalid ? 1.0 : 0.0, 0.0, 0.0,
                   s.outcome.status != RunStatus::invalid});

  // Time reversibility of one step.
  {
    auto grid = make_run_grid(cfg);
    const Field u0 = make_initial_field(cfg, grid, nullptr);
    Field u = u0;
    Propagator p(grid, cfg.equation, cfg.evolve.epsilon_reg);
    p.step(u, cfg.evolve.dt0);
    p.step(u, -cfg.evolve.dt0);
    double diff = 0.0;
    for (std::size_t i = 0; i < u.size(); ++i) diff += std::norm(u.values[i] - u0.values[i]) * grid->quad_weight()[i];
    const double m0 = mass(u0);
    const double rel = m0 > 0.0 ? std::sqrt(diff / m0) : std::sqrt(diff);
    suite.push_back({"step reversibility", rel, 1e-10, rel, rel <= 1e-10});
  }

  // Inequality oracles on seeded random fields.
  std::mt19937_64 rng(cfg.seed);
  auto grid = make_run_grid(cfg);
  const double k_max = grid->radial() ? 0.0 : 0.25 * std::abs(grid->wavenumbers()[grid->n() / 2]);
  if (has_threshold_profile(cfg.equation) && classify_criticality(cfg.equation).regime != Regime::energy_critical) {
    const GroundState gs = solve_ground_state(cfg.equation.d, cfg.equation.alpha, grid, cfg.reference.tol);
    std::size_t violations = 0;
    for (std::size_t i = 0; i < cfg.random_fields; ++i)
      if (!gn_inequality_oracle(random_band_limited_field(grid, rng, k_max), gs).holds) ++violations;
    suite.push_back({"Gagliardo-Nirenberg on random fields", static_cast<double>(violations), 0.0, 0.0,
                     violations == 0});
  }
  if (cfg.equation.d == 3) {
    std::size_t violations = 0;
    for (std::size_t i = 0; i < cfg.random_fields; ++i)
      if (!hardy_oracle(random_band_limited_field(grid, rng, k_max)).holds) ++violations;
    suite.push_back({"Hardy on random fields", static_cast<double>(violations), 0.0, 0.0, violations == 0});
  }

  bool all = true;
  json checks = json::array();
  for (const auto& c : suite) {
    all = all && c.pass;
    checks.push_back(check_json(c));
    log << (c.pass ? "PASS " : "FAIL ") << c.name << ": " << num(c.lhs) << " vs " << num(c.rhs) << "\n";
  }
  std::error_code ec;
  fs::create_directories(cfg.output_dir, ec);
  if (ec) throw Error(ErrorCode::resource, "cannot create " + cfg.output_dir.string());
  write_file_atomic(cfg.output_dir / "check.json",
                    json{{"config_hash", hash}, {"provenance", provenance(hash)}, {"checks", checks}, {"pass", all}}
                            .dump(2) +
                        "\n");
  return all ? exit_ok : exit_check_failed;
}

}  // namespace nlsrep
