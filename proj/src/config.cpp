#include "nlsrep/config.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>
#include <openssl/evp.h>

#include "nlsrep/error.hpp"
#include "nlsrep/field_io.hpp"

namespace nlsrep {

namespace pt = boost::property_tree;

std::string_view to_string(InitialKind k) {
  switch (k) {
    case InitialKind::gaussian: return "gaussian";
    case InitialKind::groundstate: return "groundstate";
    case InitialKind::checkpoint: return "checkpoint";
  }
  return "?";
}

std::string_view to_string(SweepParameter p) {
  switch (p) {
    case SweepParameter::amplitude: return "amplitude";
    case SweepParameter::lambda: return "lambda";
    case SweepParameter::alpha: return "alpha";
    case SweepParameter::sigma: return "sigma";
    case SweepParameter::c: return "c";
  }
  return "?";
}

namespace {

[[noreturn]] void bad(const std::string& msg) { throw Error(ErrorCode::config_invalid, msg); }

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return std::string(s.substr(b, e - b + 1));
}

double to_double(const std::string& key, const std::string& raw) {
  const std::string s = trim(raw);
  double v = 0.0;
  const auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || p != s.data() + s.size() || !std::isfinite(v))
    bad("key '" + key + "': expected a finite number, got '" + s + "'");
  return v;
}

std::uint64_t to_uint(const std::string& key, const std::string& raw) {
  const std::string s = trim(raw);
  std::uint64_t v = 0;
  const auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || p != s.data() + s.size() || s.empty())
    bad("key '" + key + "': expected a non-negative integer, got '" + s + "'");
  return v;
}

bool to_bool(const std::string& key, const std::string& raw) {
  const std::string s = trim(raw);
  if (s == "true" || s == "1" || s == "yes") return true;
  if (s == "false" || s == "0" || s == "no") return false;
  bad("key '" + key + "': expected true or false, got '" + s + "'");
}

std::vector<double> to_list(const std::string& key, const std::string& raw) {
  std::vector<double> out;
  std::stringstream ss(raw);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (trim(item).empty()) continue;
    out.push_back(to_double(key, item));
  }
  return out;
}

std::string fmt(double v) {
  char buf[32];
  const auto [p, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, p);
}

std::string fmt_list(const std::vector<double>& v) {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) s += (i ? ", " : "") + fmt(v[i]);
  return s;
}

const std::map<std::string, std::set<std::string>>& schema() {
  static const std::map<std::string, std::set<std::string>> s{
      {"equation", {"d", "c", "sigma", "alpha", "nonlinearity"}},
      {"grid", {"mode", "n", "extent"}},
      {"initial", {"type", "amplitude", "width", "center", "phase_k", "lambda", "path"}},
      {"evolve",
       {"dt0", "t_end", "adaptivity", "cfl", "blowup_grad_factor", "blowup_dt_floor", "record_interval",
        "checkpoint_stride", "max_steps", "epsilon_reg"}},
      {"observables", {"R", "virial_tolerance", "morawetz_tolerance"}},
      {"reference", {"mode", "n", "extent", "tol", "path"}},
      {"sweep", {"parameter", "values", "workers"}},
      {"output", {"dir", "checkpoints"}},
      {"random", {"seed", "fields"}},
  };
  return s;
}

InitialKind parse_initial_kind(const std::string& s) {
  if (s == "gaussian") return InitialKind::gaussian;
  if (s == "groundstate" || s == "groundstate-scaled") return InitialKind::groundstate;
  if (s == "checkpoint") return InitialKind::checkpoint;
  bad("unknown initial type '" + s + "'");
}

SweepParameter parse_sweep_parameter(const std::string& s) {
  if (s == "amplitude") return SweepParameter::amplitude;
  if (s == "lambda") return SweepParameter::lambda;
  if (s == "alpha") return SweepParameter::alpha;
  if (s == "sigma") return SweepParameter::sigma;
  if (s == "c") return SweepParameter::c;
  bad("unknown sweep parameter '" + s + "'");
}

std::filesystem::path resolve(const std::filesystem::path& base, const std::string& raw) {
  std::filesystem::path p(trim(raw));
  if (p.empty() || p.is_absolute() || base.empty()) return p;
  return base / p;
}

template <class F>
auto translated(const std::string& key, F&& f) {
  try {
    return f();
  } catch (const Error& e) {
    if (e.code() == ErrorCode::config_invalid) throw;
    bad("key '" + key + "': " + e.what());
  }
}

}  // namespace

void ExperimentConfig::validate() const {
  translated("equation", [&] {
    equation.validate();
    return 0;
  });
  translated("evolve", [&] {
    evolve.validate();
    return 0;
  });
  if (grid.n < 8 || (grid.n & (grid.n - 1)) != 0) bad("grid.n must be a power of two >= 8");
  if (!(grid.extent > 0.0)) bad("grid.extent must be positive");
  if (reference.grid.n < 8 || (reference.grid.n & (reference.grid.n - 1)) != 0)
    bad("reference.n must be a power of two >= 8");
  if (!(reference.grid.extent > 0.0)) bad("reference.extent must be positive");
  if (!(reference.tol > 0.0)) bad("reference.tol must be positive");
  if (!evolve.R_list.empty() && grid.mode != GridMode::radial)
    bad("observables.R (localized virial) needs grid.mode = radial");
  if (initial.kind == InitialKind::gaussian && !(initial.width > 0.0)) bad("initial.width must be positive");
  if (initial.kind == InitialKind::checkpoint && initial.path.empty()) bad("initial.path is required for checkpoints");
  if (grid.mode == GridMode::radial && initial.kind == InitialKind::gaussian &&
      (initial.center != 0.0 || initial.phase_k != 0.0))
    bad("radial grids need a centred Gaussian without phase");
  if (!(virial_tolerance > 0.0) || !(morawetz_tolerance > 0.0)) bad("tolerances must be positive");
  if (sweep.workers == 0) bad("sweep.workers must be at least 1");
}

std::string ExperimentConfig::canonical() const {
  std::ostringstream o;
  o << "[equation]\n"
    << "d = " << equation.d << "\nc = " << fmt(equation.c) << "\nsigma = " << fmt(equation.sigma)
    << "\nalpha = " << fmt(equation.alpha) << "\nnonlinearity = " << to_string(equation.sign) << "\n\n";
  o << "[grid]\nmode = " << to_string(grid.mode) << "\nn = " << grid.n << "\nextent = " << fmt(grid.extent) << "\n\n";
  o << "[initial]\ntype = " << to_string(initial.kind) << "\namplitude = " << fmt(initial.amplitude)
    << "\nwidth = " << fmt(initial.width) << "\ncenter = " << fmt(initial.center)
    << "\nphase_k = " << fmt(initial.phase_k) << "\nlambda = " << fmt(initial.lambda)
    << "\npath = " << initial.path.string() << "\n\n";
  o << "[evolve]\ndt0 = " << fmt(evolve.dt0) << "\nt_end = " << fmt(evolve.t_end)
    << "\nadaptivity = " << to_string(evolve.adaptivity) << "\ncfl = " << fmt(evolve.cfl)
    << "\nblowup_grad_factor = " << fmt(evolve.blowup_grad_factor)
    << "\nblowup_dt_floor = " << fmt(evolve.blowup_dt_floor) << "\nrecord_interval = " << fmt(evolve.record_interval)
    << "\ncheckpoint_stride = " << evolve.checkpoint_stride << "\nmax_steps = " << evolve.max_steps
    << "\nepsilon_reg = " << fmt(evolve.epsilon_reg) << "\n\n";
  o << "[observables]\nR = " << fmt_list(evolve.R_list) << "\nvirial_tolerance = " << fmt(virial_tolerance)
    << "\nmorawetz_tolerance = " << fmt(morawetz_tolerance) << "\n\n";
  o << "[reference]\nmode = " << to_string(reference.grid.mode) << "\nn = " << reference.grid.n
    << "\nextent = " << fmt(reference.grid.extent) << "\ntol = " << fmt(reference.tol)
    << "\npath = " << reference.path.string() << "\n\n";
  o << "[sweep]\nparameter = " << to_string(sweep.parameter) << "\nvalues = " << fmt_list(sweep.values)
    << "\nworkers = " << sweep.workers << "\n\n";
  o << "[output]\ndir = " << output_dir.string() << "\ncheckpoints = " << (write_checkpoints ? "true" : "false")
    << "\n\n";
  o << "[random]\nseed = " << seed << "\nfields = " << random_fields << "\n";
  return o.str();
}

std::string sha256_hex(std::string_view bytes) {
  unsigned char md[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(bytes.data(), bytes.size(), md, &len, EVP_sha256(), nullptr) != 1)
    throw Error(ErrorCode::resource, "SHA-256 digest failed");
  static constexpr char hex[] = "0123456789abcdef";
  std::string out;
  out.reserve(2 * len);
  for (unsigned int i = 0; i < len; ++i) {
    out += hex[md[i] >> 4];
    out += hex[md[i] & 15];
  }
  return out;
}

std::string ExperimentConfig::hash() const {
  std::string text = canonical();
  const auto b = text.find("[output]");
  const auto e = text.find("[random]");
  text.erase(b, e - b);
  return sha256_hex(text);
}

ExperimentConfig parse_config(const std::string& text, const std::filesystem::path& base_dir) {
  pt::ptree tree;
  try {
    std::istringstream in(text);
    pt::ini_parser::read_ini(in, tree);
  } catch (const pt::ini_parser_error& e) {
    bad(std::string("malformed config: ") + e.message() + " (line " + std::to_string(e.line()) + ")");
  }

  ExperimentConfig cfg;
  const auto& sch = schema();
  for (const auto& [section, body] : tree) {
    const auto it = sch.find(section);
    if (it == sch.end()) {
      if (body.empty()) bad("key '" + section + "' outside any section");
      bad("unknown section [" + section + "]");
    }
    for (const auto& [key, value] : body) {
      if (!it->second.contains(key)) bad("unknown key '" + key + "' in [" + section + "]");
      const std::string full = section + "." + key;
      const std::string v = value.get_value<std::string>();
      if (section == "equation") {
        if (key == "d") cfg.equation.d = static_cast<int>(to_uint(full, v));
        else if (key == "c") cfg.equation.c = to_double(full, v);
        else if (key == "sigma") cfg.equation.sigma = to_double(full, v);
        else if (key == "alpha") cfg.equation.alpha = to_double(full, v);
        else cfg.equation.sign = translated(full, [&] { return parse_nonlinearity(trim(v)); });
      } else if (section == "grid" || section == "reference") {
        GridSpec& g = section == "grid" ? cfg.grid : cfg.reference.grid;
        if (key == "mode") g.mode = translated(full, [&] { return parse_grid_mode(trim(v)); });
        else if (key == "n") g.n = to_uint(full, v);
        else if (key == "extent") g.extent = to_double(full, v);
        else if (key == "tol") cfg.reference.tol = to_double(full, v);
        else cfg.reference.path = resolve(base_dir, v);
      } else if (section == "initial") {
        if (key == "type") cfg.initial.kind = parse_initial_kind(trim(v));
        else if (key == "amplitude") cfg.initial.amplitude = to_double(full, v);
        else if (key == "width") cfg.initial.width = to_double(full, v);
        else if (key == "center") cfg.initial.center = to_double(full, v);
        else if (key == "phase_k") cfg.initial.phase_k = to_double(full, v);
        else if (key == "lambda") cfg.initial.lambda = to_double(full, v);
        else cfg.initial.path = resolve(base_dir, v);
      } else if (section == "evolve") {
        EvolveConfig& e = cfg.evolve;
        if (key == "dt0") e.dt0 = to_double(full, v);
        else if (key == "t_end") e.t_end = to_double(full, v);
        else if (key == "adaptivity") e.adaptivity = translated(full, [&] { return parse_adaptivity(trim(v)); });
        else if (key == "cfl") e.cfl = to_double(full, v);
        else if (key == "blowup_grad_factor") e.blowup_grad_factor = to_double(full, v);
        else if (key == "blowup_dt_floor") e.blowup_dt_floor = to_double(full, v);
        else if (key == "record_interval") e.record_interval = to_double(full, v);
        else if (key == "checkpoint_stride") e.checkpoint_stride = to_uint(full, v);
        else if (key == "max_steps") e.max_steps = to_uint(full, v);
        else e.epsilon_reg = to_double(full, v);
      } else if (section == "observables") {
        if (key == "R") cfg.evolve.R_list = to_list(full, v);
        else if (key == "virial_tolerance") cfg.virial_tolerance = to_double(full, v);
        else cfg.morawetz_tolerance = to_double(full, v);
      } else if (section == "sweep") {
        if (key == "parameter") cfg.sweep.parameter = parse_sweep_parameter(trim(v));
        else if (key == "values") cfg.sweep.values = to_list(full, v);
        else cfg.sweep.workers = static_cast<unsigned>(to_uint(full, v));
      } else if (section == "output") {
        if (key == "dir") cfg.output_dir = resolve(base_dir, v);
        else cfg.write_checkpoints = to_bool(full, v);
      } else {
        if (key == "seed") cfg.seed = to_uint(full, v);
        else cfg.random_fields = to_uint(full, v);
      }
    }
  }
  cfg.validate();
  return cfg;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  const std::string text = read_file(path);
  return parse_config(text, path.parent_path());
}

}  // namespace nlsrep
