#include "hpic/config.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "hpic/errors.hpp"
#include "hpic/io.hpp"

namespace hpic {

namespace {

constexpr double kTwoPi = 6.283185307179586476925287;

std::string trim(const std::string& s) {
  const auto a = s.find_first_not_of(" \t\r");
  if (a == std::string::npos) return "";
  const auto b = s.find_last_not_of(" \t\r");
  return s.substr(a, b - a + 1);
}

// Bare keys (no section, no dot) bind to their canonical section so a
// minimal file like "scenario = landau" just works.
const std::map<std::string, std::string>& bare_aliases() {
  static const std::map<std::string, std::string> m = {
      {"scenario", "scenario.type"}, {"type", "scenario.type"},
      {"np", "scenario.np"},         {"seed", "scenario.seed"},
      {"sampling", "scenario.sampling"},
      {"alpha", "scenario.alpha"},   {"k", "scenario.k"},
      {"vmax", "scenario.vmax"},     {"l", "scenario.l"},
      {"r_minus", "scenario.r_minus"}, {"r_plus", "scenario.r_plus"},
      {"eps", "scenario.eps"},       {"b_ext", "scenario.b_ext"},
      {"domain", "scenario.domain"},
      {"scheme", "run.scheme"},      {"dt", "run.dt"},
      {"T", "run.T"},                {"out_of_domain", "run.out_of_domain"},
      {"n_cells", "grid.n_cells"},   {"order", "grid.order"},
      {"bc", "grid.bc"},
      {"threads", "parallel.threads"}, {"deterministic", "parallel.deterministic"},
  };
  return m;
}

const std::set<std::string>& known_keys() {
  static const std::set<std::string> k = {
      "scenario.type",     "scenario.np",        "scenario.seed",
      "scenario.sampling", "scenario.alpha",     "scenario.k",
      "scenario.vmax",     "scenario.l",         "scenario.r_minus",
      "scenario.r_plus",   "scenario.eps",       "scenario.b_ext",
      "scenario.domain",   "run.scheme",         "run.dt",
      "run.T",             "run.out_of_domain",  "grid.n_cells",
      "grid.order",        "grid.bc",            "kernel.shape",
      "kernel.degree",     "kernel.width",       "solver.tol",
      "solver.max_iter",   "solver.jacobi",      "solver.warm_start",
      "output.dir",        "output.diag_every",  "output.snapshot_every",
      "output.grid_every", "output.modes_every", "output.mode_max",
      "output.grid_size",  "output.snapshot_format",
      "output.dump_matrix", "output.dump_phi",
      "parallel.threads",  "parallel.deterministic",
      "fit.t_min",         "fit.max_peaks",      "fit.direct_fallback",
      "fit.min_peak_separation",
  };
  return k;
}

using KeyMap = std::map<std::string, std::string>;

KeyMap tokenize(const std::string& text) {
  KeyMap out;
  std::istringstream is(text);
  std::string line, section;
  int lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']') {
        throw ConfigError("line " + std::to_string(lineno) + ": malformed section header");
      }
      section = trim(line.substr(1, line.size() - 2));
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw ConfigError("line " + std::to_string(lineno) + ": expected key = value");
    }
    std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty()) throw ConfigError("line " + std::to_string(lineno) + ": empty key");
    if (key.find('.') == std::string::npos) {
      if (!section.empty()) {
        key = section + "." + key;
      } else {
        const auto it = bare_aliases().find(key);
        if (it == bare_aliases().end()) {
          throw ConfigError("unknown key '" + key + "' (line " + std::to_string(lineno) + ")");
        }
        key = it->second;
      }
    }
    if (!known_keys().count(key)) {
      throw ConfigError("unknown key '" + key + "' (line " + std::to_string(lineno) + ")");
    }
    out[key] = value;
  }
  return out;
}

double to_double(const std::string& key, const std::string& v) {
  try {
    std::size_t pos;
    const double d = std::stod(v, &pos);
    if (pos != v.size()) throw std::invalid_argument("");
    return d;
  } catch (...) {
    throw ConfigError("key '" + key + "': cannot parse '" + v + "' as a number");
  }
}

long long to_int(const std::string& key, const std::string& v) {
  try {
    std::size_t pos;
    const long long i = std::stoll(v, &pos);
    if (pos != v.size()) throw std::invalid_argument("");
    return i;
  } catch (...) {
    throw ConfigError("key '" + key + "': cannot parse '" + v + "' as an integer");
  }
}

bool to_bool(const std::string& key, const std::string& v) {
  if (v == "true" || v == "1" || v == "yes" || v == "on") return true;
  if (v == "false" || v == "0" || v == "no" || v == "off") return false;
  throw ConfigError("key '" + key + "': cannot parse '" + v + "' as a boolean");
}

std::vector<double> to_list(const std::string& key, const std::string& v) {
  std::vector<double> out;
  std::istringstream is(v);
  std::string cell;
  while (std::getline(is, cell, ',')) out.push_back(to_double(key, trim(cell)));
  return out;
}

struct Getter {
  const KeyMap& kv;
  bool has(const std::string& k) const { return kv.count(k) != 0; }
  double num(const std::string& k, double dflt) const {
    const auto it = kv.find(k);
    return it == kv.end() ? dflt : to_double(k, it->second);
  }
  long long integer(const std::string& k, long long dflt) const {
    const auto it = kv.find(k);
    return it == kv.end() ? dflt : to_int(k, it->second);
  }
  bool boolean(const std::string& k, bool dflt) const {
    const auto it = kv.find(k);
    return it == kv.end() ? dflt : to_bool(k, it->second);
  }
  std::string str(const std::string& k, const std::string& dflt) const {
    const auto it = kv.find(k);
    return it == kv.end() ? dflt : it->second;
  }
};

ScenarioKind parse_kind(const std::string& v) {
  if (v == "landau") return ScenarioKind::Landau;
  if (v == "two_stream") return ScenarioKind::TwoStream;
  if (v == "bump_on_tail") return ScenarioKind::BumpOnTail;
  if (v == "diocotron") return ScenarioKind::Diocotron;
  throw ConfigError("scenario.type: unknown scenario '" + v + "'");
}

}  // namespace

RunConfig parse_config_text(const std::string& text) {
  const KeyMap kv = tokenize(text);
  const Getter g{kv};

  RunConfig cfg;
  auto& sc = cfg.scenario;
  sc.kind = parse_kind(g.str("scenario.type", "landau"));
  const bool dio = sc.kind == ScenarioKind::Diocotron;

  // scenario parameters, with per-variant defaults
  switch (sc.kind) {
    case ScenarioKind::Landau:
      sc.alpha = 0.001;
      sc.k = 0.5;
      sc.vmax = 6.0;
      sc.np = 200000;
      break;
    case ScenarioKind::TwoStream:
      sc.alpha = 0.01;
      sc.k = 0.5;
      sc.vmax = 5.0;
      sc.np = 1000000;
      break;
    case ScenarioKind::BumpOnTail:
      sc.alpha = 0.04;
      sc.k = 0.3;
      sc.vmax = 8.0;
      sc.np = 1000000;
      break;
    case ScenarioKind::Diocotron:
      sc.alpha = 0.2;
      sc.np = 1000000;
      break;
  }
  sc.alpha = g.num("scenario.alpha", sc.alpha);
  sc.k = g.num("scenario.k", sc.k);
  sc.vmax = g.num("scenario.vmax", sc.vmax);
  sc.np = static_cast<std::uint64_t>(g.integer("scenario.np", static_cast<long long>(sc.np)));
  sc.seed = static_cast<std::uint64_t>(g.integer("scenario.seed", 1234));
  sc.l = static_cast<int>(g.integer("scenario.l", 5));
  sc.r_minus = g.num("scenario.r_minus", 5.0);
  sc.r_plus = g.num("scenario.r_plus", 8.0);
  sc.eps = g.num("scenario.eps", 0.1);
  {
    const std::string v = g.str("scenario.sampling", "mc");
    if (v == "mc" || v == "monte_carlo") {
      sc.sampling = SamplingMode::MonteCarlo;
    } else if (v == "stratified") {
      sc.sampling = SamplingMode::Stratified;
    } else {
      throw ConfigError("scenario.sampling: expected mc or stratified, got '" + v + "'");
    }
  }
  if (g.has("scenario.b_ext")) {
    const auto b = to_list("scenario.b_ext", kv.at("scenario.b_ext"));
    if (b.size() != 3) throw ConfigError("scenario.b_ext: expected three components");
    sc.b_ext = {b[0], b[1], b[2]};
  }

  if (g.has("scenario.domain")) {
    const auto d = to_list("scenario.domain", kv.at("scenario.domain"));
    if (d.size() == 2) {
      sc.lo = {d[0], 0.0};
      sc.hi = {d[1], 1.0};
    } else if (d.size() == 4) {
      sc.lo = {d[0], d[2]};
      sc.hi = {d[1], d[3]};
    } else {
      throw ConfigError("scenario.domain: expected lo,hi or lo0,hi0,lo1,hi1");
    }
  } else if (dio) {
    sc.lo = {-12.0, -12.0};
    sc.hi = {12.0, 12.0};
  } else {
    sc.lo = {0.0, 0.0};
    sc.hi = {kTwoPi / sc.k, 1.0};
    if (sc.kind == ScenarioKind::BumpOnTail) sc.hi[0] = 3.0 * kTwoPi / sc.k;
  }

  // run / grid defaults per variant
  cfg.scheme.dt = dio ? (sc.eps >= 0.1 ? 0.1 : 0.01) : 0.01;
  cfg.t_final = sc.kind == ScenarioKind::TwoStream ? 20.0 : 30.0;
  cfg.cells = dio ? std::array<int, 2>{256, 256}
                  : std::array<int, 2>{sc.kind == ScenarioKind::BumpOnTail ? 256 : 128, 1};
  cfg.bc = dio ? BoundaryCondition::DirichletZero : BoundaryCondition::Periodic;
  cfg.oob_policy = dio ? OutOfDomainPolicy::Ignore : OutOfDomainPolicy::Error;
  cfg.modes_every = dio ? 1 : 0;

  {
    const std::string v = g.str("run.scheme", "strang");
    if (v == "lie") {
      cfg.scheme.kind = SplitKind::Lie;
    } else if (v == "strang") {
      cfg.scheme.kind = SplitKind::Strang;
    } else {
      throw ConfigError("run.scheme: expected lie or strang, got '" + v + "'");
    }
  }
  cfg.scheme.dt = g.num("run.dt", cfg.scheme.dt);
  cfg.t_final = g.num("run.T", cfg.t_final);
  {
    const std::string v = g.str("run.out_of_domain", cfg.oob_policy == OutOfDomainPolicy::Ignore
                                                         ? "ignore"
                                                         : "error");
    if (v == "error") {
      cfg.oob_policy = OutOfDomainPolicy::Error;
    } else if (v == "ignore") {
      cfg.oob_policy = OutOfDomainPolicy::Ignore;
    } else {
      throw ConfigError("run.out_of_domain: expected error or ignore, got '" + v + "'");
    }
  }

  if (g.has("grid.n_cells")) {
    const auto n = to_list("grid.n_cells", kv.at("grid.n_cells"));
    if (n.size() == 1) {
      cfg.cells[0] = static_cast<int>(n[0]);
      if (dio) cfg.cells[1] = static_cast<int>(n[0]);
    } else if (n.size() == 2) {
      cfg.cells = {static_cast<int>(n[0]), static_cast<int>(n[1])};
    } else {
      throw ConfigError("grid.n_cells: expected one or two values");
    }
  }
  cfg.order = static_cast<int>(g.integer("grid.order", 1));
  {
    const std::string v = g.str("grid.bc", cfg.bc == BoundaryCondition::Periodic ? "periodic"
                                                                                 : "dirichlet");
    if (v == "periodic") {
      cfg.bc = BoundaryCondition::Periodic;
    } else if (v == "dirichlet") {
      cfg.bc = BoundaryCondition::DirichletZero;
    } else {
      throw ConfigError("grid.bc: expected periodic or dirichlet, got '" + v + "'");
    }
  }

  {
    const std::string v = g.str("kernel.shape", "delta");
    if (v == "delta") {
      cfg.kernel.shape = KernelShape::Delta;
    } else if (v == "bspline") {
      cfg.kernel.shape = KernelShape::BSpline;
    } else {
      throw ConfigError("kernel.shape: expected delta or bspline, got '" + v + "'");
    }
  }
  cfg.kernel.degree = static_cast<int>(g.integer("kernel.degree", cfg.order));
  cfg.kernel.width = g.num("kernel.width", 0.0);  // 0: one cell width, set below

  cfg.solver.tol = g.num("solver.tol", 1e-10);
  cfg.solver.max_iter = static_cast<int>(g.integer("solver.max_iter", -1));
  cfg.solver.jacobi = g.boolean("solver.jacobi", true);
  cfg.solver.warm_start = g.boolean("solver.warm_start", true);

  cfg.out_dir = g.str("output.dir", "");
  cfg.diag_every = static_cast<int>(g.integer("output.diag_every", 1));
  cfg.snapshot_every = static_cast<int>(g.integer("output.snapshot_every", 0));
  cfg.grid_every = static_cast<int>(g.integer("output.grid_every", 0));
  cfg.modes_every = static_cast<int>(g.integer("output.modes_every", cfg.modes_every));
  cfg.mode_max = static_cast<int>(g.integer("output.mode_max", 8));
  if (g.has("output.grid_size")) {
    const auto n = to_list("output.grid_size", kv.at("output.grid_size"));
    if (n.size() == 1) {
      cfg.grid_size = {static_cast<int>(n[0]), static_cast<int>(n[0])};
    } else if (n.size() == 2) {
      cfg.grid_size = {static_cast<int>(n[0]), static_cast<int>(n[1])};
    } else {
      throw ConfigError("output.grid_size: expected one or two values");
    }
  } else {
    cfg.grid_size = dio ? std::array<int, 2>{256, 256} : std::array<int, 2>{256, 1};
  }
  {
    const std::string v = g.str("output.snapshot_format", "binary");
    if (v == "binary") {
      cfg.snapshot_binary = true;
    } else if (v == "text") {
      cfg.snapshot_binary = false;
    } else {
      throw ConfigError("output.snapshot_format: expected binary or text, got '" + v + "'");
    }
  }
  cfg.dump_matrix_path = g.str("output.dump_matrix", "");
  cfg.dump_phi_path = g.str("output.dump_phi", "");

  cfg.threads = static_cast<int>(g.integer("parallel.threads", 0));
  cfg.deterministic_reduction = g.boolean("parallel.deterministic", true);

  cfg.fit.t_min = g.num("fit.t_min", 1.0);
  cfg.fit.max_peaks = static_cast<int>(g.integer("fit.max_peaks", 8));
  cfg.fit.min_peak_separation = g.num("fit.min_peak_separation", 1.0);
  cfg.fit.direct_fallback = g.boolean("fit.direct_fallback", false);

  // validation
  if (!(cfg.scheme.dt > 0.0)) throw ConfigError("run.dt: must be > 0");
  if (cfg.t_final < 0.0) throw ConfigError("run.T: must be >= 0");
  if (sc.np < 1) throw ConfigError("scenario.np: must be >= 1");
  if (cfg.diag_every < 1) throw ConfigError("output.diag_every: must be >= 1 step");
  if (cfg.order != 1 && cfg.order != 2) throw ConfigError("grid.order: must be 1 or 2");
  for (int a = 0; a < sc.dim(); ++a) {
    if (cfg.cells[a] < 2) throw ConfigError("grid.n_cells: need at least 2 cells per axis");
    if (!(sc.hi[a] > sc.lo[a])) throw ConfigError("scenario.domain: degenerate box");
  }
  if (cfg.mode_max < 1) throw ConfigError("output.mode_max: must be >= 1");
  if (!(cfg.solver.tol > 0.0)) throw ConfigError("solver.tol: must be > 0");
  if (cfg.kernel.shape == KernelShape::BSpline && cfg.kernel.width == 0.0) {
    cfg.kernel.width = (sc.hi[0] - sc.lo[0]) / cfg.cells[0];
  }
  return cfg;
}

RunConfig parse_config_file(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw ConfigError("cannot open config file " + path);
  std::stringstream ss;
  ss << is.rdbuf();
  return parse_config_text(ss.str());
}

std::string echo_config(const RunConfig& cfg) {
  const auto& sc = cfg.scenario;
  std::ostringstream os;
  os << "[scenario]\n";
  os << "type = " << scenario_name(sc.kind) << "\n";
  os << "np = " << sc.np << "\n";
  os << "seed = " << sc.seed << "\n";
  os << "sampling = " << (sc.sampling == SamplingMode::Stratified ? "stratified" : "mc") << "\n";
  os << "alpha = " << format_double(sc.alpha) << "\n";
  os << "k = " << format_double(sc.k) << "\n";
  os << "vmax = " << format_double(sc.vmax) << "\n";
  os << "l = " << sc.l << "\n";
  os << "r_minus = " << format_double(sc.r_minus) << "\n";
  os << "r_plus = " << format_double(sc.r_plus) << "\n";
  os << "eps = " << format_double(sc.eps) << "\n";
  os << "b_ext = " << format_double(sc.b_ext[0]) << "," << format_double(sc.b_ext[1]) << ","
     << format_double(sc.b_ext[2]) << "\n";
  if (sc.dim() == 1) {
    os << "domain = " << format_double(sc.lo[0]) << "," << format_double(sc.hi[0]) << "\n";
  } else {
    os << "domain = " << format_double(sc.lo[0]) << "," << format_double(sc.hi[0]) << ","
       << format_double(sc.lo[1]) << "," << format_double(sc.hi[1]) << "\n";
  }
  os << "\n[run]\n";
  os << "scheme = " << (cfg.scheme.kind == SplitKind::Lie ? "lie" : "strang") << "\n";
  os << "dt = " << format_double(cfg.scheme.dt) << "\n";
  os << "T = " << format_double(cfg.t_final) << "\n";
  os << "out_of_domain = " << (cfg.oob_policy == OutOfDomainPolicy::Ignore ? "ignore" : "error")
     << "\n";
  os << "\n[grid]\n";
  os << "n_cells = " << cfg.cells[0];
  if (sc.dim() == 2) os << "," << cfg.cells[1];
  os << "\n";
  os << "order = " << cfg.order << "\n";
  os << "bc = " << (cfg.bc == BoundaryCondition::Periodic ? "periodic" : "dirichlet") << "\n";
  os << "\n[kernel]\n";
  os << "shape = " << (cfg.kernel.shape == KernelShape::Delta ? "delta" : "bspline") << "\n";
  os << "degree = " << cfg.kernel.degree << "\n";
  os << "width = " << format_double(cfg.kernel.width) << "\n";
  os << "\n[solver]\n";
  os << "tol = " << format_double(cfg.solver.tol) << "\n";
  os << "max_iter = " << cfg.solver.max_iter << "\n";
  os << "jacobi = " << (cfg.solver.jacobi ? "true" : "false") << "\n";
  os << "warm_start = " << (cfg.solver.warm_start ? "true" : "false") << "\n";
  os << "\n[output]\n";
  if (!cfg.out_dir.empty()) os << "dir = " << cfg.out_dir << "\n";
  os << "diag_every = " << cfg.diag_every << "\n";
  os << "snapshot_every = " << cfg.snapshot_every << "\n";
  os << "grid_every = " << cfg.grid_every << "\n";
  os << "modes_every = " << cfg.modes_every << "\n";
  os << "mode_max = " << cfg.mode_max << "\n";
  os << "grid_size = " << cfg.grid_size[0] << "," << cfg.grid_size[1] << "\n";
  os << "snapshot_format = " << (cfg.snapshot_binary ? "binary" : "text") << "\n";
  if (!cfg.dump_matrix_path.empty()) os << "dump_matrix = " << cfg.dump_matrix_path << "\n";
  if (!cfg.dump_phi_path.empty()) os << "dump_phi = " << cfg.dump_phi_path << "\n";
  os << "\n[parallel]\n";
  os << "threads = " << cfg.threads << "\n";
  os << "deterministic = " << (cfg.deterministic_reduction ? "true" : "false") << "\n";
  os << "\n[fit]\n";
  os << "t_min = " << format_double(cfg.fit.t_min) << "\n";
  os << "max_peaks = " << cfg.fit.max_peaks << "\n";
  os << "min_peak_separation = " << format_double(cfg.fit.min_peak_separation) << "\n";
  os << "direct_fallback = " << (cfg.fit.direct_fallback ? "true" : "false") << "\n";
  return os.str();
}

FemSpace make_space(const RunConfig& cfg) {
  return build_space(cfg.scenario.dim(), cfg.scenario.lo, cfg.scenario.hi, cfg.cells,
                     cfg.order, cfg.bc);
}

MagneticFieldSpec make_field(const RunConfig& cfg) {
  MagneticFieldSpec f;
  if (cfg.scenario.kind == ScenarioKind::Diocotron) {
    f.B = cfg.scenario.b_ext;
    f.scale_x = 1.0 / cfg.scenario.eps;
    f.scale_E = 1.0 / cfg.scenario.eps;
    f.scale_B = 1.0 / (cfg.scenario.eps * cfg.scenario.eps);
  }
  return f;
}

}  // namespace hpic
