#include "hybrid/cli.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <functional>
#include <limits>
#include <random>
#include <sstream>
#include <variant>

#include "hybrid/errors.hpp"
#include "hybrid/lead_green.hpp"
#include "hybrid/parallel.hpp"
#include "hybrid/resolvent.hpp"
#include "hybrid/scattering.hpp"

#ifndef HYBRID_VERSION
#define HYBRID_VERSION "0.0.0"
#endif

namespace hybrid::cli {

using nlohmann::json;

namespace {

constexpr std::array<std::pair<Task, std::string_view>, 6> kTaskNames{{
    {Task::green_plane, "green-plane"},
    {Task::green_renorm, "green-renorm"},
    {Task::bound_states, "bound-states"},
    {Task::reflect_sweep, "reflect-sweep"},
    {Task::state_dump, "state-dump"},
    {Task::diagnostics, "diagnostics"},
}};

// ---------------------------------------------------------------- parsing

[[noreturn]] void schema_error(const std::string& field, const std::string& msg) {
  throw ConfigError(ExitCode::config_schema, field, field + ": " + msg);
}

void check_keys(const json& obj, const std::string& where, std::initializer_list<std::string_view> allowed) {
  if (!obj.is_object()) schema_error(where, "expected an object");
  for (const auto& [key, value] : obj.items()) {
    if (std::find(allowed.begin(), allowed.end(), key) == allowed.end()) {
      schema_error(where.empty() ? key : where + "." + key, "unknown key");
    }
  }
}

double get_number(const json& j, const std::string& field) {
  if (!j.is_number()) schema_error(field, "expected a number");
  const double v = j.get<double>();
  if (!std::isfinite(v)) schema_error(field, "must be finite");
  return v;
}

int get_positive_int(const json& j, const std::string& field) {
  if (!j.is_number_integer() || j.get<long long>() <= 0 || j.get<long long>() > 100000000) {
    schema_error(field, "expected a positive integer");
  }
  return static_cast<int>(j.get<long long>());
}

// number, [re, im] or {"re": .., "im": ..}
Complex get_complex(const json& j, const std::string& field) {
  if (j.is_number()) return {get_number(j, field), 0.0};
  if (j.is_array() && j.size() == 2) return {get_number(j[0], field + "[0]"), get_number(j[1], field + "[1]")};
  if (j.is_object()) {
    check_keys(j, field, {"re", "im"});
    return {j.contains("re") ? get_number(j["re"], field + ".re") : 0.0,
            j.contains("im") ? get_number(j["im"], field + ".im") : 0.0};
  }
  schema_error(field, "expected a complex number: number, [re, im] or {re, im}");
}

// 2x2 array of complex entries, or a single complex number times sigma_0
SpinMatrix2 get_matrix(const json& j, const std::string& field) {
  if (j.is_number() || j.is_object() || (j.is_array() && j.size() == 2 && j[0].is_number())) {
    return get_complex(j, field) * pauli::sigma0();
  }
  if (!j.is_array() || j.size() != 2 || !j[0].is_array() || !j[1].is_array() || j[0].size() != 2 ||
      j[1].size() != 2) {
    schema_error(field, "expected a 2x2 array of complex entries");
  }
  SpinMatrix2 m;
  for (int r = 0; r < 2; ++r) {
    for (int c = 0; c < 2; ++c) {
      m(r, c) = get_complex(j[r][c], field + "[" + std::to_string(r) + "][" + std::to_string(c) + "]");
    }
  }
  return m;
}

std::vector<double> get_grid(const json& j, const std::string& field) {
  std::vector<double> values;
  if (j.is_array()) {
    for (std::size_t i = 0; i < j.size(); ++i) values.push_back(get_number(j[i], field + "[" + std::to_string(i) + "]"));
  } else if (j.is_object()) {
    check_keys(j, field, {"start", "stop", "count", "spacing"});
    if (!j.contains("start") || !j.contains("count")) schema_error(field, "range grids need start and count");
    if (!j["count"].is_number_integer() || j["count"].get<long long>() < 0) {
      schema_error(field + ".count", "expected a non-negative integer");
    }
    const long long count = j["count"].get<long long>();
    const double start = get_number(j["start"], field + ".start");
    const double stop = j.contains("stop") ? get_number(j["stop"], field + ".stop") : start;
    if (count > 1 && !j.contains("stop")) schema_error(field, "range grids with count > 1 need stop");
    const std::string spacing = j.contains("spacing") ? j["spacing"].get<std::string>() : "linear";
    if (spacing != "linear" && spacing != "log") schema_error(field + ".spacing", "expected linear or log");
    if (spacing == "log" && !(start > 0.0 && stop > 0.0)) schema_error(field, "log spacing needs positive endpoints");
    for (long long i = 0; i < count; ++i) {
      if (count == 1) {
        values.push_back(start);
      } else if (i == count - 1) {
        values.push_back(stop);
      } else {
        const double t = static_cast<double>(i) / static_cast<double>(count - 1);
        values.push_back(spacing == "log" ? start * std::pow(stop / start, t) : start + (stop - start) * t);
      }
    }
  } else {
    schema_error(field, "expected an array or a {start, stop, count} range");
  }
  if (values.empty()) throw ConfigError(ExitCode::empty_grid, field, field + ": grid is empty");
  if (values.size() > 1) {
    const bool up = values[1] > values[0];
    for (std::size_t i = 1; i < values.size(); ++i) {
      if (up ? !(values[i] > values[i - 1]) : !(values[i] < values[i - 1])) {
        throw ConfigError(ExitCode::non_monotone_grid, field,
                          field + ": grid is not strictly monotone at index " + std::to_string(i));
      }
    }
  }
  return values;
}

CouplingMatrices checked_coupling(const SpinMatrix2& A, const SpinMatrix2& C, const SpinMatrix2& D) {
  try {
    return validate_coupling(A, C, D);
  } catch (const ValidationError& e) {
    throw ConfigError(ExitCode::non_hermitian, "coupling." + e.offending(), e.what());
  }
}

CouplingSpec parse_coupling(const json& j) {
  check_keys(j, "coupling", {"a", "c", "d", "A", "C", "D", "rho"});
  const bool scalars = j.contains("a") || j.contains("c") || j.contains("d");
  const bool matrices = j.contains("A") || j.contains("C") || j.contains("D");
  const bool natural = j.contains("rho");
  if (scalars + matrices + natural != 1) {
    schema_error("coupling", "give exactly one of {a, c, d}, {A, C, D} or {rho}");
  }
  CouplingSpec spec;
  if (scalars) {
    for (const char* key : {"a", "c", "d"}) {
      if (!j.contains(key)) schema_error(std::string("coupling.") + key, "missing");
    }
    spec.kind = CouplingKind::scalars;
    SpinIndependentCoupling s;
    s.a = get_number(j["a"], "coupling.a");
    s.c = get_complex(j["c"], "coupling.c");
    s.d = get_number(j["d"], "coupling.d");
    spec.scalar = s;
    spec.matrices = checked_coupling(s.a * pauli::sigma0(), s.c * pauli::sigma0(), s.d * pauli::sigma0());
  } else if (matrices) {
    for (const char* key : {"A", "C", "D"}) {
      if (!j.contains(key)) schema_error(std::string("coupling.") + key, "missing");
    }
    spec.kind = CouplingKind::matrices;
    spec.matrices = checked_coupling(get_matrix(j["A"], "coupling.A"), get_matrix(j["C"], "coupling.C"),
                                     get_matrix(j["D"], "coupling.D"));
    spec.scalar = as_spin_independent(spec.matrices);
  } else {
    spec.kind = CouplingKind::natural;
    spec.rho = get_number(j["rho"], "coupling.rho");
    if (!(spec.rho > 0.0)) {
      throw ConfigError(ExitCode::nonpositive_rho, "coupling.rho", "coupling.rho: must be > 0");
    }
    spec.matrices = natural_coupling(spec.rho);
    spec.scalar = as_spin_independent(spec.matrices);
  }
  return spec;
}

void parse_spin_orbit(const json& j, RunConfig& cfg) {
  check_keys(j, "spin_orbit", {"kind", "kappa", "scales"});
  if (!j.contains("kind") || !j["kind"].is_string()) schema_error("spin_orbit.kind", "expected rashba or dresselhaus");
  const std::string kind = j["kind"].get<std::string>();
  SpinOrbitKind k;
  if (kind == "rashba") {
    k = SpinOrbitKind::rashba;
  } else if (kind == "dresselhaus") {
    k = SpinOrbitKind::dresselhaus;
  } else {
    schema_error("spin_orbit.kind", "expected rashba or dresselhaus");
  }
  if (j.contains("kappa") == j.contains("scales")) schema_error("spin_orbit", "give exactly one of kappa or scales");
  double kappa;
  if (j.contains("kappa")) {
    kappa = get_number(j["kappa"], "spin_orbit.kappa");
  } else {
    const json& s = j["scales"];
    check_keys(s, "spin_orbit.scales", {"alpha", "m_star", "hbar"});
    PhysicalScales scales;
    if (!s.contains("alpha")) schema_error("spin_orbit.scales.alpha", "missing");
    scales.alpha = get_number(s["alpha"], "spin_orbit.scales.alpha");
    if (s.contains("m_star")) scales.m_star = get_number(s["m_star"], "spin_orbit.scales.m_star");
    if (s.contains("hbar")) scales.hbar = get_number(s["hbar"], "spin_orbit.scales.hbar");
    try {
      kappa = reduce_units(scales);
    } catch (const std::exception& e) {
      schema_error("spin_orbit.scales", e.what());
    }
    cfg.scales = scales;
  }
  cfg.spin_orbit = SpinOrbitParams(k, kappa);
}

Task resolve_task(const json& doc, std::optional<Task> selected) {
  std::optional<Task> named;
  if (doc.contains("task")) {
    if (!doc["task"].is_string()) schema_error("task", "expected a task name");
    named = task_from_name(doc["task"].get<std::string>());
    if (!named) schema_error("task", "unknown task '" + doc["task"].get<std::string>() + "'");
  }
  if (named && selected && *named != *selected) {
    throw ConfigError(ExitCode::task_mismatch, "task",
                      "task: config names '" + std::string(task_name(*named)) + "' but the subcommand is '" +
                          std::string(task_name(*selected)) + "'");
  }
  if (named) return *named;
  if (selected) return *selected;
  schema_error("task", "no task given");
}

void require_scalar_coupling(const RunConfig& cfg) {
  if (!cfg.coupling.scalar) {
    throw ConfigError(ExitCode::task_mismatch, "coupling",
                      std::string(task_name(cfg.task)) + " needs a spin-independent coupling (A, C, D multiples of sigma_0)");
  }
}

void require_regular_a(const RunConfig& cfg) {
  try {
    tilde_transform(cfg.coupling.matrices);
  } catch (const ValidationError& e) {
    throw ConfigError(ExitCode::singular_coupling, "coupling.A", e.what());
  }
}

}  // namespace

std::string_view task_name(Task t) {
  for (const auto& [task, name] : kTaskNames) {
    if (task == t) return name;
  }
  return "unknown";
}

std::optional<Task> task_from_name(std::string_view name) {
  for (const auto& [task, n] : kTaskNames) {
    if (n == name) return task;
  }
  return std::nullopt;
}

std::string_view exit_code_name(ExitCode c) {
  switch (c) {
    case ExitCode::ok: return "ok";
    case ExitCode::diagnostics_failed: return "diagnostics_failed";
    case ExitCode::usage: return "usage";
    case ExitCode::config_syntax: return "config_syntax";
    case ExitCode::config_schema: return "config_schema";
    case ExitCode::non_hermitian: return "non_hermitian";
    case ExitCode::nonpositive_rho: return "nonpositive_rho";
    case ExitCode::empty_grid: return "empty_grid";
    case ExitCode::non_monotone_grid: return "non_monotone_grid";
    case ExitCode::singular_coupling: return "singular_coupling";
    case ExitCode::task_mismatch: return "task_mismatch";
    case ExitCode::computation: return "computation";
    case ExitCode::io: return "io";
  }
  return "unknown";
}

RunConfig parse_config(std::string_view text, std::optional<Task> selected) {
  json doc;
  try {
    doc = json::parse(text.begin(), text.end());
  } catch (const json::parse_error& e) {
    throw ConfigError(ExitCode::config_syntax, "", std::string("config is not valid JSON: ") + e.what());
  }
  check_keys(doc, "", {"task", "spin_orbit", "coupling", "grids", "source", "state", "bound_states", "diagnostics",
                       "output"});

  RunConfig cfg;
  try {
    cfg.task = resolve_task(doc, selected);
    if (doc.contains("spin_orbit")) parse_spin_orbit(doc["spin_orbit"], cfg);
    if (doc.contains("coupling")) cfg.coupling = parse_coupling(doc["coupling"]);

    if (doc.contains("grids")) {
      const json& g = doc["grids"];
      check_keys(g, "grids", {"k", "energy", "energy_imag", "lead_x", "plane_x1", "plane_x2"});
      if (g.contains("k")) cfg.k_grid = get_grid(g["k"], "grids.k");
      if (g.contains("energy")) cfg.energy_grid = get_grid(g["energy"], "grids.energy");
      if (g.contains("energy_imag")) cfg.energy_imag = get_number(g["energy_imag"], "grids.energy_imag");
      if (g.contains("lead_x")) cfg.lead_grid = get_grid(g["lead_x"], "grids.lead_x");
      if (g.contains("plane_x1")) cfg.plane_x1_grid = get_grid(g["plane_x1"], "grids.plane_x1");
      if (g.contains("plane_x2")) cfg.plane_x2_grid = get_grid(g["plane_x2"], "grids.plane_x2");
    }
    if (cfg.energy_imag < 0.0) schema_error("grids.energy_imag", "must be >= 0 (upper half-plane)");
    for (double k : cfg.k_grid) {
      if (!(k > 0.0)) schema_error("grids.k", "momenta must be > 0");
    }
    for (double x : cfg.lead_grid) {
      if (!(x > 0.0)) schema_error("grids.lead_x", "lead coordinates must be > 0");
    }
    if (doc.contains("source")) {
      const json& s = doc["source"];
      if (!s.is_array() || s.size() != 2) schema_error("source", "expected [x1, x2]");
      cfg.source = {get_number(s[0], "source[0]"), get_number(s[1], "source[1]")};
    }
    if (doc.contains("state")) {
      const json& s = doc["state"];
      check_keys(s, "state", {"k", "spin"});
      if (s.contains("k")) cfg.state.k = get_number(s["k"], "state.k");
      if (!(cfg.state.k > 0.0)) schema_error("state.k", "must be > 0");
      if (s.contains("spin")) {
        const json& sp = s["spin"];
        if (!sp.is_array() || sp.size() != 2) schema_error("state.spin", "expected [up, down]");
        cfg.state.spin = Spinor(get_complex(sp[0], "state.spin[0]"), get_complex(sp[1], "state.spin[1]"));
        if (cfg.state.spin.norm() == 0.0) schema_error("state.spin", "must be nonzero");
      }
    }
    if (doc.contains("bound_states")) {
      const json& b = doc["bound_states"];
      check_keys(b, "bound_states", {"search", "grid_points", "reality_samples"});
      if (b.contains("search")) {
        const json& s = b["search"];
        if (!s.is_array() || s.size() != 2) schema_error("bound_states.search", "expected [lo, hi]");
        const SearchInterval si{get_number(s[0], "bound_states.search[0]"), get_number(s[1], "bound_states.search[1]")};
        if (!(si.lo > 0.0 && si.lo < si.hi)) schema_error("bound_states.search", "need 0 < lo < hi");
        cfg.search = si;
      }
      if (b.contains("grid_points")) cfg.search_grid_points = get_positive_int(b["grid_points"], "bound_states.grid_points");
      if (b.contains("reality_samples")) {
        cfg.reality_samples = get_positive_int(b["reality_samples"], "bound_states.reality_samples");
      }
    }
    if (doc.contains("diagnostics")) {
      const json& d = doc["diagnostics"];
      check_keys(d, "diagnostics", {"samples"});
      if (d.contains("samples")) cfg.diagnostic_samples = get_positive_int(d["samples"], "diagnostics.samples");
    }
    if (doc.contains("output")) {
      const json& o = doc["output"];
      check_keys(o, "output", {"path", "format"});
      if (o.contains("path")) {
        if (!o["path"].is_string()) schema_error("output.path", "expected a string");
        cfg.output_path = o["path"].get<std::string>();
      }
      if (o.contains("format")) {
        const std::string f = o["format"].is_string() ? o["format"].get<std::string>() : "";
        if (f == "csv") {
          cfg.format = Format::csv;
        } else if (f == "json") {
          cfg.format = Format::json;
        } else {
          schema_error("output.format", "expected csv or json");
        }
      }
    }

    const bool has_so = doc.contains("spin_orbit");
    const bool has_coupling = doc.contains("coupling");
    switch (cfg.task) {
      case Task::reflect_sweep:
        if (!has_so) schema_error("spin_orbit", "required for reflect-sweep");
        if (!has_coupling) schema_error("coupling", "required for reflect-sweep");
        if (cfg.k_grid.empty()) schema_error("grids.k", "required for reflect-sweep");
        require_scalar_coupling(cfg);
        break;
      case Task::bound_states:
        if (!has_so) schema_error("spin_orbit", "required for bound-states");
        if (!has_coupling) schema_error("coupling", "required for bound-states");
        require_scalar_coupling(cfg);
        break;
      case Task::green_plane:
        if (!has_so) schema_error("spin_orbit", "required for green-plane");
        if (cfg.energy_grid.empty()) schema_error("grids.energy", "required for green-plane");
        if (cfg.plane_x1_grid.empty() || cfg.plane_x2_grid.empty()) {
          schema_error("grids.plane_x1", "green-plane needs plane_x1 and plane_x2");
        }
        break;
      case Task::green_renorm:
        if (!has_so) schema_error("spin_orbit", "required for green-renorm");
        if (cfg.energy_grid.empty()) schema_error("grids.energy", "required for green-renorm");
        break;
      case Task::state_dump:
        if (!has_so) schema_error("spin_orbit", "required for state-dump");
        if (!has_coupling) schema_error("coupling", "required for state-dump");
        if (cfg.lead_grid.empty() && (cfg.plane_x1_grid.empty() || cfg.plane_x2_grid.empty())) {
          schema_error("grids", "state-dump needs lead_x and/or plane_x1 with plane_x2");
        }
        if (cfg.plane_x1_grid.empty() != cfg.plane_x2_grid.empty()) {
          schema_error("grids", "plane_x1 and plane_x2 go together");
        }
        require_regular_a(cfg);
        break;
      case Task::diagnostics:
        break;
    }
  } catch (const ConfigError&) {
    throw;
  } catch (const json::exception& e) {
    throw ConfigError(ExitCode::config_schema, "", std::string("config schema: ") + e.what());
  }
  return cfg;
}

RunConfig default_config(Task task) {
  RunConfig cfg;
  cfg.task = task;
  return cfg;
}

// --------------------------------------------------------------- output

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  if (v == 0.0) return "0";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string csv_field(std::string_view s) {
  if (s.find_first_of(",\"\r\n") == std::string_view::npos) return std::string(s);
  std::string out = "\"";
  for (char ch : s) {
    if (ch == '"') out += '"';
    out += ch;
  }
  out += '"';
  return out;
}

namespace {

void dump_to(const json& j, int indent, int depth, std::string& out) {
  const auto newline = [&](int d) {
    if (indent < 0) return;
    out += '\n';
    out.append(static_cast<std::size_t>(indent * d), ' ');
  };
  switch (j.type()) {
    case json::value_t::object: {
      if (j.empty()) {
        out += "{}";
        return;
      }
      out += '{';
      bool first = true;
      for (const auto& [key, value] : j.items()) {
        if (!first) out += ',';
        first = false;
        newline(depth + 1);
        out += json(key).dump();
        out += indent < 0 ? ":" : ": ";
        dump_to(value, indent, depth + 1, out);
      }
      newline(depth);
      out += '}';
      return;
    }
    case json::value_t::array: {
      if (j.empty()) {
        out += "[]";
        return;
      }
      // arrays of scalars stay on one line
      const bool flat = std::none_of(j.begin(), j.end(), [](const json& v) { return v.is_structured(); });
      out += '[';
      bool first = true;
      for (const auto& value : j) {
        if (!first) out += flat && indent >= 0 ? ", " : ",";
        first = false;
        if (!flat) newline(depth + 1);
        dump_to(value, indent, depth + 1, out);
      }
      if (!flat) newline(depth);
      out += ']';
      return;
    }
    case json::value_t::number_float: {
      const double v = j.get<double>();
      out += std::isfinite(v) ? format_double(v) : "null";
      return;
    }
    default:
      out += j.dump();
  }
}

}  // namespace

std::string dump_json(const json& j, int indent) {
  std::string out;
  dump_to(j, indent, 0, out);
  return out;
}

// ------------------------------------------------------------------ run

namespace {

using Cell = std::variant<double, long long, std::string>;
using Row = std::vector<Cell>;

struct RowError {
  std::size_t index = 0;
  std::string kind;
  std::string message;
};

struct RowResult {
  std::vector<Row> rows;
  std::optional<RowError> error;
};

struct Table {
  std::vector<std::string> columns;
  std::vector<Row> rows;
};

struct TaskOutput {
  Table table;
  std::vector<RowError> errors;
  json extra = json::object();
  bool diagnostics_passed = true;
};

RowError describe_exception(std::size_t index) {
  RowError e;
  e.index = index;
  try {
    throw;
  } catch (const RegionError& ex) {
    e.kind = "region";
    e.message = ex.what();
  } catch (const SpectralPointError& ex) {
    e.kind = "spectral_point";
    e.message = ex.what();
  } catch (const ConvergenceError& ex) {
    e.kind = "convergence";
    e.message = ex.what();
  } catch (const DomainError& ex) {
    e.kind = "domain";
    e.message = ex.what();
  } catch (const ValidationError& ex) {
    e.kind = "validation";
    e.message = ex.what();
  } catch (const std::exception& ex) {
    e.kind = "error";
    e.message = ex.what();
  }
  return e;
}

TaskOutput collect(std::vector<std::string> columns, std::size_t n, int threads,
                   const std::function<std::vector<Row>(std::size_t)>& f) {
  const auto results = parallel_map<RowResult>(n, threads, [&](std::size_t i) {
    RowResult r;
    try {
      r.rows = f(i);
    } catch (...) {
      r.error = describe_exception(i);
    }
    return r;
  });
  TaskOutput out;
  out.table.columns = std::move(columns);
  for (const auto& r : results) {
    if (r.error) {
      out.errors.push_back(*r.error);
    } else {
      for (const auto& row : r.rows) out.table.rows.push_back(row);
    }
  }
  return out;
}

SpectralPoint energy_point(double e, double eta) {
  if (eta == 0.0 && e > 0.0) return SpectralPoint::above(e);
  return SpectralPoint::at(Complex(e, eta));
}

void push_complex(Row& row, Complex v) {
  row.emplace_back(v.real());
  row.emplace_back(v.imag());
}

std::vector<std::string> matrix_columns(const std::string& prefix) {
  std::vector<std::string> cols;
  for (const char* ij : {"11", "12", "21", "22"}) {
    cols.push_back(prefix + ij + "_re");
    cols.push_back(prefix + ij + "_im");
  }
  return cols;
}

void push_matrix(Row& row, const SpinMatrix2& m) {
  push_complex(row, m(0, 0));
  push_complex(row, m(0, 1));
  push_complex(row, m(1, 0));
  push_complex(row, m(1, 1));
}

TaskOutput run_reflect_sweep(const RunConfig& cfg, int threads) {
  const SpinIndependentCoupling c = *cfg.coupling.scalar;
  return collect({"k", "R_re", "R_im", "R_abs2", "transmission"}, cfg.k_grid.size(), threads, [&](std::size_t i) {
    const double k = cfg.k_grid[i];
    const ReflectionResult r = reflection_amplitude(ScatteringMomentum(k), c, cfg.spin_orbit);
    return std::vector<Row>{{k, r.R.real(), r.R.imag(), r.probability, r.transmission}};
  });
}

TaskOutput run_green_plane(const RunConfig& cfg, int threads) {
  std::vector<std::string> cols{"E", "eta", "x1", "x2"};
  for (auto& c : matrix_columns("G")) cols.push_back(c);
  const std::size_t n1 = cfg.plane_x1_grid.size();
  const std::size_t n2 = cfg.plane_x2_grid.size();
  const std::size_t n = cfg.energy_grid.size() * n1 * n2;
  return collect(cols, n, threads, [&](std::size_t i) {
    const double e = cfg.energy_grid[i / (n1 * n2)];
    const double x1 = cfg.plane_x1_grid[(i / n2) % n1];
    const double x2 = cfg.plane_x2_grid[i % n2];
    const SpinMatrix2 g = spin_orbit_green({x1, x2}, cfg.source, energy_point(e, cfg.energy_imag), cfg.spin_orbit);
    Row row{e, cfg.energy_imag, x1, x2};
    push_matrix(row, g);
    return std::vector<Row>{row};
  });
}

TaskOutput run_green_renorm(const RunConfig& cfg, int threads) {
  std::vector<std::string> cols{"E", "eta", "g_re", "g_im"};
  for (auto& c : matrix_columns("Gren")) cols.push_back(c);
  return collect(cols, cfg.energy_grid.size(), threads, [&](std::size_t i) {
    const double e = cfg.energy_grid[i];
    const SpectralPoint z = energy_point(e, cfg.energy_imag);
    Row row{e, cfg.energy_imag};
    push_complex(row, renormalized_green_scalar(z, cfg.spin_orbit));
    push_matrix(row, renormalized_green(z, cfg.spin_orbit));
    return std::vector<Row>{row};
  });
}

TaskOutput run_state_dump(const RunConfig& cfg, int threads) {
  const std::size_t n_lead = cfg.lead_grid.size();
  const std::size_t n2 = cfg.plane_x2_grid.size();
  const std::size_t n_plane = cfg.plane_x1_grid.size() * n2;
  const ScatteringMomentum k(cfg.state.k);
  const Spinor spin = cfg.state.spin;
  TaskOutput out = collect({"region", "x1", "x2", "psi_up_re", "psi_up_im", "psi_down_re", "psi_down_im"},
                           n_lead + n_plane, threads, [&](std::size_t i) {
                             Row row;
                             Spinor v;
                             if (i < n_lead) {
                               const std::vector<LeadPoint> pts{{cfg.lead_grid[i]}};
                               v = scattering_state(k, spin, pts, {}, cfg.coupling.matrices, cfg.spin_orbit)
                                       .lead[0]
                                       .value;
                               row = {std::string("lead"), cfg.lead_grid[i], 0.0};
                             } else {
                               const std::size_t j = i - n_lead;
                               const PlanePoint p{cfg.plane_x1_grid[j / n2], cfg.plane_x2_grid[j % n2]};
                               const std::vector<PlanePoint> pts{p};
                               v = scattering_state(k, spin, {}, pts, cfg.coupling.matrices, cfg.spin_orbit)
                                       .plane[0]
                                       .value;
                               row = {std::string("plane"), p.x1, p.x2};
                             }
                             push_complex(row, v(0));
                             push_complex(row, v(1));
                             return std::vector<Row>{row};
                           });
  json state = {{"k", cfg.state.k},
                {"spin", {{cfg.state.spin(0).real(), cfg.state.spin(0).imag()},
                          {cfg.state.spin(1).real(), cfg.state.spin(1).imag()}}}};
  if (cfg.coupling.scalar) {
    try {
      const Complex r = reflection_amplitude(k, *cfg.coupling.scalar, cfg.spin_orbit).R;
      state["reflection"] = {r.real(), r.imag()};
    } catch (...) {
      out.errors.push_back(describe_exception(n_lead + n_plane));
    }
  }
  out.extra["state"] = state;
  return out;
}

json reality_json(const RealityReport& r) {
  return {{"kappa", r.kappa},
          {"reference_interval", {-r.kappa * r.kappa, 0.0}},
          {"real_on_reference_interval", r.real_on_reference_interval},
          {"real_below_essential_spectrum", r.real_below_essential_spectrum},
          {"max_abs_imag_g_on_reference_interval", r.max_imag_below},
          {"max_abs_imag_g_below_essential_spectrum", r.max_imag_above},
          {"samples_per_side", r.above_threshold.size()},
          {"tolerance", kRealityTolerance}};
}

TaskOutput run_bound_states(const RunConfig& cfg) {
  TaskOutput out;
  out.table.columns = {"E", "kappa_b", "residual", "det_check", "multiplicity", "duality_system"};
  const SearchInterval search = cfg.search.value_or(default_search_interval(cfg.spin_orbit));
  out.extra["search_interval"] = {search.lo, search.hi};
  try {
    out.extra["reality_region"] = reality_json(measure_reality_region(cfg.spin_orbit, cfg.reality_samples));
  } catch (...) {
    out.errors.push_back(describe_exception(0));
  }
  try {
    BoundStateSearchOptions opts;
    opts.grid_points = cfg.search_grid_points;
    const auto roots = find_bound_states(*cfg.coupling.scalar, cfg.spin_orbit, search, opts);
    for (std::size_t i = 0; i < roots.size(); ++i) {
      const BoundState& b = roots[i];
      out.table.rows.push_back({b.energy, b.kappa_b, b.residual, b.singular_ratio, static_cast<long long>(b.multiplicity),
                                std::string(b.check == DualityCheck::krein ? "krein" : "boundary_condition")});
      if (!b.passes_duality()) {
        out.errors.push_back({i, "duality", "root at kappa_b = " + format_double(b.kappa_b) +
                                                " fails the singular-value check (" + format_double(b.singular_ratio) +
                                                ")"});
      }
    }
  } catch (...) {
    out.errors.push_back(describe_exception(0));
  }
  return out;
}

// ---------------------------------------------------------- diagnostics

struct SuiteResult {
  double max_error = 0.0;
  int samples = 0;
  std::string failure;
};

struct Suite {
  std::string name;
  double tolerance;
  std::function<SuiteResult(std::mt19937_64&, int)> body;
};

SpinOrbitParams random_spin_orbit(std::mt19937_64& rng, double max_kappa = 3.0) {
  std::uniform_real_distribution<double> u(0.0, max_kappa);
  const SpinOrbitKind kind = rng() % 2 ? SpinOrbitKind::rashba : SpinOrbitKind::dresselhaus;
  return {kind, u(rng)};
}

SpinIndependentCoupling random_coupling(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(-2.0, 2.0);
  double a = u(rng);
  if (std::abs(a) < 0.1) a = a < 0 ? a - 0.1 : a + 0.1;
  const double c_re = u(rng);
  const double c_im = u(rng);
  return {a, Complex(c_re, c_im), u(rng)};
}

SpinMatrix2 random_hermitian(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  const double re = u(rng);
  const double im = u(rng);
  const double d0 = u(rng);
  const double d1 = u(rng);
  SpinMatrix2 m;
  m << d0, Complex(re, im), Complex(re, -im), d1;
  return m;
}

SpinMatrix2 random_general(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  SpinMatrix2 m;
  for (int i = 0; i < 4; ++i) {
    const double re = u(rng);
    const double im = u(rng);
    m(i / 2, i % 2) = Complex(re, im);
  }
  return m;
}

Spinor random_spinor(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  const double a = u(rng), b = u(rng), c = u(rng), d = u(rng);
  return Spinor(Complex(a, b), Complex(c, d));
}

double log_uniform(std::mt19937_64& rng, double lo, double hi) {
  std::uniform_real_distribution<double> u(std::log(lo), std::log(hi));
  return std::exp(u(rng));
}

std::vector<Suite> diagnostic_suites() {
  std::vector<Suite> s;
  s.push_back({"kernel_symmetry", 1e-10, [](std::mt19937_64& rng, int n) {
                 SuiteResult r;
                 std::uniform_real_distribution<double> re(-8.0, 8.0), im(0.2, 5.0), x(-3.0, 3.0), pos(0.0, 4.0);
                 for (int i = 0; i < n; ++i) {
                   const SpinOrbitParams p = random_spin_orbit(rng);
                   const double zr = re(rng), zi = im(rng);
                   const SpectralPoint z = SpectralPoint::at(Complex(zr, zi));
                   const double a1 = x(rng), a2 = x(rng), b1 = x(rng), b2 = x(rng);
                   const PlanePoint xa{a1, a2}, xb{b1, b2};
                   const SpinMatrix2 lhs = spin_orbit_green(xa, xb, z, p).adjoint();
                   const SpinMatrix2 rhs = spin_orbit_green(xb, xa, z.conjugate(), p);
                   r.max_error = std::max(r.max_error, (lhs - rhs).cwiseAbs().maxCoeff());
                   const LeadPoint la{pos(rng)}, lb{pos(rng)};
                   r.max_error = std::max(r.max_error, std::abs(lead_green(la, lb, z) - lead_green(lb, la, z)));
                   r.max_error = std::max(r.max_error,
                                          std::abs(lead_green(la, lb, z.conjugate()) - std::conj(lead_green(la, lb, z))));
                   ++r.samples;
                 }
                 return r;
               }});
  s.push_back({"renormalized_green_imag_quarter", 1e-10, [](std::mt19937_64& rng, int n) {
                 SuiteResult r;
                 for (int i = 0; i < n; ++i) {
                   const double k = log_uniform(rng, 0.1, 10.0);
                   const SpinOrbitParams p = random_spin_orbit(rng);
                   const Complex g = renormalized_green_scalar(SpectralPoint::above(k * k), p);
                   r.max_error = std::max(r.max_error, std::abs(g.imag() - 0.25));
                   ++r.samples;
                 }
                 return r;
               }});
  s.push_back({"tilde_transform_hermitian", 1e-12, [](std::mt19937_64& rng, int n) {
                 SuiteResult r;
                 for (int i = 0; i < n; ++i) {
                   const SpinMatrix2 A = random_hermitian(rng) + (i % 2 ? 2.5 : -2.5) * pauli::sigma0();
                   const SpinMatrix2 C = random_general(rng);
                   const SpinMatrix2 D = random_hermitian(rng);
                   const auto t = tilde_transform(validate_coupling(A, C, D));
                   r.max_error = std::max(r.max_error, (t.value - t.value.adjoint()).cwiseAbs().maxCoeff());
                   ++r.samples;
                 }
                 return r;
               }});
  s.push_back({"boundary_condition_equivalence", 1e-12, [](std::mt19937_64& rng, int n) {
                 SuiteResult r;
                 for (int i = 0; i < n; ++i) {
                   const SpinMatrix2 A = random_hermitian(rng) + (i % 2 ? 2.5 : -2.5) * pauli::sigma0();
                   const SpinMatrix2 C = random_general(rng);
                   const SpinMatrix2 D = random_hermitian(rng);
                   const auto m = validate_coupling(A, C, D);
                   BoundaryData b;
                   b.lead_value = random_spinor(rng);
                   b.L0 = random_spinor(rng);
                   b.lead_derivative = m.A * b.lead_value + m.C.adjoint() * b.L0;
                   b.L1 = m.C * b.lead_value + m.D * b.L0;
                   r.max_error = std::max(r.max_error, tilde_relation_residual(tilde_transform(m), b));
                   ++r.samples;
                 }
                 return r;
               }});
  s.push_back({"reflection_unitarity_bound", 1e-12, [](std::mt19937_64& rng, int n) {
                 SuiteResult r;
                 for (int i = 0; i < n; ++i) {
                   const SpinIndependentCoupling c = random_coupling(rng);
                   const SpinOrbitParams p = random_spin_orbit(rng);
                   const double k = log_uniform(rng, 0.1, 10.0);
                   const double prob = reflection_amplitude(ScatteringMomentum(k), c, p).probability;
                   r.max_error = std::max(r.max_error, std::max(prob - 1.0, 0.0));
                   ++r.samples;
                 }
                 return r;
               }});
  s.push_back({"decoupled_total_reflection", 1e-12, [](std::mt19937_64& rng, int n) {
                 SuiteResult r;
                 for (int i = 0; i < n; ++i) {
                   SpinIndependentCoupling c = random_coupling(rng);
                   c.c = 0.0;
                   const SpinOrbitParams p = random_spin_orbit(rng);
                   const double k = log_uniform(rng, 0.1, 10.0);
                   const Complex rr = reflection_amplitude(ScatteringMomentum(k), c, p).R;
                   r.max_error = std::max(r.max_error, std::abs(std::abs(rr) - 1.0));
                   ++r.samples;
                 }
                 return r;
               }});
  s.push_back({"spinless_reduction", 1e-14, [](std::mt19937_64& rng, int n) {
                 SuiteResult r;
                 for (int i = 0; i < n; ++i) {
                   const SpinIndependentCoupling c = random_coupling(rng);
                   const ScatteringMomentum k(log_uniform(rng, 0.1, 10.0));
                   const Complex full = reflection_amplitude(k, c, {SpinOrbitKind::rashba, 0.0}).R;
                   r.max_error = std::max(r.max_error, std::abs(full - spinless_reference_reflection(k, c.a, c.c, c.d)));
                   ++r.samples;
                 }
                 return r;
               }});
  s.push_back({"bound_state_round_trip", 1e-8, [](std::mt19937_64& rng, int n) {
                 SuiteResult r;
                 std::uniform_real_distribution<double> shift(0.1, 5.0);
                 const int m = std::max(3, n / 10);
                 for (int i = 0; i < m; ++i) {
                   const SpinOrbitParams p{SpinOrbitKind::rashba, 0.5 * (i % 3)};
                   const double k0 = p.kappa() + shift(rng);
                   SpinIndependentCoupling c = random_coupling(rng);
                   if (std::abs(k0 + c.a) < 0.1) c.a += 0.5;
                   c.d = design_coupling_for_eigenvalue(-k0 * k0, c.a, c.c, p);
                   const auto roots = find_bound_states(c, p, default_search_interval(p));
                   double best = std::numeric_limits<double>::infinity();
                   for (const auto& b : roots) {
                     if (!b.passes_duality()) r.failure = "a root failed the singular-value duality check";
                     best = std::min(best, std::abs(b.energy + k0 * k0));
                   }
                   r.max_error = std::max(r.max_error, best);
                   ++r.samples;
                 }
                 return r;
               }});
  s.push_back({"far_field_ratio", 1e-6, [](std::mt19937_64& rng, int n) {
                 SuiteResult r;
                 const int m = std::max(3, n / 10);
                 for (int i = 0; i < m; ++i) {
                   const SpinIndependentCoupling c = random_coupling(rng);
                   const SpinOrbitParams p = random_spin_orbit(rng);
                   const double kv = log_uniform(rng, 0.2, 5.0);
                   const ScatteringMomentum k(kv);
                   const Complex expected = reflection_amplitude(k, c, p).R;
                   const auto state = scattering_state(k, random_spinor(rng), far_field_window(kv, 96), {}, c, p);
                   r.max_error = std::max(r.max_error, std::abs(fit_lead_far_field(state).ratio() - expected));
                   ++r.samples;
                 }
                 return r;
               }});
  return s;
}

TaskOutput run_diagnostics(const RunConfig& cfg, const RunOptions& options) {
  const auto suites = diagnostic_suites();
  struct Outcome {
    SuiteResult result;
    bool threw = false;
  };
  const auto outcomes = parallel_map<Outcome>(suites.size(), options.threads, [&](std::size_t i) {
    std::seed_seq seq{static_cast<std::uint32_t>(options.seed), static_cast<std::uint32_t>(options.seed >> 32),
                      static_cast<std::uint32_t>(i)};
    std::mt19937_64 rng(seq);
    Outcome o;
    try {
      o.result = suites[i].body(rng, cfg.diagnostic_samples);
    } catch (const std::exception& e) {
      o.threw = true;
      o.result.failure = e.what();
    }
    return o;
  });

  TaskOutput out;
  out.table.columns = {"suite", "passed", "max_error", "tolerance", "samples"};
  json suites_json = json::object();
  for (std::size_t i = 0; i < suites.size(); ++i) {
    const SuiteResult& r = outcomes[i].result;
    const bool passed = !outcomes[i].threw && r.failure.empty() && r.max_error <= suites[i].tolerance;
    out.diagnostics_passed = out.diagnostics_passed && passed;
    out.table.rows.push_back({suites[i].name, std::string(passed ? "true" : "false"), r.max_error, suites[i].tolerance,
                              static_cast<long long>(r.samples)});
    json entry = {{"passed", passed}, {"max_error", r.max_error}, {"tolerance", suites[i].tolerance},
                  {"samples", r.samples}};
    if (!r.failure.empty()) entry["failure"] = r.failure;
    suites_json[suites[i].name] = entry;
  }
  out.extra["diagnostics"] = suites_json;
  out.extra["seed"] = options.seed;
  return out;
}

std::string cell_text(const Cell& c) {
  if (const auto* d = std::get_if<double>(&c)) return format_double(*d);
  if (const auto* i = std::get_if<long long>(&c)) return std::to_string(*i);
  return csv_field(std::get<std::string>(c));
}

json cell_json(const Cell& c) {
  if (const auto* d = std::get_if<double>(&c)) return *d;
  if (const auto* i = std::get_if<long long>(&c)) return *i;
  return std::get<std::string>(c);
}

std::string render(const Table& t, Format f) {
  if (f == Format::csv) {
    std::string out;
    for (std::size_t i = 0; i < t.columns.size(); ++i) {
      if (i) out += ',';
      out += csv_field(t.columns[i]);
    }
    out += "\r\n";
    for (const Row& row : t.rows) {
      for (std::size_t i = 0; i < row.size(); ++i) {
        if (i) out += ',';
        out += cell_text(row[i]);
      }
      out += "\r\n";
    }
    return out;
  }
  json rows = json::array();
  for (const Row& row : t.rows) {
    json r = json::array();
    for (const Cell& c : row) r.push_back(cell_json(c));
    rows.push_back(std::move(r));
  }
  return dump_json(json{{"columns", t.columns}, {"rows", rows}}, 1) + "\n";
}

json complex_json(Complex z) { return json::array({z.real(), z.imag()}); }

json matrix_json(const SpinMatrix2& m) {
  return json::array({json::array({complex_json(m(0, 0)), complex_json(m(0, 1))}),
                      json::array({complex_json(m(1, 0)), complex_json(m(1, 1))})});
}

json grid_summary(const std::vector<double>& g) {
  if (g.empty()) return nullptr;
  return {{"count", g.size()}, {"first", g.front()}, {"last", g.back()}};
}

json config_echo(const RunConfig& cfg) {
  json j;
  j["task"] = std::string(task_name(cfg.task));
  j["spin_orbit"] = {{"kind", cfg.spin_orbit.kind() == SpinOrbitKind::rashba ? "rashba" : "dresselhaus"},
                     {"kappa", cfg.spin_orbit.kappa()}};
  if (cfg.scales) {
    j["spin_orbit"]["scales"] = {{"alpha", cfg.scales->alpha}, {"m_star", cfg.scales->m_star}, {"hbar", cfg.scales->hbar}};
  }
  if (cfg.task != Task::diagnostics) {
    json c;
    c["kind"] = cfg.coupling.kind == CouplingKind::scalars   ? "scalars"
                : cfg.coupling.kind == CouplingKind::matrices ? "matrices"
                                                               : "natural";
    if (cfg.coupling.kind == CouplingKind::natural) c["rho"] = cfg.coupling.rho;
    c["A"] = matrix_json(cfg.coupling.matrices.A);
    c["C"] = matrix_json(cfg.coupling.matrices.C);
    c["D"] = matrix_json(cfg.coupling.matrices.D);
    if (cfg.coupling.scalar) {
      c["a"] = cfg.coupling.scalar->a;
      c["c"] = complex_json(cfg.coupling.scalar->c);
      c["d"] = cfg.coupling.scalar->d;
    }
    j["coupling"] = c;
  }
  j["grids"] = {{"k", grid_summary(cfg.k_grid)},
                {"energy", grid_summary(cfg.energy_grid)},
                {"energy_imag", cfg.energy_imag},
                {"lead_x", grid_summary(cfg.lead_grid)},
                {"plane_x1", grid_summary(cfg.plane_x1_grid)},
                {"plane_x2", grid_summary(cfg.plane_x2_grid)}};
  if (cfg.task == Task::green_plane) j["source"] = {cfg.source.x1, cfg.source.x2};
  return j;
}

}  // namespace

RunOutput run(const RunConfig& cfg, const RunOptions& options) {
  TaskOutput t;
  switch (cfg.task) {
    case Task::reflect_sweep: t = run_reflect_sweep(cfg, options.threads); break;
    case Task::green_plane: t = run_green_plane(cfg, options.threads); break;
    case Task::green_renorm: t = run_green_renorm(cfg, options.threads); break;
    case Task::state_dump: t = run_state_dump(cfg, options.threads); break;
    case Task::bound_states: t = run_bound_states(cfg); break;
    case Task::diagnostics: t = run_diagnostics(cfg, options); break;
  }

  RunOutput out;
  out.data = render(t.table, options.format);
  if (!t.errors.empty()) {
    out.status = ExitCode::computation;
  } else if (!t.diagnostics_passed) {
    out.status = ExitCode::diagnostics_failed;
  }

  json errors = json::array();
  for (const RowError& e : t.errors) errors.push_back({{"index", e.index}, {"kind", e.kind}, {"message", e.message}});
  json report = t.extra;
  report["tool"] = "hybridplane";
  report["version"] = HYBRID_VERSION;
  report["task"] = std::string(task_name(cfg.task));
  report["format"] = options.format == Format::csv ? "csv" : "json";
  report["columns"] = t.table.columns;
  report["rows"] = t.table.rows.size();
  report["errors"] = errors;
  report["config"] = config_echo(cfg);
  report["exit_code"] = static_cast<int>(out.status);
  report["status"] = std::string(exit_code_name(out.status));
  out.report = std::move(report);
  return out;
}

}  // namespace hybrid::cli
