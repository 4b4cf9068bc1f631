#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "hybrid/junction.hpp"
#include "hybrid/plane_green.hpp"
#include "hybrid/spectrum.hpp"

namespace hybrid::cli {

enum class Task { green_plane, green_renorm, bound_states, reflect_sweep, state_dump, diagnostics };

std::string_view task_name(Task t);
std::optional<Task> task_from_name(std::string_view name);

enum class Format { csv, json };

// Process exit codes. Every configuration failure class has its own code.
enum class ExitCode : int {
  ok = 0,
  diagnostics_failed = 1,
  usage = 2,
  config_syntax = 3,
  config_schema = 4,
  non_hermitian = 5,
  nonpositive_rho = 6,
  empty_grid = 7,
  non_monotone_grid = 8,
  singular_coupling = 9,
  task_mismatch = 10,
  computation = 11,
  io = 12,
};

std::string_view exit_code_name(ExitCode c);

class ConfigError : public std::runtime_error {
 public:
  ConfigError(ExitCode code, std::string field, const std::string& what)
      : std::runtime_error(what), code_(code), field_(std::move(field)) {}
  ExitCode code() const { return code_; }
  const std::string& field() const { return field_; }

 private:
  ExitCode code_;
  std::string field_;
};

enum class CouplingKind { scalars, matrices, natural };

struct CouplingSpec {
  CouplingKind kind = CouplingKind::scalars;
  double rho = 0.0;                               // natural only
  CouplingMatrices matrices;                      // always filled
  std::optional<SpinIndependentCoupling> scalar;  // when spin-independent
};

struct StateSpec {
  double k = 1.0;
  Spinor spin = spin_up();
};

struct RunConfig {
  SpinOrbitParams spin_orbit;
  std::optional<PhysicalScales> scales;
  CouplingSpec coupling;
  Task task = Task::reflect_sweep;

  std::vector<double> k_grid;
  std::vector<double> energy_grid;
  double energy_imag = 0.0;
  std::vector<double> lead_grid;
  std::vector<double> plane_x1_grid;
  std::vector<double> plane_x2_grid;
  PlanePoint source{0.0, 0.0};

  StateSpec state;
  std::optional<SearchInterval> search;
  int search_grid_points = 1000;
  int reality_samples = 200;
  int diagnostic_samples = 100;

  std::optional<std::string> output_path;
  std::optional<Format> format;
};

/// Parses and validates a JSON config. `selected` is the subcommand; when the
/// document also names a task the two must agree.
RunConfig parse_config(std::string_view text, std::optional<Task> selected = std::nullopt);

/// Config used when none is given (diagnostics only).
RunConfig default_config(Task task);

struct RunOptions {
  Format format = Format::csv;
  int threads = 1;
  std::uint64_t seed = 0;
};

struct RunOutput {
  std::string data;       // CSV or JSON table
  nlohmann::json report;  // metadata sidecar, errors included
  ExitCode status = ExitCode::ok;
};

RunOutput run(const RunConfig& cfg, const RunOptions& options);

/// printf("%.17g"); non-finite values print as nan, inf, -inf.
std::string format_double(double v);

/// RFC-4180 field quoting.
std::string csv_field(std::string_view s);

/// JSON text with every float printed to 17 significant digits and
/// non-finite floats as null. Objects keep nlohmann's sorted key order.
std::string dump_json(const nlohmann::json& j, int indent = 2);

}  // namespace hybrid::cli
