#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <thread>

#include <CLI11.hpp>

#include "hybrid/cli.hpp"

namespace {

using hybrid::cli::ExitCode;

int finish(ExitCode code) { return static_cast<int>(code); }

void report_error(const std::string& kind, const std::string& field, const std::string& message, ExitCode code) {
  nlohmann::json j = {{"status", std::string(hybrid::cli::exit_code_name(code))},
                      {"exit_code", static_cast<int>(code)},
                      {"error", {{"kind", kind}, {"field", field}, {"message", message}}}};
  std::cerr << hybrid::cli::dump_json(j) << "\n";
}

bool write_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  out << text;
  return static_cast<bool>(out);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Spin-orbit hybrid plane: Green's functions, bound states and lead scattering"};
  app.require_subcommand(1);

  std::string config_path;
  std::string out_path;
  std::string format_name;
  int threads = 1;
  std::uint64_t seed = 0;

  for (const auto& [name, help] : {std::pair{"green-plane", "Sample the spin-orbit plane Green's matrix"},
                                   std::pair{"green-renorm", "Renormalized Green's matrix at the junction"},
                                   std::pair{"bound-states", "Discrete spectrum below the essential spectrum"},
                                   std::pair{"reflect-sweep", "Reflection amplitude over a momentum grid"},
                                   std::pair{"state-dump", "Sample a lead-incident scattering state"},
                                   std::pair{"diagnostics", "Run the randomized invariant suites"}}) {
    CLI::App* sub = app.add_subcommand(name, help);
    sub->add_option("--config", config_path, "JSON run configuration");
    sub->add_option("--out", out_path, "Data output path; the report goes to <path>.meta.json");
    sub->add_option("--format", format_name, "csv or json")->check(CLI::IsMember({"csv", "json"}));
    sub->add_option("--threads", threads, "Worker threads (0: hardware concurrency)")->check(CLI::NonNegativeNumber);
    sub->add_option("--seed", seed, "Seed for randomized diagnostics");
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return finish(ExitCode::usage);
  }

  const std::string task_text = app.get_subcommands().front()->get_name();
  const hybrid::cli::Task task = *hybrid::cli::task_from_name(task_text);

  hybrid::cli::RunConfig cfg;
  try {
    if (config_path.empty()) {
      if (task != hybrid::cli::Task::diagnostics) {
        report_error("usage", "--config", task_text + " needs --config", ExitCode::usage);
        return finish(ExitCode::usage);
      }
      cfg = hybrid::cli::default_config(task);
    } else {
      std::ifstream in(config_path, std::ios::binary);
      if (!in) {
        report_error("io", "--config", "cannot read " + config_path, ExitCode::io);
        return finish(ExitCode::io);
      }
      std::stringstream buf;
      buf << in.rdbuf();
      cfg = hybrid::cli::parse_config(buf.str(), task);
    }
  } catch (const hybrid::cli::ConfigError& e) {
    report_error("config", e.field(), e.what(), e.code());
    return finish(e.code());
  }

  hybrid::cli::RunOptions options;
  options.format = cfg.format.value_or(hybrid::cli::Format::csv);
  if (!format_name.empty()) options.format = format_name == "json" ? hybrid::cli::Format::json : hybrid::cli::Format::csv;
  options.threads = threads == 0 ? static_cast<int>(std::max(1u, std::thread::hardware_concurrency())) : threads;
  options.seed = seed;
  const std::optional<std::string> out = out_path.empty() ? cfg.output_path : std::optional<std::string>(out_path);

  const hybrid::cli::RunOutput result = hybrid::cli::run(cfg, options);
  const std::string report = hybrid::cli::dump_json(result.report) + "\n";
  if (out) {
    if (!write_file(*out, result.data) || !write_file(*out + ".meta.json", report)) {
      report_error("io", "--out", "cannot write " + *out, ExitCode::io);
      return finish(ExitCode::io);
    }
  } else {
    std::cout << result.data << std::flush;
    if (result.status != ExitCode::ok) std::cerr << report;
  }
  return finish(result.status);
}
