#pragma once

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "portlab/config_io.hpp"
#include "portlab/csv.hpp"
#include "portlab/experiment.hpp"
#include "portlab/presets.hpp"
#include "portlab/version.hpp"

namespace portlab {

namespace cli_detail {

inline std::filesystem::path default_out_dir() {
  if (const char* env = std::getenv("PORTLAB_OUT"); env && *env) return env;
  return ".";
}

inline std::filesystem::path prepare_out_dir(const std::string& dir) {
  std::filesystem::path out(dir);
  std::error_code ec;
  std::filesystem::create_directories(out, ec);
  if (ec || !std::filesystem::is_directory(out))
    throw IoError("output directory '" + dir + "' is not usable");
  return out;
}

inline std::string sweep_value_label(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%g", v);
  return buf;
}

inline void write_growth_csv(const std::filesystem::path& file, const ExperimentResult& r,
                             const ArmCurve& curve) {
  io::CsvWriter csv(file);
  csv.write_row({"time_years", "mean_growth_per_year", "stderr"});
  for (std::size_t k = 0; k < r.time_years.size(); ++k) {
    const double row[3] = {r.time_years[k], curve.mean_growth[k], curve.stderr_growth[k]};
    csv.write_numeric_row(row);
  }
  csv.close();
}

inline void write_comparison_csv(const std::filesystem::path& file,
                                 const ExperimentConfig& cfg, const ComparisonCurve& curve) {
  io::CsvWriter csv(file);
  const bool swept = cfg.sweep != SweepParameter::none;
  if (swept)
    csv.write_row({sweep_parameter_name(cfg.sweep), "mean_final_growth_diff_per_year",
                   "stderr"});
  else
    csv.write_row({"mean_final_growth_diff_per_year", "stderr"});
  for (const auto& p : curve.points) {
    if (swept) {
      const double row[3] = {*p.sweep_value, p.mean_diff, p.stderr_diff};
      csv.write_numeric_row(row);
    } else {
      const double row[2] = {p.mean_diff, p.stderr_diff};
      csv.write_numeric_row(row);
    }
  }
  csv.close();
}

inline std::string summary_line(const ExperimentResult& r) {
  const auto& cfg = r.config;
  std::string line = cfg.family + " | final growth/yr:";
  const bool swept = cfg.sweep != SweepParameter::none;
  if (!swept) {
    for (const auto& c : r.curves)
      line += " " + c.arm + "=" + io::format_double(c.mean_growth.back()) + " (SE " +
              io::format_double(c.stderr_growth.back()) + ")";
  } else {
    for (const auto& c : r.comparisons) {
      const auto& first = c.points.front();
      const auto& last = c.points.back();
      line += " " + c.arm_a + "-" + c.arm_b + "[" +
              std::string(sweep_parameter_name(cfg.sweep)) + "=" +
              sweep_value_label(*first.sweep_value) + "]=" + io::format_double(first.mean_diff) +
              " ... [" + sweep_value_label(*last.sweep_value) + "]=" +
              io::format_double(last.mean_diff);
    }
  }
  return line;
}

}  // namespace cli_detail

// Write one scenario's per-asset price/variance paths for inspection.
inline void write_simulation(const ExperimentConfig& cfg, std::uint64_t trial,
                             const std::filesystem::path& out, std::ostream& log) {
  const TimeGrid grid(cfg.horizon_years, cfg.dt_years);
  const CorrelationMatrix corr(cfg.market.resolved_correlations());
  const MarketScenario sc = simulate_paths(cfg.market.assets, corr, grid, cfg.seed, trial);

  const std::size_t n = cfg.market.assets.size();
  std::vector<std::string> written;
  for (std::size_t i = 0; i < n; ++i) {
    const std::string price_name = "S_" + std::to_string(i + 1) + ".csv";
    io::CsvWriter price_csv(out / price_name);
    price_csv.write_row({"time_years", "price"});
    for (std::size_t k = 0; k < grid.points(); ++k) {
      const double row[2] = {grid.time_at(k), sc.prices(i, k)};
      price_csv.write_numeric_row(row);
    }
    price_csv.close();
    written.push_back(price_name);

    const std::string var_name = "v_" + std::to_string(i + 1) + ".csv";
    io::CsvWriter var_csv(out / var_name);
    var_csv.write_row({"time_years", "variance_per_year"});
    for (std::size_t k = 0; k < grid.points(); ++k) {
      const double row[2] = {grid.time_at(k), sc.variances(i, k)};
      var_csv.write_numeric_row(row);
    }
    var_csv.close();
    written.push_back(var_name);
  }

  io::json meta{{"tool", kToolName},        {"version", kVersion},
                {"command", "simulate"},    {"seed", cfg.seed},
                {"trial_index", trial},     {"config", io::to_json(cfg)},
                {"outputs", written}};
  io::save_json(meta, out / "metadata.json");
  log << "wrote " << n << " price and " << n << " variance paths (" << grid.points()
      << " points each) to " << out.string() << "\n";
}

// Run a campaign and write growth curves, comparison curves and the metadata
// sidecar. The sidecar echoes the resolved config, so it is sufficient on its
// own to reproduce every CSV byte for byte.
inline void write_experiment(const ExperimentConfig& cfg, unsigned workers,
                             const std::filesystem::path& out, std::ostream& log) {
  const ExperimentResult result = run_experiment(cfg, workers);
  const bool swept = cfg.sweep != SweepParameter::none;

  std::vector<std::string> written;
  for (const auto& curve : result.curves) {
    std::string name = "growth_" + curve.arm;
    if (swept)
      name += std::string("__") + sweep_parameter_name(cfg.sweep) + "_" +
              cli_detail::sweep_value_label(*curve.sweep_value);
    name += ".csv";
    cli_detail::write_growth_csv(out / name, result, curve);
    written.push_back(name);
  }
  for (const auto& curve : result.comparisons) {
    const std::string name = "comparison_" + curve.arm_a + "_vs_" + curve.arm_b + ".csv";
    cli_detail::write_comparison_csv(out / name, cfg, curve);
    written.push_back(name);
  }

  io::json meta{{"tool", kToolName},         {"version", kVersion},
                {"command", "experiment"},   {"seed", cfg.seed},
                {"config", io::to_json(cfg)}, {"outputs", written}};
  io::save_json(meta, out / "metadata.json");
  log << cli_detail::summary_line(result) << "\n";
}

// Command-line entry point; returns the process exit code.
//   0 success, 1 I/O failure, 2 invalid configuration or usage,
//   3 campaign aborted by a failing trial.
inline int run_cli(std::vector<std::string> args, std::ostream& log = std::cout,
                   std::ostream& err = std::cerr) {
  CLI::App app{"Monte Carlo laboratory for portfolio strategies on a Heston market"};
  app.name(kToolName);
  app.require_subcommand(1);

  std::string config_path;
  std::string preset_name;
  std::string out_dir = cli_detail::default_out_dir().string();
  std::optional<std::uint64_t> seed_override;
  std::uint64_t trial = 0;
  unsigned workers = 0;

  auto* simulate = app.add_subcommand("simulate", "write one scenario's price/variance paths");
  simulate->add_option("--config", config_path, "experiment config file (JSON)")->required();
  simulate->add_option("--seed", seed_override, "override the config seed");
  simulate->add_option("--trial", trial, "trial index to simulate");
  simulate->add_option("--out", out_dir, "output directory (default $PORTLAB_OUT or .)");

  auto* experiment = app.add_subcommand("experiment", "run a Monte Carlo campaign");
  auto* preset_opt =
      experiment->add_option("--preset", preset_name, "built-in campaign (fig1..fig9)");
  auto* config_opt =
      experiment->add_option("--config", config_path, "experiment config file (JSON)");
  preset_opt->excludes(config_opt);
  experiment->add_option("--seed", seed_override, "override the config seed");
  experiment->add_option("--workers", workers, "worker threads (0 = hardware)");
  experiment->add_option("--out", out_dir, "output directory (default $PORTLAB_OUT or .)");

  auto* dump = app.add_subcommand("preset", "write a built-in campaign config as JSON");
  std::string dump_name;
  std::string dump_file;
  dump->add_option("name", dump_name, "preset name (fig1..fig9)")->required();
  dump->add_option("--out", dump_file, "output file (default: stdout)");

  std::reverse(args.begin(), args.end());
  try {
    app.parse(std::move(args));
  } catch (const CLI::CallForHelp& e) {
    log << app.help();
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "usage error: " << e.what() << "\n";
    return 2;
  }

  try {
    if (dump->parsed()) {
      const ExperimentConfig cfg = preset(dump_name);
      if (dump_file.empty())
        log << io::to_json(cfg).dump(2) << "\n";
      else
        io::save_json(io::to_json(cfg), dump_file);
      return 0;
    }

    if (simulate->parsed()) {
      ExperimentConfig cfg = io::load_config(config_path);
      if (seed_override) cfg.seed = *seed_override;
      cfg.validate_market_only();
      const auto out = cli_detail::prepare_out_dir(out_dir);
      write_simulation(cfg, trial, out, log);
      return 0;
    }

    // experiment
    if (preset_name.empty() && config_path.empty())
      throw ConfigError("experiment: provide --preset or --config");
    ExperimentConfig cfg =
        preset_name.empty() ? io::load_config(config_path) : preset(preset_name);
    if (seed_override) cfg.seed = *seed_override;
    cfg.validate();
    const auto out = cli_detail::prepare_out_dir(out_dir);
    write_experiment(cfg, workers, out, log);
    return 0;
  } catch (const TrialFailure& e) {
    err << "campaign aborted: " << e.what() << "\n";
    return 3;
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << "\n";
    return 2;
  } catch (const NotPsdError& e) {
    err << "config error: " << e.what() << "\n";
    return 2;
  } catch (const std::invalid_argument& e) {
    err << "config error: " << e.what() << "\n";
    return 2;
  } catch (const IoError& e) {
    err << "i/o error: " << e.what() << "\n";
    return 1;
  } catch (const std::filesystem::filesystem_error& e) {
    err << "i/o error: " << e.what() << "\n";
    return 1;
  }
}

}  // namespace portlab
