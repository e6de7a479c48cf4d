#pragma once

#include <filesystem>
#include <fstream>
#include <initializer_list>
#include <string>
#include <vector>

#include <json.hpp>

#include "portlab/csv.hpp"
#include "portlab/experiment.hpp"

namespace portlab::io {

using nlohmann::json;

namespace detail {

inline void reject_unknown_keys(const json& j, const std::string& path,
                                std::initializer_list<const char*> allowed) {
  for (auto it = j.begin(); it != j.end(); ++it) {
    bool known = false;
    for (const char* k : allowed)
      if (it.key() == k) {
        known = true;
        break;
      }
    if (!known) throw ConfigError(path + ": unknown key '" + it.key() + "'");
  }
}

inline const json& member(const json& j, const char* key, const std::string& path) {
  auto it = j.find(key);
  if (it == j.end()) throw ConfigError(path + ": missing required key '" + key + "'");
  return *it;
}

inline double as_number(const json& j, const std::string& path) {
  if (!j.is_number()) throw ConfigError(path + ": expected a number");
  return j.get<double>();
}

inline int as_int(const json& j, const std::string& path) {
  if (!j.is_number_integer()) throw ConfigError(path + ": expected an integer");
  return j.get<int>();
}

inline std::string as_string(const json& j, const std::string& path) {
  if (!j.is_string()) throw ConfigError(path + ": expected a string");
  return j.get<std::string>();
}

inline const json& as_object(const json& j, const std::string& path) {
  if (!j.is_object()) throw ConfigError(path + ": expected an object");
  return j;
}

inline const json& as_array(const json& j, const std::string& path) {
  if (!j.is_array()) throw ConfigError(path + ": expected an array");
  return j;
}

inline double opt_number(const json& j, const char* key, double fallback,
                         const std::string& path) {
  auto it = j.find(key);
  return it == j.end() ? fallback : as_number(*it, path + "." + key);
}

inline int opt_int(const json& j, const char* key, int fallback, const std::string& path) {
  auto it = j.find(key);
  return it == j.end() ? fallback : as_int(*it, path + "." + key);
}

}  // namespace detail

// ---------------------------------------------------------------------------
// serialization (always writes the fully resolved form)
// ---------------------------------------------------------------------------

inline json to_json(const HestonParams& p) {
  return json{{"mu_per_year", p.mu},
              {"kappa_per_year", p.kappa},
              {"theta_variance_per_year", p.theta},
              {"sigma_vol_of_vol", p.sigma},
              {"rho_price_variance", p.rho},
              {"s0_price", p.s0},
              {"v0_variance_per_year", p.v0}};
}

inline json to_json(const Matrix& m) {
  json rows = json::array();
  for (std::size_t i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (std::size_t j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
    rows.push_back(std::move(row));
  }
  return rows;
}

inline json to_json(const MarketSpec& m) {
  json assets = json::array();
  for (const auto& a : m.assets) assets.push_back(to_json(a));
  return json{{"assets", std::move(assets)},
              {"correlations", to_json(m.resolved_correlations())}};
}

inline const char* strategy_kind_name(StrategyKind k) {
  switch (k) {
    case StrategyKind::passive: return "passive";
    case StrategyKind::cash_passive: return "cash_passive";
    case StrategyKind::macd: return "macd";
    default: return "rsi";
  }
}

inline const char* macd_trigger_name(MacdTrigger t) {
  return t == MacdTrigger::signal_line_cross ? "signal_line_cross" : "price_ema_offset";
}

inline json to_json(const StrategySpec& s) {
  json j{{"kind", strategy_kind_name(s.kind)},
         {"sell_factor_psi", s.sell_factor},
         {"buy_factor_phi", s.buy_factor},
         {"cash_share", s.cash_share},
         {"macd",
          {{"fast_lag_steps", s.macd.fast_lag},
           {"slow_lag_steps", s.macd.slow_lag},
           {"signal_lag_steps", s.macd.signal_lag},
           {"trigger", macd_trigger_name(s.macd.trigger)}}},
         {"rsi",
          {{"smoothing_lag_steps", s.rsi.smoothing_lag},
           {"oversold_buy_level", s.rsi.buy_below},
           {"overbought_sell_level", s.rsi.sell_above}}}};
  if (!s.assets_held.empty()) j["assets_held"] = s.assets_held;
  if (!s.weights.empty()) j["weights"] = s.weights;
  return j;
}

inline json to_json(const ExperimentArm& arm) {
  json j{{"name", arm.name}, {"strategy", to_json(arm.strategy)}};
  if (arm.market) j["market"] = to_json(*arm.market);
  return j;
}

inline json to_json(const ExperimentConfig& cfg) {
  json arms = json::array();
  for (const auto& a : cfg.arms) arms.push_back(to_json(a));
  json comparisons = json::array();
  for (const auto& c : cfg.comparisons)
    comparisons.push_back(json{{"arm_a", c.arm_a}, {"arm_b", c.arm_b}});
  json j{{"family", cfg.family},
         {"horizon_years", cfg.horizon_years},
         {"dt_years", cfg.dt_years},
         {"market", to_json(cfg.market)},
         {"arms", std::move(arms)},
         {"comparisons", std::move(comparisons)},
         {"trials", cfg.trials},
         {"seed", cfg.seed},
         {"initial_wealth", cfg.initial_wealth}};
  if (cfg.sweep != SweepParameter::none)
    j["sweep"] = json{{"parameter", sweep_parameter_name(cfg.sweep)},
                      {"values", cfg.sweep_values}};
  return j;
}

// ---------------------------------------------------------------------------
// parsing (strict: unknown keys are rejected, missing optionals take defaults)
// ---------------------------------------------------------------------------

inline HestonParams heston_from_json(const json& j, const std::string& path) {
  detail::as_object(j, path);
  detail::reject_unknown_keys(j, path,
                              {"mu_per_year", "kappa_per_year", "theta_variance_per_year",
                               "sigma_vol_of_vol", "rho_price_variance", "s0_price",
                               "v0_variance_per_year"});
  HestonParams p;
  p.mu = detail::opt_number(j, "mu_per_year", p.mu, path);
  p.kappa = detail::opt_number(j, "kappa_per_year", p.kappa, path);
  p.theta = detail::opt_number(j, "theta_variance_per_year", p.theta, path);
  p.sigma = detail::opt_number(j, "sigma_vol_of_vol", p.sigma, path);
  p.rho = detail::opt_number(j, "rho_price_variance", p.rho, path);
  p.s0 = detail::opt_number(j, "s0_price", p.s0, path);
  p.v0 = detail::opt_number(j, "v0_variance_per_year", p.v0, path);
  return p;
}

inline Matrix matrix_from_json(const json& j, const std::string& path) {
  detail::as_array(j, path);
  const std::size_t n = j.size();
  Matrix m(n, n);
  for (std::size_t i = 0; i < n; ++i) {
    const json& row = j[i];
    if (!row.is_array() || row.size() != n)
      throw ConfigError(path + "[" + std::to_string(i) + "]: expected a row of " +
                        std::to_string(n) + " numbers");
    for (std::size_t k = 0; k < n; ++k)
      m(i, k) = detail::as_number(row[k], path + "[" + std::to_string(i) + "][" +
                                              std::to_string(k) + "]");
  }
  return m;
}

inline MarketSpec market_from_json(const json& j, const std::string& path) {
  detail::as_object(j, path);
  detail::reject_unknown_keys(j, path, {"assets", "correlations"});
  MarketSpec m;
  const json& assets = detail::as_array(detail::member(j, "assets", path), path + ".assets");
  for (std::size_t i = 0; i < assets.size(); ++i)
    m.assets.push_back(heston_from_json(assets[i], path + ".assets[" + std::to_string(i) + "]"));
  if (auto it = j.find("correlations"); it != j.end())
    m.correlations = matrix_from_json(*it, path + ".correlations");
  return m;
}

inline StrategySpec strategy_from_json(const json& j, const std::string& path) {
  detail::as_object(j, path);
  detail::reject_unknown_keys(j, path,
                              {"kind", "sell_factor_psi", "buy_factor_phi", "cash_share",
                               "macd", "rsi", "assets_held", "weights"});
  StrategySpec s;
  const std::string kind =
      j.contains("kind") ? detail::as_string(j["kind"], path + ".kind") : "passive";
  if (kind == "passive")
    s.kind = StrategyKind::passive;
  else if (kind == "cash_passive")
    s.kind = StrategyKind::cash_passive;
  else if (kind == "macd")
    s.kind = StrategyKind::macd;
  else if (kind == "rsi")
    s.kind = StrategyKind::rsi;
  else
    throw ConfigError(path + ".kind: unknown strategy kind '" + kind + "'");
  s.sell_factor = detail::opt_number(j, "sell_factor_psi", s.sell_factor, path);
  s.buy_factor = detail::opt_number(j, "buy_factor_phi", s.buy_factor, path);
  s.cash_share = detail::opt_number(j, "cash_share", s.cash_share, path);
  if (auto it = j.find("macd"); it != j.end()) {
    const std::string mpath = path + ".macd";
    detail::as_object(*it, mpath);
    detail::reject_unknown_keys(*it, mpath,
                                {"fast_lag_steps", "slow_lag_steps", "signal_lag_steps",
                                 "trigger"});
    s.macd.fast_lag = detail::opt_int(*it, "fast_lag_steps", s.macd.fast_lag, mpath);
    s.macd.slow_lag = detail::opt_int(*it, "slow_lag_steps", s.macd.slow_lag, mpath);
    s.macd.signal_lag = detail::opt_int(*it, "signal_lag_steps", s.macd.signal_lag, mpath);
    if (auto t = it->find("trigger"); t != it->end()) {
      const std::string name = detail::as_string(*t, mpath + ".trigger");
      if (name == "signal_line_cross")
        s.macd.trigger = MacdTrigger::signal_line_cross;
      else if (name == "price_ema_offset")
        s.macd.trigger = MacdTrigger::price_ema_offset;
      else
        throw ConfigError(mpath + ".trigger: unknown trigger '" + name + "'");
    }
  }
  if (auto it = j.find("rsi"); it != j.end()) {
    const std::string rpath = path + ".rsi";
    detail::as_object(*it, rpath);
    detail::reject_unknown_keys(
        *it, rpath, {"smoothing_lag_steps", "oversold_buy_level", "overbought_sell_level"});
    s.rsi.smoothing_lag = detail::opt_int(*it, "smoothing_lag_steps", s.rsi.smoothing_lag, rpath);
    s.rsi.buy_below = detail::opt_number(*it, "oversold_buy_level", s.rsi.buy_below, rpath);
    s.rsi.sell_above =
        detail::opt_number(*it, "overbought_sell_level", s.rsi.sell_above, rpath);
  }
  if (auto it = j.find("assets_held"); it != j.end()) {
    detail::as_array(*it, path + ".assets_held");
    for (const auto& v : *it) {
      const int idx = detail::as_int(v, path + ".assets_held");
      if (idx < 0) throw ConfigError(path + ".assets_held: indices must be >= 0");
      s.assets_held.push_back(static_cast<std::size_t>(idx));
    }
  }
  if (auto it = j.find("weights"); it != j.end()) {
    detail::as_array(*it, path + ".weights");
    for (const auto& v : *it) s.weights.push_back(detail::as_number(v, path + ".weights"));
  }
  return s;
}

inline ExperimentConfig config_from_json(const json& j) {
  const std::string path = "config";
  detail::as_object(j, path);
  detail::reject_unknown_keys(j, path,
                              {"family", "horizon_years", "dt_years", "market", "arms",
                               "sweep", "comparisons", "trials", "seed", "initial_wealth"});
  ExperimentConfig cfg;
  if (j.contains("family")) cfg.family = detail::as_string(j["family"], path + ".family");
  cfg.horizon_years = detail::opt_number(j, "horizon_years", cfg.horizon_years, path);
  cfg.dt_years = detail::opt_number(j, "dt_years", cfg.dt_years, path);
  cfg.market = market_from_json(detail::member(j, "market", path), path + ".market");

  const json& arms = detail::as_array(detail::member(j, "arms", path), path + ".arms");
  for (std::size_t i = 0; i < arms.size(); ++i) {
    const std::string apath = path + ".arms[" + std::to_string(i) + "]";
    detail::as_object(arms[i], apath);
    detail::reject_unknown_keys(arms[i], apath, {"name", "strategy", "market"});
    ExperimentArm arm;
    arm.name = detail::as_string(detail::member(arms[i], "name", apath), apath + ".name");
    if (arms[i].contains("strategy"))
      arm.strategy = strategy_from_json(arms[i]["strategy"], apath + ".strategy");
    if (arms[i].contains("market"))
      arm.market = market_from_json(arms[i]["market"], apath + ".market");
    cfg.arms.push_back(std::move(arm));
  }

  if (auto it = j.find("sweep"); it != j.end()) {
    const std::string spath = path + ".sweep";
    detail::as_object(*it, spath);
    detail::reject_unknown_keys(*it, spath, {"parameter", "values"});
    const std::string param =
        detail::as_string(detail::member(*it, "parameter", spath), spath + ".parameter");
    if (param == "mu_per_year")
      cfg.sweep = SweepParameter::mu_per_year;
    else if (param == "cash_share")
      cfg.sweep = SweepParameter::cash_share;
    else if (param == "none")
      cfg.sweep = SweepParameter::none;
    else
      throw ConfigError(spath + ".parameter: unknown sweep parameter '" + param + "'");
    if (auto v = it->find("values"); v != it->end()) {
      detail::as_array(*v, spath + ".values");
      for (const auto& x : *v)
        cfg.sweep_values.push_back(detail::as_number(x, spath + ".values"));
    }
  }

  if (auto it = j.find("comparisons"); it != j.end()) {
    detail::as_array(*it, path + ".comparisons");
    for (std::size_t i = 0; i < it->size(); ++i) {
      const std::string cpath = path + ".comparisons[" + std::to_string(i) + "]";
      detail::as_object((*it)[i], cpath);
      detail::reject_unknown_keys((*it)[i], cpath, {"arm_a", "arm_b"});
      ComparisonSpec c;
      c.arm_a = detail::as_string(detail::member((*it)[i], "arm_a", cpath), cpath + ".arm_a");
      c.arm_b = detail::as_string(detail::member((*it)[i], "arm_b", cpath), cpath + ".arm_b");
      cfg.comparisons.push_back(std::move(c));
    }
  }

  if (auto it = j.find("trials"); it != j.end()) {
    const int t = detail::as_int(*it, path + ".trials");
    if (t < 1) throw ConfigError(path + ".trials: must be >= 1");
    cfg.trials = static_cast<std::size_t>(t);
  }
  if (auto it = j.find("seed"); it != j.end()) {
    if (!it->is_number_unsigned() && !it->is_number_integer())
      throw ConfigError(path + ".seed: expected an integer");
    cfg.seed = it->get<std::uint64_t>();
  }
  cfg.initial_wealth = detail::opt_number(j, "initial_wealth", cfg.initial_wealth, path);
  return cfg;
}

inline ExperimentConfig load_config(const std::filesystem::path& file) {
  std::ifstream in(file);
  if (!in) throw IoError("cannot open config '" + file.string() + "'");
  json j;
  try {
    j = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError("config '" + file.string() + "': " + e.what());
  }
  return config_from_json(j);
}

inline void save_json(const json& j, const std::filesystem::path& file) {
  std::ofstream out(file, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open '" + file.string() + "' for writing");
  out << j.dump(2) << '\n';
  out.close();
  if (!out) throw IoError("failed writing '" + file.string() + "'");
}

}  // namespace portlab::io
