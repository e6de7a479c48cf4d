#pragma once

#include <stdexcept>
#include <string>
#include <vector>

#include "portlab/experiment.hpp"

namespace portlab {

namespace detail {

inline MarketSpec iid_market(std::size_t n, double mu, double kappa, double theta,
                             double sigma, double rho, double s0, double v0) {
  MarketSpec m;
  m.assets.assign(n, HestonParams{mu, kappa, theta, sigma, rho, s0, v0});
  return m;
}

inline ExperimentArm passive_arm(std::string name, double cash_share = 0.0) {
  ExperimentArm arm;
  arm.name = std::move(name);
  arm.strategy.kind = cash_share > 0.0 ? StrategyKind::cash_passive : StrategyKind::passive;
  arm.strategy.cash_share = cash_share;
  return arm;
}

inline ExperimentArm indicator_arm(std::string name, StrategyKind kind) {
  ExperimentArm arm;
  arm.name = std::move(name);
  arm.strategy.kind = kind;
  arm.strategy.sell_factor = 0.5;
  arm.strategy.buy_factor = 0.5;
  arm.strategy.cash_share = 0.0;
  return arm;
}

}  // namespace detail

// Caption-parameter campaigns, one per figure of the study. Knobs the source
// plots leave unstated (trust factors, indicator lags, initial cash of the
// indicator portfolios, sweep grids, the exact kappa/theta spread and the
// intra-block correlation of the diversification setup) take the defaults
// below; all of them can be overridden through a config file.
inline ExperimentConfig preset(const std::string& name) {
  ExperimentConfig cfg;
  cfg.family = name;
  cfg.horizon_years = 2.0;
  cfg.dt_years = 0.00390625;  // 2^-8
  cfg.initial_wealth = 1000.0;

  if (name == "fig1") {
    // Three passive portfolios with different diversification levels. The
    // base market is the positively correlated block (identical parameters,
    // pairwise 0.8); the single-asset portfolio holds one asset of that
    // block. The well-diversified portfolio runs on its own market of three
    // uncorrelated assets with a small kappa/theta spread.
    cfg.market = detail::iid_market(3, 0.1, 1.2, 0.05, 0.5, -0.66, 100.0, 0.035);
    Matrix corr = Matrix::identity(3);
    for (std::size_t i = 0; i < 3; ++i)
      for (std::size_t j = 0; j < 3; ++j)
        if (i != j) corr(i, j) = 0.8;
    cfg.market.correlations = corr;

    MarketSpec well = detail::iid_market(3, 0.1, 1.2, 0.05, 0.5, -0.66, 100.0, 0.035);
    well.assets[0].kappa = 1.0;
    well.assets[0].theta = 0.04;
    well.assets[1].kappa = 1.2;
    well.assets[1].theta = 0.05;
    well.assets[2].kappa = 1.4;
    well.assets[2].theta = 0.06;

    ExperimentArm well_arm = detail::passive_arm("well_diversified");
    well_arm.market = well;
    cfg.arms.push_back(well_arm);
    cfg.arms.push_back(detail::passive_arm("poorly_diversified"));
    ExperimentArm single = detail::passive_arm("not_diversified");
    single.strategy.assets_held = {0};
    cfg.arms.push_back(single);
    cfg.comparisons = {{"well_diversified", "not_diversified"},
                       {"poorly_diversified", "not_diversified"},
                       {"well_diversified", "poorly_diversified"}};
    cfg.trials = 1000;
    return cfg;
  }

  if (name == "fig2" || name == "fig3") {
    cfg.market = detail::iid_market(5, name == "fig2" ? 0.1 : 0.001, 1.2, 0.05, 0.5,
                                    -0.66, 100.0, 0.025);
    cfg.arms.push_back(detail::passive_arm("all_in"));
    cfg.arms.push_back(detail::passive_arm("with_cash", 0.28));
    cfg.comparisons = {{"with_cash", "all_in"}};
    cfg.trials = 1000;
    return cfg;
  }

  if (name == "fig4") {
    cfg.market = detail::iid_market(5, 0.1, 1.2, 0.05, 0.5, -0.66, 100.0, 0.025);
    cfg.arms.push_back(detail::passive_arm("all_in"));
    cfg.arms.push_back(detail::passive_arm("cash_10", 0.10));
    cfg.arms.push_back(detail::passive_arm("cash_28", 0.28));
    cfg.arms.push_back(detail::passive_arm("cash_50", 0.50));
    cfg.arms.push_back(detail::passive_arm("cash_90", 0.90));
    cfg.comparisons = {{"cash_10", "all_in"},
                       {"cash_28", "all_in"},
                       {"cash_50", "all_in"},
                       {"cash_90", "all_in"}};
    cfg.sweep = SweepParameter::mu_per_year;
    cfg.sweep_values = {0.001, 0.05, 0.1, 0.15, 0.2, 0.25, 0.3};
    cfg.trials = 5000;
    return cfg;
  }

  if (name == "fig5" || name == "fig6") {
    cfg.market = detail::iid_market(10, name == "fig5" ? 0.005 : 0.1, 1.2, 0.05, 0.5,
                                    -0.66, 100.0, 0.025);
    cfg.arms.push_back(detail::passive_arm("passive"));
    cfg.arms.push_back(detail::indicator_arm("macd", StrategyKind::macd));
    cfg.comparisons = {{"macd", "passive"}};
    cfg.trials = 1000;
    return cfg;
  }

  if (name == "fig7" || name == "fig8") {
    cfg.market = detail::iid_market(5, name == "fig7" ? 0.1 : 0.5, 1.2, 0.05, 0.5, -0.66,
                                    100.0, 0.025);
    cfg.arms.push_back(detail::passive_arm("passive"));
    cfg.arms.push_back(detail::indicator_arm("rsi", StrategyKind::rsi));
    cfg.comparisons = {{"rsi", "passive"}};
    cfg.trials = 1000;
    return cfg;
  }

  if (name == "fig9") {
    cfg.market = detail::iid_market(5, 0.1, 1.2, 0.05, 0.5, -0.66, 100.0, 0.025);
    cfg.arms.push_back(detail::passive_arm("passive"));
    cfg.arms.push_back(detail::indicator_arm("macd", StrategyKind::macd));
    cfg.arms.push_back(detail::indicator_arm("rsi", StrategyKind::rsi));
    cfg.comparisons = {{"macd", "passive"}, {"rsi", "passive"}};
    cfg.sweep = SweepParameter::mu_per_year;
    cfg.sweep_values = {-0.1, -0.05, 0.0, 0.05, 0.1, 0.2, 0.3, 0.4, 0.5};
    cfg.trials = 5000;
    return cfg;
  }

  throw ConfigError("unknown preset '" + name + "'");
}

inline std::vector<std::string> preset_names() {
  return {"fig1", "fig2", "fig3", "fig4", "fig5", "fig6", "fig7", "fig8", "fig9"};
}

}  // namespace portlab
