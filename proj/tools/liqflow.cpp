// liqflow command line: synthetic tick generation, indicator extraction,
// backtests and the quadrature/skewness/Runge utilities. Every command is
// deterministic given its flags, input file and seed; no wall clock enters
// any computation path.
//
// Exit codes: 0 ok, 1 usage, 2 data error, 3 numerical degeneracy.

#include <CLI11.hpp>

#include <cmath>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include "liqflow/backtest.hpp"
#include "liqflow/csv_io.hpp"
#include "liqflow/indicators.hpp"
#include "liqflow/quadrature.hpp"
#include "liqflow/rn_estimate.hpp"
#include "liqflow/synth.hpp"
#include "liqflow/tick_stream.hpp"

namespace {

using namespace liqflow;

std::ofstream open_out(const std::string& path) {
  std::ofstream out(path);
  if (!out) throw data_error("cannot open for writing: " + path);
  return out;
}

BasisKind parse_basis(const std::string& name) {
  for (BasisKind kind : {BasisKind::Laguerre, BasisKind::Legendre, BasisKind::ShiftedLegendre,
                         BasisKind::Chebyshev, BasisKind::HermiteE})
    if (name == to_string(kind)) return kind;
  throw CLI::ValidationError("--basis", "unknown basis '" + name + "'");
}

Vec natural_moments(Basis basis, int order) {
  Vec m(static_cast<std::size_t>(order) + 1, 0.0);
  m[0] = basis.kind() == BasisKind::Legendre ? 2.0 : 1.0;
  return m;
}

int run_synth(const SynthConfig& config, const std::string& out_path) {
  write_ticks_csv(out_path, synthesize(config));
  return 0;
}

int run_indicators(const std::string& in_path, const std::string& out_path, BasisKind basis,
                   int n, double tau, int decimate, bool christoffel) {
  const auto ticks = read_ticks_csv(in_path);
  auto out = open_out(out_path);
  write_indicator_header(out);
  TickStreamState state(Basis(basis), n, tau);
  const IndicatorOptions opts{.christoffel_ratio = christoffel};
  std::size_t index = 0;
  for (const Tick& tick : ticks) {
    state.ingest(tick);
    if (index % static_cast<std::size_t>(decimate) == 0)
      write_indicator_row(out, compute_frame(state, opts));
    ++index;
  }
  return 0;
}

int run_backtest_cmd(const std::string& in_path, const std::string& report_path,
                     const std::string& blotter_path, Strategy strategy,
                     const StrategyConfig& config, const EngineConfig& engine) {
  const auto ticks = read_ticks_csv(in_path);
  const BacktestReport report = run_backtest(ticks, strategy, config, engine);
  if (!report_path.empty()) {
    auto out = open_out(report_path);
    out << report_to_json(report, config, engine).dump(2) << '\n';
  }
  if (!blotter_path.empty()) {
    auto out = open_out(blotter_path);
    write_blotter_csv(out, report.trades);
  }
  std::cout << "strategy=" << strategy_name(report.strategy)
            << " trades=" << report.trade_count << " pnl_cash=" << format_double(report.pnl_cash)
            << " max_drawdown=" << format_double(report.max_drawdown)
            << " deficit_episodes=" << report.deficit_episodes
            << " excess_episodes=" << report.excess_episodes << '\n';
  return 0;
}

int run_quadrature(BasisKind kind, const std::string& rule, int points, double x0,
                   bool x0_set, const std::string& out_path) {
  const Basis basis(kind);
  Quadrature q;
  if (rule == "gauss") {
    q = gauss(basis, natural_moments(basis, 2 * points - 1), points);
  } else if (rule == "radau") {
    const double edge = x0_set ? x0 : basis.support_min();
    q = radau(basis, natural_moments(basis, 2 * points - 1), edge, points);
  } else if (rule == "kronrod") {
    q = kronrod(basis, natural_moments(basis, 3 * points + 1), points);
  } else {
    throw CLI::ValidationError("--rule", "unknown rule '" + rule + "'");
  }
  auto out = open_out(out_path);
  out << "node,weight\n";
  for (std::size_t i = 0; i < q.nodes.size(); ++i)
    out << format_double(q.nodes[i]) << ',' << format_double(q.weights[i]) << '\n';
  return 0;
}

int run_skewness(const std::vector<double>& moments, const std::vector<double>& chi2_ks,
                 const std::string& out_path) {
  auto out = open_out(out_path);
  if (!chi2_ks.empty()) {
    out << "k,gamma,half_sqrt_8_over_k\n";
    for (double k : chi2_ks) {
      const Skewness s =
          skewness_from_moments(1.0, k, k * (k + 2.0), k * (k + 2.0) * (k + 4.0));
      out << format_double(k) << ',' << format_double(s.gamma) << ','
          << format_double(0.5 * std::sqrt(8.0 / k)) << '\n';
    }
    return 0;
  }
  if (moments.size() != 4)
    throw CLI::ValidationError("--moments", "need exactly m0,m1,m2,m3");
  const Skewness s = skewness_from_moments(moments[0], moments[1], moments[2], moments[3]);
  out << "x1,x2,w1,w2,gamma,gamma_x\n"
      << format_double(s.x1) << ',' << format_double(s.x2) << ',' << format_double(s.w1)
      << ',' << format_double(s.w2) << ',' << format_double(s.gamma) << ','
      << format_double(s.gamma_x) << '\n';
  return 0;
}

int run_runge(int n, const std::string& out_path) {
  const RungeDemo demo = runge_demo(n);
  auto out = open_out(out_path);
  out << "x,f,a_ls,a_rn\n";
  for (const RungeRow& row : demo.rows)
    out << format_double(row.x) << ',' << format_double(row.f) << ','
        << format_double(row.a_ls) << ',' << format_double(row.a_rn) << '\n';
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"orthogonal-polynomial moment indicators and liquidity backtests"};
  app.require_subcommand(1);

  // synth
  auto* synth_cmd = app.add_subcommand("synth", "generate a synthetic tick CSV");
  std::string scenario_name = "constant-rate";
  SynthConfig synth_config;
  std::string synth_out = "ticks.csv";
  synth_cmd->add_option("--scenario", scenario_name,
                        "constant-rate|regime-switch|trend-burst|price-only");
  synth_cmd->add_option("--seed", synth_config.seed, "deterministic seed");
  synth_cmd->add_option("--duration", synth_config.duration_s, "seconds of stream");
  synth_cmd->add_option("--tick-dt", synth_config.tick_dt_s, "seconds between ticks");
  synth_cmd->add_option("--price0", synth_config.price0, "starting price");
  synth_cmd->add_option("--rate", synth_config.rate, "base trade rate, shares/s");
  synth_cmd->add_option("--rate-high", synth_config.rate_high, "high-regime rate, shares/s");
  synth_cmd->add_option("--period", synth_config.regime_period_s, "regime cycle, seconds");
  synth_cmd->add_option("--out", synth_out, "output tick CSV");

  // indicators
  auto* ind_cmd = app.add_subcommand("indicators", "tick CSV -> indicator CSV");
  std::string ind_in, ind_out = "indicators.csv";
  std::string ind_basis = "shifted-legendre";
  int ind_n = 6, decimate = 1;
  double ind_tau = 128.0;
  bool christoffel = false;
  ind_cmd->add_option("--in", ind_in, "input tick CSV")->required();
  ind_cmd->add_option("--out", ind_out, "output indicator CSV");
  ind_cmd->add_option("--basis", ind_basis, "shifted-legendre|laguerre");
  ind_cmd->add_option("--n", ind_n, "polynomial order")->check(CLI::Range(1, 16));
  ind_cmd->add_option("--tau", ind_tau, "timescale, seconds")->check(CLI::PositiveNumber);
  ind_cmd->add_option("--decimate", decimate, "emit every k-th tick")
      ->check(CLI::PositiveNumber);
  ind_cmd->add_flag("--christoffel-ratio", christoffel,
                    "use the Christoffel-function ratio flow estimator");

  // backtest
  auto* bt_cmd = app.add_subcommand("backtest", "tick CSV -> report JSON + blotter CSV");
  std::string bt_in, bt_report = "report.json", bt_blotter = "blotter.csv";
  std::string bt_basis = "shifted-legendre", strategy_name_arg = "liquidity";
  StrategyConfig strat_config;
  EngineConfig engine_config;
  bt_cmd->add_option("--in", bt_in, "input tick CSV")->required();
  bt_cmd->add_option("--report", bt_report, "output report JSON");
  bt_cmd->add_option("--blotter", bt_blotter, "output blotter CSV");
  bt_cmd->add_option("--strategy", strategy_name_arg, "null|liquidity|volatility");
  bt_cmd->add_option("--basis", bt_basis, "shifted-legendre|laguerre");
  bt_cmd->add_option("--n", engine_config.n, "polynomial order")->check(CLI::Range(1, 16));
  bt_cmd->add_option("--tau", engine_config.tau_seconds, "timescale, seconds")
      ->check(CLI::PositiveNumber);
  bt_cmd->add_option("--th", strat_config.th, "direction threshold")
      ->check(CLI::Range(1e-9, 1.0));
  bt_cmd->add_option("--unit-size", strat_config.unit_size, "shares per entry")
      ->check(CLI::PositiveNumber);
  bt_cmd->add_option("--fill-slippage-ticks", strat_config.slippage_ticks,
                     "taker slippage in price ticks");
  bt_cmd->add_option("--eval-every", engine_config.eval_every,
                     "evaluate indicators every k-th tick")
      ->check(CLI::PositiveNumber);

  // quadrature
  auto* quad_cmd = app.add_subcommand("quadrature", "emit node,weight CSV for a measure");
  std::string quad_basis = "legendre", quad_rule = "gauss", quad_out = "quadrature.csv";
  int quad_points = 3;
  double quad_x0 = 0.0;
  quad_cmd->add_option("--measure", quad_basis,
                       "laguerre|legendre|shifted-legendre|chebyshev|hermite-e");
  quad_cmd->add_option("--rule", quad_rule, "gauss|radau|kronrod");
  quad_cmd->add_option("--points", quad_points,
                       "points (for kronrod: the stage-1 Gauss count)")
      ->check(CLI::PositiveNumber);
  auto* x0_opt = quad_cmd->add_option("--x0", quad_x0, "fixed Radau node (default: left edge)");
  quad_cmd->add_option("--out", quad_out, "output CSV");

  // skewness
  auto* skew_cmd = app.add_subcommand("skewness", "two-point quadrature skewness");
  std::vector<double> skew_moments;
  std::vector<double> chi2_ks;
  std::string skew_out = "skewness.csv";
  skew_cmd->add_option("--moments", skew_moments, "m0,m1,m2,m3 raw moments")->delimiter(',');
  skew_cmd->add_option("--chi2-sweep", chi2_ks, "chi-squared degrees of freedom list")
      ->delimiter(',');
  skew_cmd->add_option("--out", skew_out, "output CSV");

  // runge
  auto* runge_cmd = app.add_subcommand("runge", "least-squares vs Radon-Nikodym table");
  int runge_n = 6;
  std::string runge_out = "runge.csv";
  runge_cmd->add_option("--n", runge_n, "approximation order")->check(CLI::Range(2, 16));
  runge_cmd->add_option("--out", runge_out, "output CSV");

  try {
    app.parse(argc, argv);
    if (*synth_cmd) {
      if (scenario_name == "constant-rate")
        synth_config.scenario = Scenario::ConstantRate;
      else if (scenario_name == "regime-switch")
        synth_config.scenario = Scenario::RegimeSwitch;
      else if (scenario_name == "trend-burst")
        synth_config.scenario = Scenario::TrendBurst;
      else if (scenario_name == "price-only")
        synth_config.scenario = Scenario::PriceOnly;
      else
        throw CLI::ValidationError("--scenario", "unknown scenario '" + scenario_name + "'");
      return run_synth(synth_config, synth_out);
    }
    if (*ind_cmd)
      return run_indicators(ind_in, ind_out, parse_basis(ind_basis), ind_n, ind_tau, decimate,
                            christoffel);
    if (*bt_cmd) {
      Strategy strategy;
      if (strategy_name_arg == "null")
        strategy = Strategy::Null;
      else if (strategy_name_arg == "liquidity")
        strategy = Strategy::LiquidityDirectional;
      else if (strategy_name_arg == "volatility")
        strategy = Strategy::VolatilitySignal;
      else
        throw CLI::ValidationError("--strategy", "unknown strategy '" + strategy_name_arg + "'");
      engine_config.basis = parse_basis(bt_basis);
      return run_backtest_cmd(bt_in, bt_report, bt_blotter, strategy, strat_config,
                              engine_config);
    }
    if (*quad_cmd)
      return run_quadrature(parse_basis(quad_basis), quad_rule, quad_points, quad_x0,
                            x0_opt->count() > 0, quad_out);
    if (*skew_cmd) return run_skewness(skew_moments, chi2_ks, skew_out);
    if (*runge_cmd) return run_runge(runge_n, runge_out);
    return 1;
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  } catch (const liqflow::degenerate_error& e) {
    std::cerr << "degenerate: " << e.what() << '\n';
    return 3;
  } catch (const liqflow::data_error& e) {
    std::cerr << "data error: " << e.what() << '\n';
    return 2;
  } catch (const liqflow::error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
}
