#pragma once

#include <cmath>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "liqflow/indicators.hpp"
#include "liqflow/tick_stream.hpp"

// Deterministic backtest engine for the liquidity-trading heuristic.
//
// The four-signal alphabet is {buy, sell-position, sell-short, cover-short}:
// positions never flip long <-> short without passing flat, and positions
// only ever open during liquidity deficit (I0 < I_IL), using the direction
// score remembered from the most recent liquidity-excess episode. During
// excess (I0 > I_IH) the direction is recomputed every evaluated tick and an
// open position is closed once it crosses the threshold.
//
// Fill model: entries rest as liquidity-providing orders and fill at the
// triggering tick's price, earning the maker rebate; exits cross the spread,
// filling half-spread slippage against the position and paying the taker
// fee. Slippage is a config knob (price ticks).

namespace liqflow {

enum class Side { Buy, SellPosition, SellShort, CoverShort };

enum class Strategy { Null, LiquidityDirectional, VolatilitySignal };

enum class Episode { Normal, Deficit, Excess };

struct StrategyConfig {
  double th = 0.85;                    // direction threshold
  std::int64_t unit_size = 100;        // shares per entry
  double fee_per_share_taker = 0.003;  // currency per share
  double rebate_per_share_maker = 0.002;
  double tick_size = 0.01;
  double slippage_ticks = 1.0;  // half-spread paid by taker fills
  bool force_flat_at_end = true;
};

struct EngineConfig {
  BasisKind basis = BasisKind::ShiftedLegendre;
  int n = 6;
  double tau_seconds = 128.0;
  int eval_every = 1;  // compute an indicator frame every k-th tick
};

struct Trade {
  std::int64_t t_ns;
  Side side;
  double price;          // fill price (J mark for the volatility strategy)
  std::int64_t shares;
  double fee;            // positive cost, negative rebate

  friend bool operator==(const Trade&, const Trade&) = default;
};

struct PortfolioState {
  std::int64_t position = 0;  // in {-unit, 0, +unit}
  double cash = 0.0;
  double last_dir = 0.0;      // remembered from the latest excess episode
  Episode episode = Episode::Normal;
};

struct BacktestReport {
  Strategy strategy = Strategy::Null;
  std::vector<Trade> trades;
  double pnl_cash = 0.0;
  double max_drawdown = 0.0;
  std::size_t trade_count = 0;
  std::size_t deficit_episodes = 0;
  std::size_t excess_episodes = 0;
  std::int64_t final_position = 0;
  bool proxy_marked = false;  // true for the volatility strategy (J marks)
};

inline Episode classify_episode(const IndicatorFrame& frame) {
  if (frame.i0 < frame.i_il) return Episode::Deficit;
  if (frame.i0 > frame.i_ih) return Episode::Excess;
  return Episode::Normal;
}

/// One step of the liquidity-directional heuristic on a Ready frame.
/// Mutates the portfolio (episode, remembered dir, position, cash) and
/// returns the order it filled, if any.
inline std::optional<Trade> step(PortfolioState& portfolio, const IndicatorFrame& frame,
                                 const StrategyConfig& config) {
  if (!frame.ready()) return std::nullopt;
  portfolio.episode = classify_episode(frame);
  const double slip = config.slippage_ticks * config.tick_size;
  std::optional<Trade> trade;

  if (portfolio.episode == Episode::Excess) {
    portfolio.last_dir = frame.dir;
    if (portfolio.position > 0 && frame.dir > config.th) {
      const double px = frame.price - slip;
      const double fee = config.fee_per_share_taker * static_cast<double>(portfolio.position);
      trade = Trade{frame.t_ns, Side::SellPosition, px, portfolio.position, fee};
      portfolio.cash += px * static_cast<double>(portfolio.position) - fee;
      portfolio.position = 0;
    } else if (portfolio.position < 0 && frame.dir < -config.th) {
      const std::int64_t shares = -portfolio.position;
      const double px = frame.price + slip;
      const double fee = config.fee_per_share_taker * static_cast<double>(shares);
      trade = Trade{frame.t_ns, Side::CoverShort, px, shares, fee};
      portfolio.cash -= px * static_cast<double>(shares) + fee;
      portfolio.position = 0;
    }
  } else if (portfolio.episode == Episode::Deficit && portfolio.position == 0) {
    if (portfolio.last_dir > config.th) {
      const double px = frame.price;
      const double fee = -config.rebate_per_share_maker * static_cast<double>(config.unit_size);
      trade = Trade{frame.t_ns, Side::Buy, px, config.unit_size, fee};
      portfolio.cash -= px * static_cast<double>(config.unit_size) + fee;
      portfolio.position = config.unit_size;
    } else if (portfolio.last_dir < -config.th) {
      const double px = frame.price;
      const double fee = -config.rebate_per_share_maker * static_cast<double>(config.unit_size);
      trade = Trade{frame.t_ns, Side::SellShort, px, config.unit_size, fee};
      portfolio.cash += px * static_cast<double>(config.unit_size) - fee;
      portfolio.position = -config.unit_size;
    }
  }
  return trade;
}

/// Volatility-signal variant: long-volatility only, marked against J.
/// Enter when the underlying shows liquidity deficit, close on excess.
inline std::optional<Trade> volatility_step(PortfolioState& portfolio,
                                            const IndicatorFrame& frame,
                                            const StrategyConfig& config) {
  if (!frame.ready()) return std::nullopt;
  portfolio.episode = classify_episode(frame);
  if (portfolio.episode == Episode::Deficit && portfolio.position == 0) {
    portfolio.cash -= frame.j * static_cast<double>(config.unit_size);
    portfolio.position = config.unit_size;
    return Trade{frame.t_ns, Side::Buy, frame.j, config.unit_size, 0.0};
  }
  if (portfolio.episode == Episode::Excess && portfolio.position > 0) {
    portfolio.cash += frame.j * static_cast<double>(portfolio.position);
    const Trade trade{frame.t_ns, Side::SellPosition, frame.j, portfolio.position, 0.0};
    portfolio.position = 0;
    return trade;
  }
  return std::nullopt;
}

/// Replay a tick stream through the indicator pipeline and a strategy.
/// Strictly sequential; identical inputs produce identical reports.
inline BacktestReport run_backtest(std::span<const Tick> ticks, Strategy strategy,
                                   const StrategyConfig& config = {},
                                   const EngineConfig& engine = {}) {
  BacktestReport report;
  report.strategy = strategy;
  report.proxy_marked = strategy == Strategy::VolatilitySignal;
  if (ticks.empty()) return report;

  TickStreamState state(Basis(engine.basis), engine.n, engine.tau_seconds);
  PortfolioState portfolio;
  Episode prev_episode = Episode::Normal;
  double peak_equity = 0.0;
  double last_mark = std::numeric_limits<double>::quiet_NaN();
  const int every = engine.eval_every > 0 ? engine.eval_every : 1;

  std::size_t index = 0;
  for (const Tick& tick : ticks) {
    state.ingest(tick);
    if (static_cast<int>(index % static_cast<std::size_t>(every)) == 0 &&
        strategy != Strategy::Null) {
      const IndicatorFrame frame = compute_frame(state);
      if (frame.ready()) {
        const auto trade = strategy == Strategy::LiquidityDirectional
                               ? step(portfolio, frame, config)
                               : volatility_step(portfolio, frame, config);
        if (trade) report.trades.push_back(*trade);
        if (portfolio.episode != prev_episode) {
          if (portfolio.episode == Episode::Deficit) ++report.deficit_episodes;
          if (portfolio.episode == Episode::Excess) ++report.excess_episodes;
          prev_episode = portfolio.episode;
        }
        last_mark = strategy == Strategy::VolatilitySignal ? frame.j : frame.price;
        const double equity =
            portfolio.cash + static_cast<double>(portfolio.position) * last_mark;
        peak_equity = std::max(peak_equity, equity);
        report.max_drawdown = std::max(report.max_drawdown, peak_equity - equity);
      }
    }
    ++index;
  }

  if (config.force_flat_at_end && portfolio.position != 0 && !std::isnan(last_mark)) {
    const std::int64_t t = ticks.back().t_ns;
    const double slip = config.slippage_ticks * config.tick_size;
    if (strategy == Strategy::VolatilitySignal) {
      portfolio.cash += last_mark * static_cast<double>(portfolio.position);
      report.trades.push_back(
          Trade{t, Side::SellPosition, last_mark, portfolio.position, 0.0});
      portfolio.position = 0;
    } else if (portfolio.position > 0) {
      const double px = last_mark - slip;
      const double fee = config.fee_per_share_taker * static_cast<double>(portfolio.position);
      report.trades.push_back(Trade{t, Side::SellPosition, px, portfolio.position, fee});
      portfolio.cash += px * static_cast<double>(portfolio.position) - fee;
      portfolio.position = 0;
    } else {
      const std::int64_t shares = -portfolio.position;
      const double px = last_mark + slip;
      const double fee = config.fee_per_share_taker * static_cast<double>(shares);
      report.trades.push_back(Trade{t, Side::CoverShort, px, shares, fee});
      portfolio.cash -= px * static_cast<double>(shares) + fee;
      portfolio.position = 0;
    }
  }

  // Cash-based P&L: exactly -sum(p dS) - fees, reconstructible from the
  // trade list. An open position (force_flat_at_end off) stays unmarked.
  report.pnl_cash = portfolio.cash;
  report.final_position = portfolio.position;
  report.trade_count = report.trades.size();
  return report;
}

/// Recompute cash from the trade list alone:
/// pnl = - sum(price * dS) - sum(fees), dS signed by side.
inline double reconcile_cash(const BacktestReport& report) {
  double cash = 0.0;
  for (const Trade& t : report.trades) {
    const double signed_shares =
        (t.side == Side::Buy || t.side == Side::CoverShort)
            ? static_cast<double>(t.shares)
            : -static_cast<double>(t.shares);
    cash -= t.price * signed_shares;
    cash -= t.fee;
  }
  return cash;
}

// ---------------------------------------------------------------------------
// P&L operator examples
// ---------------------------------------------------------------------------

struct PnlSpectrum {
  double lambda_min;
  double lambda_max;
  double pnl_bound;  // lambda_max - lambda_min (buy low, sell high)
};

/// Price operator M[p] psi = lambda M[1] psi. With dim = 1 the single
/// eigenvalue is exactly the exponential moving average.
inline PnlSpectrum pnl_price_operator(const TickStreamState& state, std::size_t dim = 0) {
  if (dim == 0) dim = static_cast<std::size_t>(state.n()) + 1;
  const Basis basis = state.basis();
  const Matrix a = build_moment_matrix(basis, state.nu_p_moments(), dim);
  const Matrix b = build_moment_matrix(basis, state.mu_moments(), dim);
  const EigSystem es = solve_gev(a, b);
  return {es.values.front(), es.values.back(), es.values.back() - es.values.front()};
}

/// Moments <Q_k dp/dt> recovered from the price channel by integration by
/// parts against the exponential kernel (no dp/dt sampling ever happens):
///   ShiftedLegendre: <Q_k p'> = (Q_k(1) p_now - <(Q_k + x Q_k') p>) / tau
///   Laguerre:        <Q_k p'> = (Q_k(0) p_now + <(Q_k' - Q_k) p>) / tau
inline Vec dpdt_moments(const TickStreamState& state, std::size_t order) {
  const Basis basis = state.basis();
  const Vec& nup = state.nu_p_moments();
  if (order + 1 > nup.size()) throw error("dpdt_moments: order exceeds stored moments");
  const auto table = derivative_table(basis, static_cast<int>(order));
  const double p_now = state.last_price();
  Vec dm(order + 1, 0.0);
  for (std::size_t k = 0; k <= order; ++k) {
    if (basis.kind() == BasisKind::ShiftedLegendre) {
      const Vec xdq = multiply_linear(basis, table[k], 1.0, 0.0);
      double inner = nup[k];
      for (std::size_t j = 0; j < xdq.size() && j < nup.size(); ++j) inner += xdq[j] * nup[j];
      dm[k] = (p_now - inner) / state.tau();
    } else {
      double inner = -nup[k];
      for (std::size_t j = 0; j < table[k].size(); ++j) inner += table[k][j] * nup[j];
      dm[k] = (p_now + inner) / state.tau();
    }
  }
  return dm;
}

struct DpdtSpectrum {
  double lambda_min;
  double lambda_max;
  double extremal_abs;  // |lambda| of the best hold-position state
};

/// Price-velocity operator M[dp/dt] psi = lambda M[1] psi.
inline DpdtSpectrum pnl_dpdt_operator(const TickStreamState& state, std::size_t dim = 0) {
  if (dim == 0) dim = static_cast<std::size_t>(state.n()) + 1;
  const Basis basis = state.basis();
  const Vec dm = dpdt_moments(state, 2 * (dim - 1));
  const Matrix a = build_moment_matrix(basis, dm, dim);
  const Matrix b = build_moment_matrix(basis, state.mu_moments(), dim);
  const EigSystem es = solve_gev(a, b);
  const double lo = es.values.front(), hi = es.values.back();
  return {lo, hi, std::max(std::abs(lo), std::abs(hi))};
}

}  // namespace liqflow
