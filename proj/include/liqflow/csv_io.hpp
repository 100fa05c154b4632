#pragma once

#include <charconv>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <istream>
#include <ostream>
#include <string>
#include <string_view>
#include <system_error>
#include <vector>

#include <json.hpp>

#include "liqflow/backtest.hpp"
#include "liqflow/errors.hpp"
#include "liqflow/indicators.hpp"
#include "liqflow/tick_stream.hpp"

// File formats:
//   tick CSV       t_ns,price,volume      (monotone t_ns, decimal price)
//   indicator CSV  t_ns,price,I0,I_IL,I_IH,P_IH,P_IH_N,P_AVER,J,dir,status
//   blotter CSV    t_ns,side,price,shares,fee
//   report JSON    summary object + trades array
// Floating point values are written shortest-round-trip so replays are
// byte-identical.

namespace liqflow {

inline constexpr std::string_view kTickHeader = "t_ns,price,volume";
inline constexpr std::string_view kIndicatorHeader =
    "t_ns,price,I0,I_IL,I_IH,P_IH,P_IH_N,P_AVER,J,dir,status";
inline constexpr std::string_view kBlotterHeader = "t_ns,side,price,shares,fee";

inline std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

inline std::string_view side_name(Side side) {
  switch (side) {
    case Side::Buy: return "buy";
    case Side::SellPosition: return "sell-position";
    case Side::SellShort: return "sell-short";
    case Side::CoverShort: return "cover-short";
  }
  return "?";
}

// ---------------------------------------------------------------------------
// Tick CSV
// ---------------------------------------------------------------------------

inline void write_ticks_csv(std::ostream& out, const std::vector<Tick>& ticks) {
  out << kTickHeader << '\n';
  for (const Tick& t : ticks)
    out << t.t_ns << ',' << format_double(t.price) << ',' << t.volume << '\n';
}

inline void write_ticks_csv(const std::string& path, const std::vector<Tick>& ticks) {
  std::ofstream out(path);
  if (!out) throw data_error("cannot open for writing: " + path);
  write_ticks_csv(out, ticks);
}

namespace detail {

template <typename T>
T parse_field(std::string_view text, std::size_t line, const char* what) {
  T value{};
  const char* begin = text.data();
  const char* end = begin + text.size();
  const auto res = std::from_chars(begin, end, value);
  if (res.ec != std::errc{} || res.ptr != end)
    throw data_error("line " + std::to_string(line) + ": bad " + what + " '" +
                     std::string(text) + "'");
  return value;
}

}  // namespace detail

inline std::vector<Tick> read_ticks_csv(std::istream& in) {
  std::vector<Tick> ticks;
  std::string line;
  std::size_t line_no = 0;
  if (!std::getline(in, line)) return ticks;  // empty file: no ticks
  ++line_no;
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != kTickHeader)
    throw data_error("line 1: expected header '" + std::string(kTickHeader) + "'");
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const std::size_t c1 = line.find(',');
    const std::size_t c2 = c1 == std::string::npos ? std::string::npos : line.find(',', c1 + 1);
    if (c1 == std::string::npos || c2 == std::string::npos ||
        line.find(',', c2 + 1) != std::string::npos)
      throw data_error("line " + std::to_string(line_no) + ": expected 3 fields");
    Tick tick;
    tick.t_ns = detail::parse_field<std::int64_t>(std::string_view(line).substr(0, c1),
                                                  line_no, "timestamp");
    tick.price = detail::parse_field<double>(
        std::string_view(line).substr(c1 + 1, c2 - c1 - 1), line_no, "price");
    tick.volume = detail::parse_field<std::uint64_t>(std::string_view(line).substr(c2 + 1),
                                                     line_no, "volume");
    if (!std::isfinite(tick.price) || tick.price <= 0.0)
      throw data_error("line " + std::to_string(line_no) + ": price must be positive");
    if (!ticks.empty() && tick.t_ns < ticks.back().t_ns)
      throw data_error("line " + std::to_string(line_no) + ": timestamps must be monotone");
    ticks.push_back(tick);
  }
  return ticks;
}

inline std::vector<Tick> read_ticks_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw data_error("cannot open: " + path);
  return read_ticks_csv(in);
}

// ---------------------------------------------------------------------------
// Indicator CSV
// ---------------------------------------------------------------------------

inline void write_indicator_header(std::ostream& out) { out << kIndicatorHeader << '\n'; }

inline void write_indicator_row(std::ostream& out, const IndicatorFrame& frame) {
  out << frame.t_ns << ',' << format_double(frame.price) << ',' << format_double(frame.i0)
      << ',' << format_double(frame.i_il) << ',' << format_double(frame.i_ih) << ','
      << format_double(frame.p_ih) << ',' << format_double(frame.p_ih_n) << ','
      << format_double(frame.p_aver) << ',' << format_double(frame.j) << ','
      << format_double(frame.dir) << ',' << (frame.ready() ? "ready" : "warmup") << '\n';
}

// ---------------------------------------------------------------------------
// Blotter CSV and report JSON
// ---------------------------------------------------------------------------

inline void write_blotter_csv(std::ostream& out, const std::vector<Trade>& trades) {
  out << kBlotterHeader << '\n';
  for (const Trade& t : trades)
    out << t.t_ns << ',' << side_name(t.side) << ',' << format_double(t.price) << ','
        << t.shares << ',' << format_double(t.fee) << '\n';
}

inline std::string_view strategy_name(Strategy s) {
  switch (s) {
    case Strategy::Null: return "null";
    case Strategy::LiquidityDirectional: return "liquidity-directional";
    case Strategy::VolatilitySignal: return "volatility-signal";
  }
  return "?";
}

inline nlohmann::json report_to_json(const BacktestReport& report,
                                     const StrategyConfig& config,
                                     const EngineConfig& engine) {
  nlohmann::json trades = nlohmann::json::array();
  for (const Trade& t : report.trades) {
    trades.push_back({{"t_ns", t.t_ns},
                      {"side", side_name(t.side)},
                      {"price", t.price},
                      {"shares", t.shares},
                      {"fee", t.fee}});
  }
  return nlohmann::json{
      {"strategy", strategy_name(report.strategy)},
      {"config",
       {{"th", config.th},
        {"unit_size", config.unit_size},
        {"fee_per_share_taker", config.fee_per_share_taker},
        {"rebate_per_share_maker", config.rebate_per_share_maker},
        {"tick_size", config.tick_size},
        {"slippage_ticks", config.slippage_ticks},
        {"force_flat_at_end", config.force_flat_at_end},
        {"basis", std::string(to_string(BasisKind(engine.basis)))},
        {"n", engine.n},
        {"tau_seconds", engine.tau_seconds},
        {"eval_every", engine.eval_every}}},
      {"summary",
       {{"pnl_cash", report.pnl_cash},
        {"proxy_marked", report.proxy_marked},
        {"max_drawdown", report.max_drawdown},
        {"trade_count", report.trade_count},
        {"deficit_episodes", report.deficit_episodes},
        {"excess_episodes", report.excess_episodes},
        {"final_position", report.final_position}}},
      {"trades", trades}};
}

}  // namespace liqflow
