#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <span>
#include <vector>

#include "liqflow/basis.hpp"
#include "liqflow/errors.hpp"
#include "liqflow/linalg.hpp"

// Streaming exponential-measure moments of a trade tick stream.
//
// Time maps onto the basis coordinate with "now" pinned at the support edge
// x0 (x0 = 1 for ShiftedLegendre with x = exp((t - t_now)/tau), x0 = 0 for
// Laguerre with x = (t_now - t)/tau). Five channels are maintained to order
// 2n + 2 so the (x - x0)^2 boundary-condition measures remain computable
// without re-scanning:
//
//   mu      d mu = exponential time kernel, normalized so <1> -> 1
//   nu_p    p(t) d mu                       (prices, EMA-style)
//   nu_v    d nu = w dv, trade volume atoms under the same kernel
//   nu_pv   p d nu, price-weighted volume atoms
//   nu_adp  |dp| atoms at price-change events (volatility proxy channel)
//
// Advancing the anchor by dt transforms every channel moment vector by the
// measure's time-shift law (shift_argument with a = e^{-dt/tau} for
// ShiftedLegendre, a shift by dt/tau for Laguerre) times the kernel decay
// e^{-dt/tau}. The continuous channels additionally receive the exact
// segment integral of the kernel over (t_prev, t]; trade channels receive
// Q_k(x0) * w deposits, and Q_k(x0) = 1 for both time bases.

namespace liqflow {

struct Tick {
  std::int64_t t_ns;     // nanoseconds since epoch, non-decreasing
  double price;          // positive
  std::uint64_t volume;  // shares, may be zero (clock tick)
};

class TickStreamState {
 public:
  TickStreamState(Basis basis, int n, double tau_seconds)
      : basis_(basis), n_(n), tau_(tau_seconds), order_(2 * n + 2) {
    if (basis.kind() != BasisKind::Laguerre && basis.kind() != BasisKind::ShiftedLegendre)
      throw error("TickStreamState: time basis must be Laguerre or ShiftedLegendre");
    if (n < 1) throw error("TickStreamState: polynomial order must be >= 1");
    if (!(tau_ > 0.0)) throw error("TickStreamState: tau must be positive");
    const std::size_t len = static_cast<std::size_t>(order_) + 1;
    mu_.assign(len, 0.0);
    nu_p_.assign(len, 0.0);
    nu_v_.assign(len, 0.0);
    nu_pv_.assign(len, 0.0);
    nu_adp_.assign(len, 0.0);
    if (basis_.kind() == BasisKind::ShiftedLegendre) {
      // Antiderivatives R_k of Q_k for the exact d mu = dx segment integral.
      anti_.reserve(len);
      anti_at_one_.reserve(len);
      for (int k = 0; k <= order_; ++k) {
        Vec unit(static_cast<std::size_t>(k) + 1, 0.0);
        unit[k] = 1.0;
        Poly r = integrate(Poly{basis_, std::move(unit)});
        anti_at_one_.push_back(eval(r, 1.0));
        anti_.push_back(std::move(r.coeffs));
      }
    }
  }

  Basis basis() const { return basis_; }
  int n() const { return n_; }
  double tau() const { return tau_; }
  int order() const { return order_; }
  std::int64_t t_now_ns() const { return t_now_ns_; }
  double last_price() const { return last_price_; }
  std::uint64_t tick_count() const { return tick_count_; }

  /// Coordinate of "now": the support edge the measures accumulate against.
  double x_now() const { return basis_.kind() == BasisKind::ShiftedLegendre ? 1.0 : 0.0; }

  /// Finest timescale the boundary eigenproblems can resolve.
  double min_resolvable_timescale() const {
    return basis_.kind() == BasisKind::ShiftedLegendre ? tau_ / (n_ + 1) : tau_;
  }

  const Vec& mu_moments() const { return mu_; }
  const Vec& nu_p_moments() const { return nu_p_; }
  const Vec& nu_v_moments() const { return nu_v_; }
  const Vec& nu_pv_moments() const { return nu_pv_; }
  const Vec& nu_adp_moments() const { return nu_adp_; }

  void ingest(const Tick& tick) {
    if (!std::isfinite(tick.price) || tick.price <= 0.0)
      throw data_error("ingest: price must be finite and positive");
    if (tick_count_ > 0) {
      if (tick.t_ns < t_now_ns_) throw data_error("ingest: out-of-order tick");
      const double dt = static_cast<double>(tick.t_ns - t_now_ns_) * 1e-9;
      if (dt > 0.0) advance_anchor(dt);
      const double dp = std::abs(tick.price - last_price_);
      if (dp > 0.0) deposit(nu_adp_, dp);
    }
    const double v = static_cast<double>(tick.volume);
    if (v > 0.0) {
      deposit(nu_v_, v);
      deposit(nu_pv_, tick.price * v);
    }
    t_now_ns_ = tick.t_ns;
    last_price_ = tick.price;
    ++tick_count_;
  }

  /// Exponential moving average of price, <p> / <1>.
  double p_aver() const {
    if (tick_count_ == 0) throw error("p_aver: empty state");
    if (mu_[0] < 1e-300) return last_price_;  // point history: the EMA limit
    return nu_p_[0] / mu_[0];
  }

 private:
  // Q_k(x0) = 1 for both time bases, so a deposit adds w to every component.
  static void deposit(Vec& m, double w) {
    for (double& c : m) c += w;
  }

  void advance_anchor(double dt) {
    const double h = dt / tau_;
    const double decay = std::exp(-h);
    // Streams usually tick on a fixed grid; rebuild the transport matrix
    // only when the gap changes.
    if (h != cached_h_) {
      shift_cache_ = basis_.kind() == BasisKind::ShiftedLegendre
                         ? shift_argument(basis_, order_, decay, 0.0)
                         : shift_argument(basis_, order_, 1.0, h);
      cached_h_ = h;
    }
    const Matrix& d = shift_cache_;
    transport(mu_, d, decay);
    transport(nu_p_, d, decay);
    transport(nu_v_, d, decay);
    transport(nu_pv_, d, decay);
    transport(nu_adp_, d, decay);
    // Exact kernel segment over the elapsed interval; price holds at
    // last_price_ until the incoming tick.
    if (basis_.kind() == BasisKind::ShiftedLegendre) {
      for (int k = 0; k <= order_; ++k) {
        const double dm = anti_at_one_[k] - eval(basis_, anti_[k], decay);
        mu_[k] += dm;
        nu_p_[k] += last_price_ * dm;
      }
    } else {
      // int_0^h L_k(x) e^-x dx = -e^-h (L_k(h) - L_{k-1}(h)) for k >= 1.
      const Vec lk = eval_basis_all(basis_, order_, h);
      mu_[0] += 1.0 - decay;
      nu_p_[0] += last_price_ * (1.0 - decay);
      for (int k = 1; k <= order_; ++k) {
        const double dm = -decay * (lk[k] - lk[k - 1]);
        mu_[k] += dm;
        nu_p_[k] += last_price_ * dm;
      }
    }
  }

  // m <- decay * (D m); D is lower triangular (row k has degree k).
  void transport(Vec& m, const Matrix& d, double decay) {
    scratch_.resize(m.size());
    for (std::size_t k = 0; k < m.size(); ++k) {
      double s = 0.0;
      for (std::size_t j = 0; j <= k; ++j) s += d(k, j) * m[j];
      scratch_[k] = decay * s;
    }
    m.swap(scratch_);
  }

  Basis basis_;
  int n_;
  double tau_;
  int order_;
  std::int64_t t_now_ns_ = 0;
  double last_price_ = std::numeric_limits<double>::quiet_NaN();
  std::uint64_t tick_count_ = 0;
  Vec mu_, nu_p_, nu_v_, nu_pv_, nu_adp_;
  std::vector<Vec> anti_;  // ShiftedLegendre only
  Vec anti_at_one_;
  double cached_h_ = -1.0;
  Matrix shift_cache_;
  Vec scratch_;
};

}  // namespace liqflow
