#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <span>

#include "liqflow/moment_matrix.hpp"
#include "liqflow/rn_estimate.hpp"
#include "liqflow/tick_stream.hpp"

// Per-snapshot observables of a tick stream state.
//
//   I0      execution flow d v / d t at "now": the Radon-Nikodym derivative
//           of the volume measure against the time measure, evaluated at the
//           support edge x0.
//   I_IL,   adaptive thresholds: extremal eigenvalues of the generalized
//   I_IH    eigenproblem on the boundary-modified measures (x - x0)^2 d mu
//           and (x - x0)^2 d nu_v. Eigenvectors vanish at x0, so the
//           thresholds are computed from the past only, at timescales picked
//           by the spectrum rather than fixed at tau.
//   P_IH    price carried by the threshold state psi_IH,
//           <psi | p I | psi> / <psi | I | psi>; P_IH_N is the same with the
//           no-boundary-condition eigenvector, P_AVER the plain EMA.
//   J       volatility flow: the same derivative machinery on the |dp|
//           event channel.
//   dir     direction score in [-1, 1]: squared overlaps of the localized
//           state psi_0 with the extremal eigenvectors of the P&L matrix
//           M[(p - P_IH) I].
//
// A frame is Ready only when the Gram and boundary-modified Gram matrices
// are positive definite at the 1e-12 pivot rule and the stream has traded
// volume; otherwise the frame reports WarmUp and no numbers.

namespace liqflow {

enum class FrameStatus { WarmUp, Ready };

struct IndicatorFrame {
  std::int64_t t_ns = 0;
  double price = std::numeric_limits<double>::quiet_NaN();
  double i0 = std::numeric_limits<double>::quiet_NaN();
  double i_il = std::numeric_limits<double>::quiet_NaN();
  double i_ih = std::numeric_limits<double>::quiet_NaN();
  double p_ih = std::numeric_limits<double>::quiet_NaN();
  double p_ih_n = std::numeric_limits<double>::quiet_NaN();
  double p_aver = std::numeric_limits<double>::quiet_NaN();
  double j = std::numeric_limits<double>::quiet_NaN();
  double dir = std::numeric_limits<double>::quiet_NaN();
  FrameStatus status = FrameStatus::WarmUp;

  bool ready() const { return status == FrameStatus::Ready; }
};

struct IndicatorOptions {
  // Default flow estimator is the matrix form with pi = mu, which stays
  // defined when the volume Gram turns near-singular in quiet periods. The
  // Christoffel-function ratio needs both Grams positive definite.
  bool christoffel_ratio = false;
};

struct Thresholds {
  double i_il;
  double i_ih;
  Vec psi_il;  // n+1 coefficients, psi(x0) = 0 by construction
  Vec psi_ih;
};

namespace detail {

inline Vec boundary_modified(Basis basis, std::span<const double> m, double x0) {
  return moments_multiply_linear(basis, moments_multiply_linear(basis, m, 1.0, -x0), 1.0,
                                 -x0);
}

}  // namespace detail

/// Execution flow I0 in shares per second. The stored trade channels carry
/// d nu = w dv against the normalized time kernel, so the derivative at x0
/// comes out in units of tau and is divided back.
inline double execution_flow_now(const TickStreamState& state,
                                 const IndicatorOptions& opts = {}) {
  const std::size_t dim = static_cast<std::size_t>(state.n()) + 1;
  const Basis basis = state.basis();
  const Matrix g = build_moment_matrix(basis, state.mu_moments(), dim);
  const Matrix mv = build_moment_matrix(basis, state.nu_v_moments(), dim);
  const double raw = opts.christoffel_ratio
                         ? rn_ratio(basis, g, mv, state.x_now())
                         : rn_matrix(basis, g, mv, g, state.x_now());
  return raw / state.tau();
}

/// Volatility flow J: |dp| per second at "now".
inline double volatility_flow(const TickStreamState& state) {
  const std::size_t dim = static_cast<std::size_t>(state.n()) + 1;
  const Basis basis = state.basis();
  const Matrix g = build_moment_matrix(basis, state.mu_moments(), dim);
  const Matrix madp = build_moment_matrix(basis, state.nu_adp_moments(), dim);
  return rn_matrix(basis, g, madp, g, state.x_now()) / state.tau();
}

/// Boundary-condition thresholds: extremal generalized eigenvalues of the
/// (x - x0)^2 modified pair, with psi(x) = (x - x0) phi(x).
inline Thresholds thresholds(const TickStreamState& state) {
  const Basis basis = state.basis();
  const double x0 = state.x_now();
  const std::size_t dim = static_cast<std::size_t>(state.n());  // one less than the full dim
  const Vec mu_t = detail::boundary_modified(basis, state.mu_moments(), x0);
  const Vec nu_t = detail::boundary_modified(basis, state.nu_v_moments(), x0);
  const Matrix bt = build_moment_matrix(basis, mu_t, dim);
  const Matrix at = build_moment_matrix(basis, nu_t, dim);
  const EigSystem es = solve_gev(at, bt);
  Thresholds out;
  out.i_il = es.values.front() / state.tau();
  out.i_ih = es.values.back() / state.tau();
  Vec phi_il(dim), phi_ih(dim);
  for (std::size_t i = 0; i < dim; ++i) {
    phi_il[i] = es.vectors(i, 0);
    phi_ih[i] = es.vectors(i, dim - 1);
  }
  out.psi_il = multiply_linear(basis, phi_il, 1.0, -x0);
  out.psi_ih = multiply_linear(basis, phi_ih, 1.0, -x0);
  return out;
}

/// Price carried by a state psi: <psi | p I | psi> / <psi | I | psi>.
inline double price_of_state(const TickStreamState& state, std::span<const double> psi) {
  const std::size_t dim = static_cast<std::size_t>(state.n()) + 1;
  const Basis basis = state.basis();
  const Matrix mpv = build_moment_matrix(basis, state.nu_pv_moments(), dim);
  const Matrix mv = build_moment_matrix(basis, state.nu_v_moments(), dim);
  const double den = quadratic_form(psi, mv, psi);
  if (!(den > 0.0)) throw degenerate_error("price_of_state: <psi| I |psi> is not positive");
  return quadratic_form(psi, mpv, psi) / den;
}

/// Direction score from the P&L operator M[(p - P_IH) I] without boundary
/// condition; returns 0 on a degenerate spectrum.
inline double direction(const TickStreamState& state, double p_ih) {
  const std::size_t dim = static_cast<std::size_t>(state.n()) + 1;
  const Basis basis = state.basis();
  const Matrix g = build_moment_matrix(basis, state.mu_moments(), dim);
  const Matrix mpv = build_moment_matrix(basis, state.nu_pv_moments(), dim);
  const Matrix mv = build_moment_matrix(basis, state.nu_v_moments(), dim);
  Matrix pl(dim, dim);
  double pl_scale = 0.0, in_scale = 0.0;
  for (std::size_t i = 0; i < dim; ++i)
    for (std::size_t j = 0; j < dim; ++j) {
      pl(i, j) = mpv(i, j) - p_ih * mv(i, j);
      pl_scale = std::max(pl_scale, std::abs(pl(i, j)));
      in_scale = std::max(in_scale, std::abs(mpv(i, j)) + std::abs(p_ih * mv(i, j)));
    }
  // The P&L operator cancels to roundoff when price never leaves P_IH.
  if (pl_scale <= 1e-12 * in_scale) return 0.0;
  const EigSystem es = solve_gev(pl, g);
  if (spectrum_degenerate(es.values)) return 0.0;
  const Vec psi0 = localized_state(basis, g, state.x_now());
  Vec psi_min(dim), psi_max(dim);
  for (std::size_t i = 0; i < dim; ++i) {
    psi_min[i] = es.vectors(i, 0);
    psi_max[i] = es.vectors(i, dim - 1);
  }
  const double up = quadratic_form(psi0, g, psi_max);
  const double down = quadratic_form(psi0, g, psi_min);
  const double dir = up * up - down * down;
  return std::clamp(dir, -1.0, 1.0);
}

/// Assemble the full indicator frame; WarmUp instead of numbers whenever the
/// stream cannot support the eigenproblems yet.
inline IndicatorFrame compute_frame(const TickStreamState& state,
                                    const IndicatorOptions& opts = {}) {
  IndicatorFrame frame;
  frame.t_ns = state.t_now_ns();
  if (state.tick_count() == 0) return frame;
  frame.price = state.last_price();
  frame.p_aver = state.p_aver();

  const Basis basis = state.basis();
  const std::size_t dim = static_cast<std::size_t>(state.n()) + 1;
  if (state.nu_v_moments()[0] <= 0.0) return frame;  // no traded volume yet

  const Matrix g = build_moment_matrix(basis, state.mu_moments(), dim);
  if (!cholesky(g).ok) return frame;
  const Vec mu_t = detail::boundary_modified(basis, state.mu_moments(), state.x_now());
  if (!cholesky(build_moment_matrix(basis, mu_t, dim - 1)).ok) return frame;
  if (opts.christoffel_ratio &&
      !cholesky(build_moment_matrix(basis, state.nu_v_moments(), dim)).ok)
    return frame;

  frame.i0 = execution_flow_now(state, opts);
  if (!(frame.i0 > 0.0)) return frame;
  frame.j = volatility_flow(state);

  const Thresholds th = thresholds(state);
  frame.i_il = th.i_il;
  frame.i_ih = th.i_ih;

  const Matrix mv = build_moment_matrix(basis, state.nu_v_moments(), dim);
  if (!(quadratic_form(th.psi_ih, mv, th.psi_ih) > 0.0)) return frame;
  frame.p_ih = price_of_state(state, th.psi_ih);

  const EigSystem flow_es = solve_gev(mv, g);
  Vec psi_n(dim);
  for (std::size_t i = 0; i < dim; ++i) psi_n[i] = flow_es.vectors(i, dim - 1);
  if (quadratic_form(psi_n, mv, psi_n) > 0.0) frame.p_ih_n = price_of_state(state, psi_n);

  frame.dir = direction(state, frame.p_ih);
  frame.status = FrameStatus::Ready;
  return frame;
}

}  // namespace liqflow
