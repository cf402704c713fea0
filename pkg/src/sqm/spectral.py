"""Hermite eigenfunction machinery for the rescaled oscillator process.

The stationary density is exp(-x^2)/sqrt(pi).  The transition density has
the eigenfunction expansion

    p(x, t | x0, t0) = exp(-x^2)/sqrt(pi)
                       * sum_n H_n(x) H_n(x0) / (2^n n!) * exp(-n (t-t0))

whose closed-form sum is a Gaussian with mean x0 exp(-tau) and variance
(1 - exp(-2 tau))/2; the two are implemented independently so each can
serve as the other's oracle.  The series is evaluated in the normalized
basis H_n / sqrt(2^n n!), i.e. the weight 1/(2^n n!) is folded into the
recurrence as a running product, so no intermediate factorial overflows.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np

from .errors import OrderOutOfRange, SeriesDivergence, TruncationWarning
from .report import VerificationReport

MAX_ORDER = 200

# Cramer's bound |H_n(x)| < K 2^(n/2) sqrt(n!) exp(x^2/2)
_CRAMER_K = 1.086435


def hermite_eval(n: int, x, max_order: int = MAX_ORDER):
    """Physicists' Hermite polynomial H_n(x) by forward recurrence."""
    if not 0 <= n <= max_order:
        raise OrderOutOfRange(f"order {n} outside [0, {max_order}]")
    x = np.asarray(x, dtype=float)
    h_prev = np.ones_like(x)
    if n == 0:
        return h_prev if h_prev.ndim else float(h_prev)
    h = 2.0 * x
    for k in range(1, n):
        h, h_prev = 2.0 * x * h - 2.0 * k * h_prev, h
    return h if h.ndim else float(h)


def hermite_derivative(n: int, x, max_order: int = MAX_ORDER):
    """H_n'(x) = 2 n H_{n-1}(x)."""
    if not 0 <= n <= max_order:
        raise OrderOutOfRange(f"order {n} outside [0, {max_order}]")
    if n == 0:
        x = np.asarray(x, dtype=float)
        z = np.zeros_like(x)
        return z if z.ndim else 0.0
    return 2.0 * n * hermite_eval(n - 1, x, max_order)


def hermite_second_derivative(n: int, x, max_order: int = MAX_ORDER):
    """H_n''(x) = 4 n (n-1) H_{n-2}(x)."""
    if not 0 <= n <= max_order:
        raise OrderOutOfRange(f"order {n} outside [0, {max_order}]")
    if n < 2:
        x = np.asarray(x, dtype=float)
        z = np.zeros_like(x)
        return z if z.ndim else 0.0
    return 4.0 * n * (n - 1) * hermite_eval(n - 2, x, max_order)


@dataclass(frozen=True)
class HermiteBasis:
    """Hermite polynomials up to a maximum order, with analytic derivatives."""

    max_order: int = MAX_ORDER

    def __post_init__(self):
        if not 0 < self.max_order <= MAX_ORDER:
            raise OrderOutOfRange(f"max_order must be in [1, {MAX_ORDER}]")

    def eval(self, n, x):
        return hermite_eval(n, x, self.max_order)

    def deriv(self, n, x):
        return hermite_derivative(n, x, self.max_order)

    def second_deriv(self, n, x):
        return hermite_second_derivative(n, x, self.max_order)

    def norm_squared(self, n: int) -> float:
        """Orthogonality diagonal: integral of H_n^2 exp(-x^2) = 2^n n! sqrt(pi)."""
        return (2.0 ** n) * math.factorial(n) * math.sqrt(math.pi)


def stationary_density(x):
    """Stationary density of the rescaled oscillator, exp(-x^2)/sqrt(pi)."""
    x = np.asarray(x, dtype=float)
    out = np.exp(-x * x) / math.sqrt(math.pi)
    return out if out.ndim else float(out)


@dataclass(frozen=True)
class SpectralKernel:
    """Truncated eigenfunction representation of the transition density."""

    n_terms: int = 60
    anchor: tuple = (0.0, 0.0)

    NORMALIZATION = 1.0 / math.sqrt(math.pi)

    def density(self, x, t):
        x0, t0 = self.anchor
        return transition_density_series(x, x0, t - t0, self.n_terms)

    def __call__(self, x, x0, tau):
        return transition_density_series(x, x0, tau, self.n_terms)


def transition_density_series(x, x0, tau: float, terms: int = 60,
                              warn_above: float = 1e-6):
    """Truncated Hermite-series transition density at elapsed time tau > 0.

    `terms` is the highest retained order N (modes n = 0..N).  Values can
    be slightly negative near the truncation floor; they are returned as
    computed, never clamped.  A TruncationWarning carrying the magnitude
    of the last retained term is emitted when that magnitude exceeds
    `warn_above`.
    """
    if tau <= 0.0:
        raise SeriesDivergence(
            f"series requires tau > 0 (delta limit at tau=0), got {tau}")
    if terms < 1:
        raise OrderOutOfRange(f"need at least 1 term, got {terms}")
    if terms > MAX_ORDER:
        raise OrderOutOfRange(f"terms {terms} exceeds cap {MAX_ORDER}")
    x = np.asarray(x, dtype=float)
    x0 = np.asarray(x0, dtype=float)
    # normalized recurrence g_n = H_n / sqrt(2^n n!); g_0 = 1, g_1 = sqrt(2) x,
    # g_{n+1} = sqrt(2/(n+1)) x g_n - sqrt(n/(n+1)) g_{n-1}
    gx_prev = np.ones_like(x)
    g0_prev = np.ones_like(x0)
    gx = math.sqrt(2.0) * x
    g0 = math.sqrt(2.0) * x0
    decay = math.exp(-tau)
    acc = np.ones(np.broadcast(x, x0).shape)
    f = decay
    acc = acc + gx * g0 * f
    last = gx * g0 * f
    for n in range(1, terms):
        c1 = math.sqrt(2.0 / (n + 1.0))
        c2 = math.sqrt(n / (n + 1.0))
        gx, gx_prev = c1 * x * gx - c2 * gx_prev, gx
        g0, g0_prev = c1 * x0 * g0 - c2 * g0_prev, g0
        f *= decay
        last = gx * g0 * f
        acc = acc + last
    pref = np.exp(-x * x) / math.sqrt(math.pi)
    out = pref * acc
    last_mag = float(np.max(np.abs(pref * last)))
    if last_mag > warn_above:
        warnings.warn(
            f"last retained series term has magnitude {last_mag:.3e}; "
            f"increase terms or tau", TruncationWarning, stacklevel=2)
    return out if out.ndim else float(out)


def series_tail_bound(x, x0, tau: float, terms: int = 60) -> float:
    """Rigorous truncation bound from Cramer's inequality.

    tail <= exp(-x^2)/sqrt(pi) * K^2 exp((x^2+x0^2)/2)
            * exp(-(N+1) tau) / (1 - exp(-tau)).
    """
    if tau <= 0.0:
        raise SeriesDivergence(f"bound requires tau > 0, got {tau}")
    x = np.asarray(x, dtype=float)
    x0 = np.asarray(x0, dtype=float)
    envelope = np.exp(-x * x + (x * x + x0 * x0) / 2.0) / math.sqrt(math.pi)
    geom = math.exp(-(terms + 1) * tau) / (1.0 - math.exp(-tau))
    return float(np.max(envelope) * _CRAMER_K ** 2 * geom)


def transition_density_closed(x, x0, tau: float):
    """Closed-form transition density: Gaussian with mean x0 exp(-tau) and
    variance (1 - exp(-2 tau))/2.

    Verified against brute-force summation of the eigenfunction series;
    serves as the independent oracle for it (and vice versa).
    """
    if tau <= 0.0:
        raise ValueError(f"closed-form kernel requires tau > 0, got {tau}")
    x = np.asarray(x, dtype=float)
    x0 = np.asarray(x0, dtype=float)
    rho = math.exp(-tau)
    one_minus_rho2 = -math.expm1(-2.0 * tau)  # 1 - exp(-2 tau), no cancellation
    out = np.exp(-(x - rho * x0) ** 2 / one_minus_rho2) \
        / math.sqrt(math.pi * one_minus_rho2)
    return out if out.ndim else float(out)


def mode_check(n: int, grid, basis: HermiteBasis | None = None) -> VerificationReport:
    """Maximum relative residual of the four per-mode identities.

    Checks on the grid nodes, with analytic derivatives of the recurrence:
      1. Hermite equation      H'' - 2x H' + 2n H = 0
      2. weighted-mode equation G'' + 2x G' + 2G + 2nG = 0, G = exp(-x^2) H
      3. backward mode          H_n(x0) exp(n t0) solves the conditioning-
                                variable equation  p_t0 - x0 p_x0 + p_xx/2 = 0
      4. forward mode           G_n(x) exp(-n t)  solves the target-variable
                                equation           p_t - (x p)_x - p_xx/2 = 0
    Residuals are normalized by the largest participating term.
    """
    basis = basis or HermiteBasis()
    if not 0 <= n <= basis.max_order:
        raise OrderOutOfRange(f"order {n} outside [0, {basis.max_order}]")
    x = grid.nodes()
    h = basis.eval(n, x)
    dh = basis.deriv(n, x)
    d2h = basis.second_deriv(n, x)

    def rel(residual, *terms):
        scale = np.maximum.reduce([np.abs(t) for t in terms])
        scale = np.maximum(scale, 1.0)
        return float(np.max(np.abs(residual) / scale))

    r_hermite = rel(d2h - 2.0 * x * dh + 2.0 * n * h, d2h, 2.0 * x * dh, 2.0 * n * h)

    e = np.exp(-x * x)
    g = e * h
    dg = e * (dh - 2.0 * x * h)
    d2g = e * (d2h - 4.0 * x * dh + (4.0 * x * x - 2.0) * h)
    r_weighted = rel(d2g + 2.0 * x * dg + (2.0 + 2.0 * n) * g,
                     d2g, 2.0 * x * dg, (2.0 + 2.0 * n) * g)

    # backward mode at t0 = 0: time derivative contributes n * H_n
    r_back = rel(n * h - x * dh + 0.5 * d2h, n * h, x * dh, 0.5 * d2h)

    # forward mode at t = 0: time derivative contributes -n * G_n
    r_fwd = rel(-n * g - (g + x * dg) - 0.5 * d2g, n * g, g + x * dg, 0.5 * d2g)

    metric = max(r_hermite, r_weighted, r_back, r_fwd)
    return VerificationReport(
        check_name=f"hermite_mode_{n}",
        metric=metric,
        tolerance=1e-9,
        details={
            "hermite_ode": r_hermite,
            "weighted_mode_ode": r_weighted,
            "backward_mode": r_back,
            "forward_mode": r_fwd,
            "order": n,
        },
    )
