"""Circular-average complexification norm and the metric-to-linear bridge.

A pair (u, v) of real d-vectors carries the norm
``(∫_0^{2π} ||cos(t) u - sin(t) v||_p^p dt)^{1/p}``, evaluated by the
periodic trapezoid rule (spectrally accurate for these smooth integrands).
Complex scalars act by ``(a+bi)(u, v) = (au - bv, av + bu)``, under which
the norm is rotation invariant.

The bridge instantiates the family ``f_delta(x) = sum_j delta_j
exp(i pi x_j / m) (z_j, 0)`` on ``Z_{2m}^n`` and checks, with explicit
constants, each intermediate inequality linking the torus functional of the
family to the sign-sum (linear) functional of the coefficients.
"""

from __future__ import annotations

import itertools
import math
from typing import Sequence

import numpy as np

from .inequalities import InequalityReport, _finalize, signed_power_mean, subset_average
from .lattice import SamplePlan

__all__ = [
    "complexification_norm",
    "circular_moment",
    "circular_moment_report",
    "contraction_check",
    "bridge_report",
    "complex_scale",
]

DEFAULT_NODES = 512


def _theta_nodes(nodes: int) -> np.ndarray:
    if nodes < 64:
        raise ValueError("need at least 64 quadrature nodes")
    return 2.0 * math.pi * np.arange(nodes) / nodes


def complexification_norm(
    u: Sequence[float],
    v: Sequence[float],
    p: float,
    nodes: int = DEFAULT_NODES,
) -> float:
    """(∫_0^{2π} ||cos(t)u - sin(t)v||_p^p dt)^{1/p}, periodic trapezoid."""
    if p < 1:
        raise ValueError("p must be >= 1")
    u = np.asarray(u, dtype=float)
    v = np.asarray(v, dtype=float)
    theta = _theta_nodes(nodes)
    integrand = np.cos(theta)[:, None] * u[None, :] - np.sin(theta)[:, None] * v[None, :]
    vals = np.sum(np.abs(integrand) ** p, axis=1)
    return float(2.0 * math.pi * np.mean(vals)) ** (1.0 / p)


def complex_scale(
    w: complex, u: np.ndarray, v: np.ndarray
) -> tuple[np.ndarray, np.ndarray]:
    """(a+bi)(u, v) = (a u - b v, a v + b u)."""
    a, b = w.real, w.imag
    return a * u - b * v, a * v + b * u


def circular_moment(p: float, tol: float = 1e-10) -> float:
    """∫_0^{2π} |cos t|^p dt by node-doubling trapezoid refinement."""
    if p < 1:
        raise ValueError("p must be >= 1")
    nodes = DEFAULT_NODES
    prev = None
    while nodes <= 1 << 22:
        theta = _theta_nodes(nodes)
        val = float(2.0 * math.pi * np.mean(np.abs(np.cos(theta)) ** p))
        if prev is not None and abs(val - prev) <= tol * max(abs(val), 1.0):
            return val
        prev = val
        nodes *= 2
    raise ArithmeticError("circular moment quadrature did not converge")


def circular_moment_report(p: float) -> dict:
    """Quadrature value of the circular moment vs the two Gamma-ratio forms.

    The reference closed form is 2 sqrt(pi) Gamma((p+1)/2) / Gamma(p/2 + 1);
    a doubled variant of the same ratio is also reported, with the mismatch
    factor between quadrature and each form.  Quadrature is ground truth.
    """
    value = circular_moment(p)
    gamma_form = (
        2.0 * math.sqrt(math.pi) * math.gamma((p + 1.0) / 2.0) / math.gamma(p / 2.0 + 1.0)
    )
    doubled_form = 2.0 * gamma_form
    return {
        "p": p,
        "quadrature": value,
        "gamma_form": gamma_form,
        "gamma_form_mismatch": value / gamma_form,
        "doubled_gamma_form": doubled_form,
        "doubled_gamma_form_mismatch": value / doubled_form,
        "flag": "doubled form disagrees with quadrature by a constant factor",
    }


def contraction_check(
    a: Sequence[float],
    zs: Sequence[Sequence[float]],
    p: float,
    plan: SamplePlan,
) -> InequalityReport:
    """sum_delta ||sum a_j delta_j z_j||_p^p <= max|a_j|^p sum_delta ||sum delta_j z_j||_p^p."""
    if p < 1:
        raise ValueError("p must be >= 1")
    a = np.asarray(a, dtype=float)
    zmat = np.asarray(zs, dtype=float)
    if zmat.ndim == 1:
        zmat = zmat[:, None]
    n = zmat.shape[0]
    if a.shape != (n,):
        raise ValueError("coefficient/vector count mismatch")
    scaled = [a[j] * zmat[j] for j in range(n)]
    plain = [zmat[j] for j in range(n)]

    def power(batch: np.ndarray) -> np.ndarray:
        return np.sum(np.abs(batch) ** p, axis=-1)

    full = tuple(range(1, n + 1))
    lhs = signed_power_mean(scaled, full, power, plan, purpose="signs:contraction")
    base = signed_power_mean(plain, full, power, plan, purpose="signs:contraction")
    rhs = float(np.max(np.abs(a)) ** p) * base
    return _finalize(
        "contraction", {"p": p, "n": n, "d": zmat.shape[1]}, lhs, {"scaled_base": rhs}, plan
    )


# ---------------------------------------------------------------------------
# the metric-to-linear bridge
# ---------------------------------------------------------------------------


def _pair_norm_p(u: np.ndarray, v: np.ndarray, p: float, nodes: int) -> float:
    return complexification_norm(u, v, p, nodes) ** p


def bridge_report(
    zs: Sequence[Sequence[float]],
    m: int,
    k: int,
    p: float,
    plan: SamplePlan,
    nodes: int = DEFAULT_NODES,
) -> InequalityReport:
    """Check the metric-to-linear implication on the exponential family.

    For f_delta(x) = sum_j delta_j e^{i pi x_j/m}(z_j, 0) on Z_{2m}^n the
    report evaluates the torus moments of the family (half-period subset
    shifts, edges, diagonal), the linear sign-sum moments of (z_j), and each
    named intermediate bound with its explicit constant:

    - half_period_lower: sum_{delta,x} ||sum_{j in S} delta_j e^{i pi x_j/m}
      (z_j,0)||^p >= 2^{p+1}(2m)^n/pi^{p-1} * sum_delta ||sum_{j in S}
      delta_j z_j||^p (averaged over S);
    - edge_upper: sum_j |1-e^{i pi/m}|^p ||(z_j,0)||^p <= pi^{p+1}/m^p *
      sum_j ||z_j||_p^p;
    - diagonal_upper: per (x, eps), sum_delta ||sum_j delta_j
      (e^{i pi(x_j+eps_j)/m} - e^{i pi x_j/m})(z_j,0)||^p <= 2 pi^{p+1}/m^p *
      sum_delta ||sum_j delta_j z_j||^p (worst case over (x, eps));

    and reports the final bookkeeping: a metric implied constant gamma on
    this family entails the linear inequality with constant (2/pi)^{2p} gamma.
    """
    zmat = np.asarray(zs, dtype=float)
    if zmat.ndim == 1:
        zmat = zmat[:, None]
    n, d = zmat.shape
    if not 1 <= k <= n:
        raise ValueError(f"k={k} out of range for n={n}")
    M = 2 * m
    if M**n * 2**n > plan.budget:
        raise ValueError("bridge enumeration exceeds the plan budget")

    def phase(xj: int) -> complex:
        return complex(math.cos(math.pi * xj / m), math.sin(math.pi * xj / m))

    def family_pair(delta: tuple[int, ...], x: tuple[int, ...]) -> tuple[np.ndarray, np.ndarray]:
        u = np.zeros(d)
        v = np.zeros(d)
        for j in range(n):
            du, dv = complex_scale(delta[j] * phase(x[j]), zmat[j], np.zeros(d))
            u += du
            v += dv
        return u, v

    deltas = list(itertools.product((-1, 1), repeat=n))
    xs = list(itertools.product(range(M), repeat=n))

    # linear side: sign moments of the raw coefficients in l_p^d
    def lp_power(batch: np.ndarray) -> np.ndarray:
        return np.sum(np.abs(batch) ** p, axis=-1)

    vec_list = [zmat[j] for j in range(n)]

    def sign_sum_p(S: tuple[int, ...]) -> float:
        return signed_power_mean(vec_list, S, lp_power, plan, purpose="signs:bridge")

    linear_subset = subset_average(sign_sum_p, n, k, plan)
    linear_full = sign_sum_p(tuple(range(1, n + 1)))
    linear_lp = math.fsum(float(np.sum(np.abs(zmat[j]) ** p)) for j in range(n))

    # intermediate 1: half-period lower bound, averaged over subsets
    def half_period_lhs(S: tuple[int, ...]) -> float:
        total = []
        for delta in deltas:
            for x in xs:
                u = np.zeros(d)
                v = np.zeros(d)
                for j in (idx - 1 for idx in S):
                    du, dv = complex_scale(delta[j] * phase(x[j]), zmat[j], np.zeros(d))
                    u += du
                    v += dv
                total.append(_pair_norm_p(u, v, p, nodes))
        return math.fsum(total)

    def half_period_rhs(S: tuple[int, ...]) -> float:
        total = []
        for delta in deltas:
            zsum = np.zeros(d)
            for j in (idx - 1 for idx in S):
                zsum = zsum + delta[j] * zmat[j]
            total.append(float(np.sum(np.abs(zsum) ** p)))
        return (2.0 ** (p + 1.0) * M**n / math.pi ** (p - 1.0)) * math.fsum(total)

    hp_lhs = subset_average(half_period_lhs, n, k, plan)
    hp_rhs = subset_average(half_period_rhs, n, k, plan)

    # intermediate 2: single-coordinate (edge) upper bound
    step = abs(phase(1) - 1.0)
    z0_norm_p = [
        _pair_norm_p(zmat[j], np.zeros(d), p, nodes) for j in range(n)
    ]
    edge_lhs = step**p * math.fsum(z0_norm_p)
    edge_rhs = (math.pi ** (p + 1.0) / m**p) * linear_lp

    # intermediate 3: diagonal (contraction) upper bound, worst (x, eps)
    diag_rhs_base = []
    for delta in deltas:
        zsum = np.zeros(d)
        for j in range(n):
            zsum = zsum + delta[j] * zmat[j]
        diag_rhs_base.append(float(np.sum(np.abs(zsum) ** p)))
    diag_rhs = (2.0 * math.pi ** (p + 1.0) / m**p) * math.fsum(diag_rhs_base)
    diag_lhs = 0.0
    for x in xs:
        for eps in itertools.product((-1, 1), repeat=n):
            total = []
            for delta in deltas:
                u = np.zeros(d)
                v = np.zeros(d)
                for j in range(n):
                    coeff = delta[j] * (phase(x[j] + eps[j]) - phase(x[j]))
                    du, dv = complex_scale(coeff, zmat[j], np.zeros(d))
                    u += du
                    v += dv
                total.append(_pair_norm_p(u, v, p, nodes))
            diag_lhs = max(diag_lhs, math.fsum(total))

    # metric side of the family (plan-free exhaustive moments)
    def metric_subset(S: tuple[int, ...]) -> float:
        # half-period shift: f_delta(x + m eps_S) - f_delta(x) flips the
        # phases on S, giving -2 e^{i pi x_j/m} per coordinate in S
        total = []
        for delta in deltas:
            for x in xs:
                u = np.zeros(d)
                v = np.zeros(d)
                for j in (idx - 1 for idx in S):
                    du, dv = complex_scale(
                        -2.0 * delta[j] * phase(x[j]), zmat[j], np.zeros(d)
                    )
                    u += du
                    v += dv
                total.append(_pair_norm_p(u, v, p, nodes))
        return math.fsum(total) / (len(deltas) * len(xs))

    metric_lhs = subset_average(metric_subset, n, k, plan) / m**p

    def metric_edge(j: int) -> float:
        total = []
        for delta in deltas:
            for x in xs:
                coeff = delta[j - 1] * (phase(x[j - 1] + 1) - phase(x[j - 1]))
                u, v = complex_scale(coeff, zmat[j - 1], np.zeros(d))
                total.append(_pair_norm_p(u, v, p, nodes))
        return math.fsum(total) / (len(deltas) * len(xs))

    metric_edges = math.fsum(metric_edge(j) for j in range(1, n + 1))

    metric_diag_total = []
    for delta in deltas:
        for x in xs:
            for eps in itertools.product((-1, 1), repeat=n):
                u = np.zeros(d)
                v = np.zeros(d)
                for j in range(n):
                    coeff = delta[j] * (phase(x[j] + eps[j]) - phase(x[j]))
                    du, dv = complex_scale(coeff, zmat[j], np.zeros(d))
                    u += du
                    v += dv
                metric_diag_total.append(_pair_norm_p(u, v, p, nodes))
    metric_diag = math.fsum(metric_diag_total) / (len(deltas) * len(xs) * 2**n)

    metric_rhs = (k / n) * metric_edges + (k / n) ** (p / 2.0) * metric_diag
    gamma = None if metric_rhs == 0.0 else metric_lhs / metric_rhs

    extra = {
        "intermediates": {
            "half_period_lower": {"lhs": hp_lhs, "rhs": hp_rhs, "holds": hp_lhs >= hp_rhs * (1 - 1e-9)},
            "edge_upper": {"lhs": edge_lhs, "rhs": edge_rhs, "holds": edge_lhs <= edge_rhs * (1 + 1e-9)},
            "diagonal_upper": {"lhs": diag_lhs, "rhs": diag_rhs, "holds": diag_lhs <= diag_rhs * (1 + 1e-9)},
        },
        "linear": {
            "subset": linear_subset,
            "full_rademacher": linear_full,
            "ell_p": linear_lp,
        },
        "metric": {
            "lhs": metric_lhs,
            "edge": metric_edges,
            "diag": metric_diag,
            "gamma": gamma,
        },
        "linear_constant_from_gamma": None
        if gamma is None
        else (2.0 / math.pi) ** (2.0 * p) * gamma,
        "shift_identity_note": "e^{i pi (x+m)/m} - e^{i pi x/m} = -2 e^{i pi x/m}",
    }
    return _finalize(
        "bridge",
        {"p": p, "m": m, "n": n, "k": k, "d": d},
        metric_lhs,
        {"edge": (k / n) * metric_edges, "diag": (k / n) ** (p / 2.0) * metric_diag},
        plan,
        extra=extra,
    )
