"""Symmetric-matrix spectral calculus, Schatten norms, trace inequalities.

The eigensolver is a self-contained cyclic Jacobi iteration (deterministic,
accurate at desk scale d <= 64); fractional matrix powers clip tiny negative
eigenvalues attributable to roundoff.  The PSD-subadditivity counterexample
is evaluated in exact rational arithmetic for integer exponents, because the
quadratic form of interest is a ~1e-12 cancellation of O(1) entries.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

import numpy as np

from .inequalities import InequalityReport, _finalize, signed_power_mean, subset_average
from .lattice import SamplePlan
from .rng import stream

__all__ = [
    "SymMatrix",
    "jacobi_eigh",
    "eigen_sym",
    "schatten_norm",
    "trace_power",
    "trace_mixed",
    "MainQge1",
    "Qlt1",
    "LambdaFamily",
    "Holder",
    "LiebThirring",
    "OpConvex",
    "trace_inequality_report",
    "PsdCounterexample",
    "psd_counterexample",
    "random_psd",
    "schatten_xp_report",
    "psd_xp_report",
    "khinchine_report",
]

_JACOBI_SWEEP_CAP = 100
_JACOBI_TOL = 1e-13
_PSD_CLIP = 1e-12


# ---------------------------------------------------------------------------
# eigensolver
# ---------------------------------------------------------------------------


def jacobi_eigh(a: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Cyclic Jacobi diagonalization of a real symmetric matrix.

    Returns (eigenvalues descending, orthonormal eigenvectors as columns).
    Convergence: off-diagonal Frobenius norm <= 1e-13 * ||A||_F, at most 100
    sweeps; non-convergence raises ArithmeticError.
    """
    a = np.asarray(a, dtype=float)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ValueError("matrix must be square")
    if not np.allclose(a, a.T, atol=0.0, rtol=0.0):
        a = 0.5 * (a + a.T)
    d = a.shape[0]
    work = a.copy()
    vecs = np.eye(d)
    norm = float(np.linalg.norm(a))
    if d == 1 or norm == 0.0:
        order = np.argsort(-np.diag(work), kind="stable")
        return np.diag(work)[order], vecs[:, order]
    threshold = _JACOBI_TOL * norm
    for _ in range(_JACOBI_SWEEP_CAP):
        offdiag = work.copy()
        np.fill_diagonal(offdiag, 0.0)
        off = float(np.linalg.norm(offdiag))
        if off <= threshold:
            break
        for p in range(d - 1):
            for q in range(p + 1, d):
                apq = work[p, q]
                if apq == 0.0:
                    continue
                app, aqq = work[p, p], work[q, q]
                tau = (aqq - app) / (2.0 * apq)
                t = math.copysign(1.0, tau) / (
                    abs(tau) + math.sqrt(1.0 + tau * tau)
                )
                c = 1.0 / math.sqrt(1.0 + t * t)
                s = t * c
                rot_p = c * work[:, p] - s * work[:, q]
                rot_q = s * work[:, p] + c * work[:, q]
                work[:, p], work[:, q] = rot_p, rot_q
                rot_p = c * work[p, :] - s * work[q, :]
                rot_q = s * work[p, :] + c * work[q, :]
                work[p, :], work[q, :] = rot_p, rot_q
                work[p, q] = work[q, p] = 0.0
                vec_p = c * vecs[:, p] - s * vecs[:, q]
                vec_q = s * vecs[:, p] + c * vecs[:, q]
                vecs[:, p], vecs[:, q] = vec_p, vec_q
    else:
        raise ArithmeticError("Jacobi iteration did not converge in 100 sweeps")
    eigvals = np.diag(work).copy()
    order = np.argsort(-eigvals, kind="stable")
    return eigvals[order], vecs[:, order]


@dataclass(frozen=True)
class SymMatrix:
    """Real symmetric matrix with a spectral cache and a PSD flag."""

    entries: np.ndarray
    eigenvalues: np.ndarray
    eigenvectors: np.ndarray
    psd: bool

    @staticmethod
    def from_array(a: np.ndarray) -> "SymMatrix":
        a = np.asarray(a, dtype=float)
        sym = 0.5 * (a + a.T)
        vals, vecs = jacobi_eigh(sym)
        lam_max = float(np.max(np.abs(vals))) if vals.size else 0.0
        psd = bool(np.min(vals) >= -_PSD_CLIP * max(lam_max, 1.0))
        sym = sym.copy()
        sym.setflags(write=False)
        vals.setflags(write=False)
        vecs.setflags(write=False)
        return SymMatrix(sym, vals, vecs, psd)

    @property
    def order(self) -> int:
        return self.entries.shape[0]

    def power(self, q: float) -> np.ndarray:
        """Spectral A^q; fractional q requires (numerically) PSD input."""
        vals = self.eigenvalues
        if float(q) == int(q) and q >= 0:
            powered = vals ** int(q)
        else:
            lam_max = float(np.max(np.abs(vals))) if vals.size else 0.0
            clipped = vals.copy()
            tiny = (clipped < 0) & (clipped >= -_PSD_CLIP * max(lam_max, 1.0))
            clipped[tiny] = 0.0
            if np.any(clipped < 0):
                raise ValueError(
                    f"fractional power {q} of a matrix with negative eigenvalue"
                )
            powered = clipped**q
        return (self.eigenvectors * powered) @ self.eigenvectors.T


def _as_sym(a: "SymMatrix | np.ndarray") -> SymMatrix:
    return a if isinstance(a, SymMatrix) else SymMatrix.from_array(np.asarray(a))


def eigen_sym(a: "SymMatrix | np.ndarray") -> tuple[np.ndarray, np.ndarray]:
    """Spectrum (eigenvalues descending, eigenvector columns)."""
    m = _as_sym(a)
    return m.eigenvalues, m.eigenvectors


# ---------------------------------------------------------------------------
# norms and traces
# ---------------------------------------------------------------------------


def schatten_norm(a: "SymMatrix | np.ndarray", p: float) -> float:
    """l_p norm of the singular values (eigenvalues when symmetric)."""
    if p < 1:
        raise ValueError("p must be >= 1")
    if isinstance(a, SymMatrix):
        sv = np.abs(a.eigenvalues)
    else:
        arr = np.asarray(a, dtype=float)
        if arr.shape[0] == arr.shape[1] and np.array_equal(arr, arr.T):
            sv = np.abs(jacobi_eigh(arr)[0])
        else:
            gram = arr.T @ arr
            vals, _ = jacobi_eigh(gram)
            sv = np.sqrt(np.clip(vals, 0.0, None))
    return float(np.sum(sv**p)) ** (1.0 / p)


def trace_power(a: "SymMatrix | np.ndarray", q: float) -> float:
    """tr(A^q) by eigenvalues (PSD required for fractional q)."""
    m = _as_sym(a)
    if float(q) == int(q) and q >= 0:
        return float(np.sum(m.eigenvalues ** int(q)))
    return float(np.trace(m.power(q)))


def trace_mixed(
    a: "SymMatrix | np.ndarray", b: "SymMatrix | np.ndarray", q: float
) -> float:
    """tr(A^q B) via the spectral functional calculus for A^q."""
    ma, mb = _as_sym(a), _as_sym(b)
    return float(np.trace(ma.power(q) @ mb.entries))


# ---------------------------------------------------------------------------
# trace inequality kinds
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class MainQge1:
    """(tr((A+B)^q A))^{1/q} <= (tr A^{q+1})^{1/q} + (tr B^q A)^{1/q}, q >= 1."""

    q: float


@dataclass(frozen=True)
class Qlt1:
    """tr((A+B)^q A) <= tr A^{q+1} + tr B^q A, 0 < q < 1."""

    q: float


@dataclass(frozen=True)
class LambdaFamily:
    """tr((A+B)^{q-1} A) <= min_l tr A^q / l^r + tr(B^{q-1}A)/(1-l)^r."""

    q: float


@dataclass(frozen=True)
class Holder:
    """Alternating-word trace vs the two-factor interpolation bound.

    a = (a_0..a_k), b = (b_1..b_k) with sum(a)+sum(b) = q+1 and the cyclic
    constraint b_j + b_{j+1} <= 2q a_j (with b_0 := b_k).
    """

    q: float
    a: tuple[float, ...]
    b: tuple[float, ...]


@dataclass(frozen=True)
class LiebThirring:
    """tr((XYX)^r) <= tr(X^r Y^r X^r), r >= 1."""

    r: float


@dataclass(frozen=True)
class OpConvex:
    """A^t/s^{t-1} + B^t/(1-s)^{t-1} - (A+B)^t is PSD for t in [1,2]."""

    theta: float
    s: float


_LAMBDA_GRID = np.arange(1, 1026) / 1026.0


def trace_inequality_report(
    a: "SymMatrix | np.ndarray",
    b: "SymMatrix | np.ndarray",
    kind: "MainQge1 | Qlt1 | LambdaFamily | Holder | LiebThirring | OpConvex",
) -> InequalityReport:
    """Evaluate one trace inequality instance on a PSD pair."""
    ma, mb = _as_sym(a), _as_sym(b)
    if not (ma.psd and mb.psd):
        raise ValueError("trace inequalities require PSD inputs")
    d = ma.order
    params: dict = {"d": d, "kind": type(kind).__name__}

    if isinstance(kind, MainQge1):
        q = kind.q
        if q < 1:
            raise ValueError("MainQge1 requires q >= 1")
        params["q"] = q
        msum = SymMatrix.from_array(ma.entries + mb.entries)
        lhs = trace_mixed(msum, ma, q) ** (1.0 / q)
        t1 = trace_power(ma, q + 1.0) ** (1.0 / q)
        t2 = trace_mixed(mb, ma, q) ** (1.0 / q)
        return _finalize("trace_main_qge1", params, lhs, {"pure": t1, "mixed": t2}, None)

    if isinstance(kind, Qlt1):
        q = kind.q
        if not 0 < q < 1:
            raise ValueError("Qlt1 requires 0 < q < 1")
        params["q"] = q
        msum = SymMatrix.from_array(ma.entries + mb.entries)
        lhs = trace_mixed(msum, ma, q)
        t1 = trace_power(ma, q + 1.0)
        t2 = trace_mixed(mb, ma, q)
        return _finalize("trace_qlt1", params, lhs, {"pure": t1, "mixed": t2}, None)

    if isinstance(kind, LambdaFamily):
        q = kind.q
        if q < 1:
            raise ValueError("LambdaFamily requires q >= 1")
        params["q"] = q
        r = max(q - 2.0, 0.0)
        msum = SymMatrix.from_array(ma.entries + mb.entries)
        lhs = trace_mixed(msum, ma, q - 1.0)
        v = trace_power(ma, q)
        z = trace_mixed(mb, ma, q - 1.0)
        lams = list(_LAMBDA_GRID)
        if r > 0 and v > 0 and z > 0:
            # closed-form minimizer of v/l^r + z/(1-l)^r
            lam_star = 1.0 / (1.0 + (z / v) ** (1.0 / (r + 1.0)))
            lams.append(lam_star)
        rhs = min(v / lam**r + z / (1.0 - lam) ** r for lam in lams)
        return _finalize(
            "trace_lambda_family", params, lhs, {"min_over_lambda": rhs}, None,
            extra={"r": r, "v": v, "z": z},
        )

    if isinstance(kind, Holder):
        q = kind.q
        av, bv = tuple(kind.a), tuple(kind.b)
        if len(av) != len(bv) + 1 and len(av) != len(bv):
            # word A^{a_0} B^{b_1} A^{a_1} ... B^{b_k}: k+1 a's and k b's,
            # or the cyclic k = len(b) with a_k merged into a_0.
            raise ValueError("need len(a) == len(b) + 1 or len(a) == len(b)")
        if any(x < 0 for x in av + bv):
            raise ValueError("word exponents must be nonnegative")
        total = math.fsum(av) + math.fsum(bv)
        if abs(total - (q + 1.0)) > 1e-12:
            raise ValueError("word exponents must sum to q + 1")
        k = len(bv)
        cyc_b = (bv[-1],) + bv  # b_0 := b_k
        for j in range(min(len(av), k)):
            if cyc_b[j] + cyc_b[j + 1] > 2.0 * q * av[j] + 1e-12:
                raise ValueError("constraint b_j + b_{j+1} <= 2 q a_j violated")
        params.update({"q": q, "a": list(av), "b": list(bv)})
        word = np.eye(d)
        for i, ai in enumerate(av):
            word = word @ ma.power(ai)
            if i < k:
                word = word @ mb.power(bv[i])
        lhs = float(np.trace(word))
        sb = math.fsum(bv)
        rhs = trace_power(ma, q + 1.0) ** (1.0 - sb / q) * trace_mixed(
            mb, ma, q
        ) ** (sb / q)
        return _finalize("trace_holder", params, lhs, {"interpolated": rhs}, None)

    if isinstance(kind, LiebThirring):
        r = kind.r
        if r < 1:
            raise ValueError("LiebThirring requires r >= 1")
        params["r"] = r
        x, y = ma, mb
        xyx = SymMatrix.from_array(x.entries @ y.entries @ x.entries)
        lhs = trace_power(xyx, r)
        xr, yr = x.power(r), y.power(r)
        rhs = float(np.trace(xr @ yr @ xr))
        return _finalize("trace_lieb_thirring", params, lhs, {"powered": rhs}, None)

    if isinstance(kind, OpConvex):
        theta, s = kind.theta, kind.s
        if not 1.0 <= theta <= 2.0:
            raise ValueError("OpConvex requires theta in [1, 2]")
        if not 0.0 < s < 1.0:
            raise ValueError("OpConvex requires s in (0, 1)")
        params.update({"theta": theta, "s": s})
        msum = SymMatrix.from_array(ma.entries + mb.entries)
        gap = (
            ma.power(theta) / s ** (theta - 1.0)
            + mb.power(theta) / (1.0 - s) ** (theta - 1.0)
            - msum.power(theta)
        )
        vals, _ = jacobi_eigh(gap)
        min_eig = float(np.min(vals))
        return _finalize(
            "trace_op_convex", params, min_eig, {"lower_bound": 0.0}, None,
            extra={"min_eigenvalue": min_eig},
        )

    raise TypeError(f"unknown trace inequality kind {kind!r}")  # pragma: no cover


# ---------------------------------------------------------------------------
# PSD-subadditivity counterexample
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class PsdCounterexample:
    a: np.ndarray
    b: np.ndarray
    w: np.ndarray
    quadratic_form: float
    min_eigenvalue: float


def _frac_matmul(x: list[list[Fraction]], y: list[list[Fraction]]) -> list[list[Fraction]]:
    return [
        [sum(x[i][t] * y[t][j] for t in range(2)) for j in range(2)]
        for i in range(2)
    ]


def _frac_matpow(x: list[list[Fraction]], q: int) -> list[list[Fraction]]:
    out = [[Fraction(1), Fraction(0)], [Fraction(0), Fraction(1)]]
    for _ in range(q):
        out = _frac_matmul(out, x)
    return out


def psd_counterexample(s: float, q: float, big_k: float) -> PsdCounterexample:
    """The 2x2 family showing K(A^q + B^q) - (A+B)^q is not PSD in general.

    A = diag(s^2, 0), B = [[1, s], [s, s^2]], w = (-s, 1).  Returns the
    quadratic form <(K(A^q+B^q) - (A+B)^q) w, w> and the minimum eigenvalue.
    Integer q is evaluated in exact rational arithmetic (the form is a tiny
    cancellation of O(1) entries); fractional q uses float spectral calculus.
    """
    if s <= 0 or q <= 0:
        raise ValueError("require s > 0 and q > 0")
    a = np.array([[s * s, 0.0], [0.0, 0.0]])
    b = np.array([[1.0, s], [s, s * s]])
    w = np.array([-s, 1.0])
    if float(q) == int(q):
        sf = Fraction(s)
        kf = Fraction(big_k)
        qa = [[sf * sf, Fraction(0)], [Fraction(0), Fraction(0)]]
        qb = [[Fraction(1), sf], [sf, sf * sf]]
        qs = [[qa[i][j] + qb[i][j] for j in range(2)] for i in range(2)]
        pa = _frac_matpow(qa, int(q))
        pb = _frac_matpow(qb, int(q))
        ps = _frac_matpow(qs, int(q))
        gap = [[kf * (pa[i][j] + pb[i][j]) - ps[i][j] for j in range(2)] for i in range(2)]
        wf = [-sf, Fraction(1)]
        form_exact = sum(
            wf[i] * gap[i][j] * wf[j] for i in range(2) for j in range(2)
        )
        form = float(form_exact)
        gap_f = np.array([[float(gap[i][j]) for j in range(2)] for i in range(2)])
    else:
        pa = _as_sym(a).power(q)
        pb = _as_sym(b).power(q)
        ps = _as_sym(a + b).power(q)
        gap_f = big_k * (pa + pb) - ps
        form = float(w @ gap_f @ w)
    vals, _ = jacobi_eigh(gap_f)
    return PsdCounterexample(a, b, w, form, float(np.min(vals)))


# ---------------------------------------------------------------------------
# random matrices
# ---------------------------------------------------------------------------


def random_psd(
    d: int,
    seed: int,
    purpose: str = "psd",
    profile: Sequence[float] | None = None,
) -> SymMatrix:
    """A = G G^T / d with standard normal G; optionally spectrum-shaped."""
    gen = stream(seed, purpose)
    g = gen.normal(size=(d, d))
    a = g @ g.T / d
    if profile is not None:
        profile = np.asarray(profile, dtype=float)
        if profile.shape != (d,) or np.any(profile < 0):
            raise ValueError("profile must be d nonnegative eigenvalues")
        _, vecs = jacobi_eigh(a)
        a = (vecs * profile) @ vecs.T
    return SymMatrix.from_array(a)


# ---------------------------------------------------------------------------
# noncommutative X_p reports
# ---------------------------------------------------------------------------


def _schatten_power(p: float, symmetric: bool):
    """Batched ||.||_{S_p}^p for stacks of matrices."""

    def fn(batch: np.ndarray) -> np.ndarray:
        if batch.ndim == 2:  # d == 1 flattened vectors
            return np.sum(np.abs(batch) ** p, axis=-1)
        out = np.empty(batch.shape[0])
        for i in range(batch.shape[0]):
            m = batch[i]
            if symmetric:
                vals, _ = jacobi_eigh(m)
                out[i] = float(np.sum(np.abs(vals) ** p))
            else:
                vals, _ = jacobi_eigh(m.T @ m)
                out[i] = float(np.sum(np.clip(vals, 0.0, None) ** (p / 2.0)))
        return out

    return fn


def _matrix_stack(mats: Sequence["SymMatrix | np.ndarray"]) -> list[np.ndarray]:
    arrs = [m.entries if isinstance(m, SymMatrix) else np.asarray(m, dtype=float) for m in mats]
    d = arrs[0].shape
    if any(m.shape != d for m in arrs):
        raise ValueError("all matrices must have equal shape")
    return arrs


def schatten_xp_report(
    mats: Sequence["SymMatrix | np.ndarray"],
    k: int,
    p: float,
    plan: SamplePlan,
) -> InequalityReport:
    """The coefficient inequality with absolute values replaced by S_p norms.

    For d = 1 this reduces bit-for-bit to linear_xp_report on the same plan:
    both go through the shared signed_power_mean with the same sign stream.
    """
    arrs = _matrix_stack(mats)
    n = len(arrs)
    if not 1 <= k <= n:
        raise ValueError(f"k={k} out of range for n={n}")
    if p < 2:
        raise ValueError("p must be >= 2")
    d = arrs[0].shape[0]
    symmetric = all(np.array_equal(m, m.T) for m in arrs)
    if d == 1:
        items = [m.reshape(1) for m in arrs]
        power = _schatten_power(p, True)
    else:
        items = arrs
        power = _schatten_power(p, symmetric)
    lhs = subset_average(
        lambda S: signed_power_mean(items, S, power, plan), n, k, plan
    )
    if d == 1:
        # same float operations as the scalar report, for exact agreement
        ell = (k / n) * math.fsum(
            float(np.sum(np.abs(m.reshape(1)) ** p)) for m in arrs
        )
    else:
        ell = (k / n) * math.fsum(schatten_norm(m, p) ** p for m in arrs)
    rad = (k / n) ** (p / 2) * signed_power_mean(
        items, tuple(range(1, n + 1)), power, plan
    )
    return _finalize(
        "schatten_xp",
        {"p": p, "n": n, "k": k, "d": d},
        lhs,
        {"ell_p": ell, "rademacher": rad},
        plan,
    )


def psd_xp_report(
    mats: Sequence["SymMatrix | np.ndarray"],
    k: int,
    q: float,
    plan: SamplePlan | None = None,
) -> InequalityReport:
    """Subset-averaged tr((sum_{j in S} B_j)^q) vs the max of two terms.

    rhs = max{(k/n) sum_j tr B_j^q, (k/n)^q tr((sum_j B_j)^q)} for PSD B_j.
    """
    syms = [_as_sym(m) for m in mats]
    if any(not m.psd for m in syms):
        raise ValueError("psd_xp_report requires PSD inputs")
    n = len(syms)
    if not 1 <= k <= n:
        raise ValueError(f"k={k} out of range for n={n}")
    if q < 1:
        raise ValueError("q must be >= 1")
    if plan is None:
        plan = SamplePlan("exhaustive", max(math.comb(n, k), 1), 0)

    def subset_trace(S: tuple[int, ...]) -> float:
        total = sum(syms[j - 1].entries for j in S)
        return trace_power(SymMatrix.from_array(total), q)

    lhs = subset_average(subset_trace, n, k, plan)
    t1 = (k / n) * math.fsum(trace_power(m, q) for m in syms)
    full = SymMatrix.from_array(sum(m.entries for m in syms))
    t2 = (k / n) ** q * trace_power(full, q)
    rhs = max(t1, t2)
    return _finalize(
        "psd_xp",
        {"q": q, "n": n, "k": k, "d": syms[0].order},
        lhs,
        {"max_term": rhs},
        plan,
        extra={"sum_term": t1, "full_term": t2},
    )


def khinchine_report(
    mats: Sequence["SymMatrix | np.ndarray"],
    p: float,
    plan: SamplePlan,
) -> InequalityReport:
    """Sign-averaged Schatten moments vs row/column square functions.

    lhs = E ||sum_j eps_j A_j||_{S_p}^p;
    rhs = tr((sum A_j^T A_j)^{p/2}) + tr((sum A_j A_j^T)^{p/2}).
    extra reports both direction ratios.
    """
    arrs = _matrix_stack(mats)
    n = len(arrs)
    if p < 2:
        raise ValueError("p must be >= 2")
    power = _schatten_power(p, all(np.array_equal(m, m.T) for m in arrs))
    lhs = signed_power_mean(arrs, tuple(range(1, n + 1)), power, plan)
    col = SymMatrix.from_array(sum(m.T @ m for m in arrs))
    row = SymMatrix.from_array(sum(m @ m.T for m in arrs))
    rhs = trace_power(col, p / 2.0) + trace_power(row, p / 2.0)
    report = _finalize(
        "khinchine",
        {"p": p, "n": n, "d": arrs[0].shape[0]},
        lhs,
        {"square_functions": rhs},
        plan,
    )
    if rhs > 0 and lhs > 0:
        report.extra["upper_ratio"] = lhs / rhs
        report.extra["easy_direction_ratio"] = rhs / lhs
    return report
