"""Averaging and smoothing operators on the torus and the hypercube.

Box averages over parity-patterned boxes, edge averages and their products,
the two-sided smoothing operator ``Tj``, torus characters, the hypercube
Rademacher projection, and the residual of the projection identity relating
``Rad`` of a local difference function to the ``Tj`` family.

All supports here are product sets, so every box/edge average factors into a
composition of one-dimensional averages along axes; averages are computed by
direct summation (no FFT), which is exact and fast at desk scale.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, replace
from typing import Sequence

import numpy as np

from .lattice import GridFunction, LatticePoint, _check_subset

__all__ = [
    "DS",
    "BoxA",
    "Bj",
    "DeltaT",
    "Ej",
    "CalEj",
    "CalE",
    "Tj",
    "HypercubeFunction",
    "box_average",
    "edge_average",
    "rademacher_projection",
    "character",
    "rad_identity_residual",
    "rad_identity_residual_grid",
]


# ---------------------------------------------------------------------------
# kinds
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class DS:
    """Average over the box of y in [-R, R]^n with y_i even for i in S and
    y_j odd for j outside S (1-based S)."""

    S: tuple[int, ...]
    R: int

    def __post_init__(self) -> None:
        object.__setattr__(self, "S", tuple(int(j) for j in self.S))


@dataclass(frozen=True)
class BoxA:
    """Average over (-R, R)^n intersected with the even lattice (2Z)^n."""

    R: int


@dataclass(frozen=True)
class Bj:
    """Shorthand for DS with the singleton set {j}."""

    j: int
    R: int


@dataclass(frozen=True)
class DeltaT:
    """Average over even vectors of (-R, R)^n supported on T (1-based)."""

    T: tuple[int, ...]
    R: int

    def __post_init__(self) -> None:
        object.__setattr__(self, "T", tuple(int(j) for j in self.T))


@dataclass(frozen=True)
class Ej:
    """Two-point edge average (f(x+e_j) + f(x-e_j)) / 2."""

    j: int


@dataclass(frozen=True)
class CalEj:
    """Product of all edge averages except the j-th."""

    j: int


@dataclass(frozen=True)
class CalE:
    """Product of all n edge averages."""


@dataclass(frozen=True)
class Tj:
    """Average of f(x + 2*eps restricted off coordinate j) over eps."""

    j: int


# ---------------------------------------------------------------------------
# box averages
# ---------------------------------------------------------------------------


def _axis_average(values: np.ndarray, axis: int, offsets: Sequence[int]) -> np.ndarray:
    """Average of translates of a table along one axis (direct summation)."""
    acc = np.zeros_like(values)
    for off in offsets:
        acc = acc + np.roll(values, shift=-off, axis=axis)
    return acc / len(offsets)


def _even_offsets(R: int, closed: bool) -> list[int]:
    """Even integers of [-R, R] (closed) or (-R, R) (open); R odd in use."""
    top = R if closed else R - 1
    return [y for y in range(-top, top + 1) if y % 2 == 0]


def _odd_offsets(R: int) -> list[int]:
    return [y for y in range(-R, R + 1) if y % 2 != 0]


def _check_box(f: GridFunction, R: int) -> None:
    if f.modulus % 4 != 0:
        raise ValueError("box averages require modulus divisible by 4")
    if R % 2 == 0 or R < 1:
        raise ValueError("R must be a positive odd integer")
    if R > f.modulus // 2:
        raise ValueError(f"R={R} too large for modulus {f.modulus}")


def box_average(f: GridFunction, kind: DS | BoxA | Bj | DeltaT) -> GridFunction:
    """Apply a box averaging operator; output is again a GridFunction."""
    n = f.dimension
    if isinstance(kind, Bj):
        kind = DS((kind.j,), kind.R)
    if isinstance(kind, BoxA):
        kind = DeltaT(tuple(range(1, n + 1)), kind.R)
    _check_box(f, kind.R)
    values = f.values
    if isinstance(kind, DS):
        S = set(_check_subset(kind.S, n))
        for axis in range(n):
            offsets = (
                _even_offsets(kind.R, closed=True)
                if (axis + 1) in S
                else _odd_offsets(kind.R)
            )
            values = _axis_average(values, axis, offsets)
    elif isinstance(kind, DeltaT):
        T = set(_check_subset(kind.T, n))
        for axis in range(n):
            offsets = _even_offsets(kind.R, closed=False) if (axis + 1) in T else [0]
            values = _axis_average(values, axis, offsets)
    else:  # pragma: no cover
        raise TypeError(f"unknown box kind {kind!r}")
    return f.with_values(values)


# ---------------------------------------------------------------------------
# edge averages
# ---------------------------------------------------------------------------


def edge_average(f: GridFunction, kind: Ej | CalEj | CalE | Tj) -> GridFunction:
    """Apply an edge averaging / smoothing operator."""
    n = f.dimension
    values = f.values
    if isinstance(kind, Ej):
        axes = [kind.j - 1]
        offsets = [-1, 1]
    elif isinstance(kind, CalEj):
        axes = [a for a in range(n) if a != kind.j - 1]
        offsets = [-1, 1]
    elif isinstance(kind, CalE):
        axes = list(range(n))
        offsets = [-1, 1]
    elif isinstance(kind, Tj):
        axes = [a for a in range(n) if a != kind.j - 1]
        offsets = [-2, 2]
    else:  # pragma: no cover
        raise TypeError(f"unknown edge kind {kind!r}")
    if isinstance(kind, (Ej, CalEj, Tj)) and not 1 <= kind.j <= n:
        raise ValueError(f"index {kind.j} not in 1..{n}")
    for axis in axes:
        values = _axis_average(values, axis, offsets)
    return f.with_values(values)


# ---------------------------------------------------------------------------
# hypercube functions and the Rademacher projection
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class HypercubeFunction:
    """A total table h: {-1,1}^n -> R^d; index b in {0,1} encodes 2b - 1."""

    dimension: int
    value_dim: int
    values: np.ndarray

    def __post_init__(self) -> None:
        expected = (2,) * self.dimension + (self.value_dim,)
        vals = np.asarray(self.values, dtype=float)
        if vals.shape != expected:
            raise ValueError(f"values shape {vals.shape} != {expected}")
        vals = vals.copy()
        vals.setflags(write=False)
        object.__setattr__(self, "values", vals)

    def __call__(self, eps: Sequence[int]) -> np.ndarray:
        idx = tuple((int(e) + 1) // 2 for e in eps)
        return self.values[idx]

    def flip(self, j: int) -> "HypercubeFunction":
        """h composed with the j-th coordinate sign flip (1-based)."""
        return replace(self, values=np.flip(self.values, axis=j - 1))

    def antipode(self) -> "HypercubeFunction":
        """h composed with the global sign flip."""
        return replace(
            self, values=np.flip(self.values, axis=tuple(range(self.dimension)))
        )


def rademacher_projection(h: HypercubeFunction) -> HypercubeFunction:
    """Degree-1 Walsh projection: Rad(h)(eps) = sum_j c_j eps_j with
    c_j = 2^{-n} sum_delta h(delta) delta_j."""
    n = h.dimension
    signs_axis = np.array([-1.0, 1.0])
    out = np.zeros_like(h.values)
    for j in range(n):
        shape = [1] * (n + 1)
        shape[j] = 2
        sj = signs_axis.reshape(shape)
        cj = np.sum(h.values * sj, axis=tuple(range(n)), keepdims=True) / 2**n
        out = out + cj * sj
    return replace(h, values=np.broadcast_to(out, h.values.shape).copy())


# ---------------------------------------------------------------------------
# characters
# ---------------------------------------------------------------------------


def character(y: LatticePoint) -> GridFunction:
    """The character W_y(x) = exp(i pi <x, y> / (4m)) on Z_{8m}^n, stored as
    a d=2 real table (real part, imaginary part) with the l_2 value norm."""
    M = y.modulus
    if M % 8 != 0:
        raise ValueError("characters require modulus divisible by 8")
    m = M // 8
    n = y.dimension
    grids = np.meshgrid(*[np.arange(M)] * n, indexing="ij") if n else []
    phase = np.zeros((M,) * n)
    for axis in range(n):
        phase = phase + grids[axis] * y.coords[axis]
    phase = math.pi * phase / (4.0 * m)
    table = np.stack([np.cos(phase), np.sin(phase)], axis=-1)
    return GridFunction(M, n, 2, 2.0, table)


# ---------------------------------------------------------------------------
# projection identity residual
# ---------------------------------------------------------------------------


def rad_identity_residual(f: GridFunction, x: Sequence[int]) -> float:
    """Residual of the projection identity at a base point x.

    Builds h^x(eps) = f(x + 2 eps) - f(x) on the hypercube and returns the
    maximum over eps of the Euclidean norm of

        Rad(h^x)(eps) - (1/2) sum_j eps_j [T_j f(x + 2 e_j) - T_j f(x - 2 e_j)].

    This is the real-valued form of the identity (components of vector- or
    complex-as-d=2-valued f are handled coordinatewise).
    """
    if f.modulus % 8 != 0:
        raise ValueError("identity requires modulus divisible by 8")
    n, d = f.dimension, f.value_dim
    x = tuple(int(c) for c in x)
    fx = f(x)
    table = np.empty((2,) * n + (d,))
    for eps in itertools.product((-1, 1), repeat=n):
        idx = tuple((e + 1) // 2 for e in eps)
        table[idx] = f(tuple(c + 2 * e for c, e in zip(x, eps))) - fx
    h = HypercubeFunction(n, d, table)
    rad = rademacher_projection(h)

    diffs = []
    for j in range(1, n + 1):
        tjf = edge_average(f, Tj(j))
        xp = tuple(c + 2 * (1 if a == j - 1 else 0) for a, c in enumerate(x))
        xm = tuple(c - 2 * (1 if a == j - 1 else 0) for a, c in enumerate(x))
        diffs.append(tjf(xp) - tjf(xm))

    worst = 0.0
    for eps in itertools.product((-1, 1), repeat=n):
        idx = tuple((e + 1) // 2 for e in eps)
        rhs = 0.5 * sum(e * dval for e, dval in zip(eps, diffs))
        worst = max(worst, float(np.linalg.norm(rad.values[idx] - rhs)))
    return worst


def rad_identity_residual_grid(f: GridFunction) -> float:
    """Maximum of the projection-identity residual over all base points.

    Equals ``max_x rad_identity_residual(f, x)`` but computes each term of
    the identity once for the whole grid with axis rolls, so the exhaustive
    sweep costs O(n 2^n M^n) instead of per-point operator rebuilds.
    """
    if f.modulus % 8 != 0:
        raise ValueError("identity requires modulus divisible by 8")
    n = f.dimension
    axes = tuple(range(n))
    # first-order coefficients of h^x: c_j(x) = 2^{-n} sum_eps eps_j f(x+2eps)
    coeff = [np.zeros_like(f.values) for _ in range(n)]
    for eps in itertools.product((-1, 1), repeat=n):
        shifted = np.roll(f.values, tuple(-2 * e for e in eps), axis=axes)
        for j in range(n):
            coeff[j] += eps[j] * shifted
    coeff = [c / 2**n for c in coeff]
    # matching difference of the smoothed function along each axis
    diffs = []
    for j in range(1, n + 1):
        tjf = edge_average(f, Tj(j)).values
        diffs.append(
            0.5 * (np.roll(tjf, -2, axis=j - 1) - np.roll(tjf, 2, axis=j - 1))
        )
    gap = [c - dlt for c, dlt in zip(coeff, diffs)]
    worst = 0.0
    for eps in itertools.product((-1, 1), repeat=n):
        total = sum(e * g for e, g in zip(eps, gap))
        norms = np.sqrt(np.sum(total**2, axis=-1))
        worst = max(worst, float(norms.max()))
    return worst
