"""Finitely supported Dirichlet series with matrix coefficients.

A series is a finite sparse map n -> a_n from integer frequencies n >= 1 to
square complex matrices, thought of as the function z -> sum a_n n^(-z) on a
right half plane.  Because the support is finite every half-plane norm

    norm_s(gamma) = sum_n compatible_norm(a_n) * n^(-s)

is a finite sum and all operations here are exact up to rounding: the
convolution bracket keeps its full support (products of finite supports are
finite), evaluation is a plain partial sum, and the BCH product reuses the
order-by-order bracket plan from `lbcalc.bch`.

Coefficients are stored as a frequency-sorted int64 vector plus a stacked
(support, dim, dim) array; rows that are exactly zero are dropped, which
keeps identities like antisymmetry of the bracket exact rather than
approximate.
"""

from __future__ import annotations

import math
from typing import NamedTuple

import numpy as np

from . import words as _words
from .errors import DomainError, ValidationError
from .matrices import (
    BCH_DOMAIN_RADIUS,
    as_matrix,
    compatible_norm,
    mat_exp,
    matrix_from_json,
    matrix_to_json,
)

LEADING_PROBE_MIN = 2.0


def _canonical(freqs: np.ndarray, mats: np.ndarray, dim: int):
    """Sort by frequency, merge duplicates, drop exact-zero coefficients."""
    if freqs.size == 0:
        return np.zeros(0, dtype=np.int64), np.zeros((0, dim, dim), dtype=np.complex128)
    uniq, inverse = np.unique(freqs, return_inverse=True)
    flat = mats.reshape(freqs.size, dim * dim)
    merged = np.empty((uniq.size, dim * dim), dtype=np.complex128)
    for c in range(dim * dim):
        col = flat[:, c]
        merged[:, c] = np.bincount(
            inverse, weights=col.real, minlength=uniq.size
        ) + 1j * np.bincount(inverse, weights=col.imag, minlength=uniq.size)
    merged = merged.reshape(uniq.size, dim, dim)
    keep = np.any(merged != 0, axis=(1, 2))
    return uniq[keep], merged[keep]


class DirichletSeries:
    """Immutable finitely supported Dirichlet series.

    `freqs` is strictly increasing, `mats[k]` is the coefficient of
    freqs[k]^(-z).  Construction canonicalizes: duplicates merge, zero rows
    drop.
    """

    __slots__ = ("dim", "freqs", "mats")

    def __init__(self, freqs, mats, dim: int | None = None):
        f = np.asarray(freqs, dtype=np.int64).reshape(-1)
        m = np.asarray(mats, dtype=np.complex128)
        if f.size == 0:
            if dim is None:
                raise ValidationError("an empty series needs an explicit dimension")
            m = np.zeros((0, dim, dim), dtype=np.complex128)
        if m.ndim != 3 or m.shape[0] != f.size or m.shape[1] != m.shape[2]:
            raise ValidationError(
                f"coefficient stack has shape {m.shape}, expected ({f.size}, d, d)"
            )
        d = m.shape[1] if dim is None else dim
        if d < 1:
            raise ValidationError("coefficient dimension must be at least 1")
        if m.shape[1] != d:
            raise ValidationError(f"coefficients are {m.shape[1]}x{m.shape[1]}, expected {d}x{d}")
        if f.size and f.min() < 1:
            raise ValidationError(f"frequencies must be >= 1, got {int(f.min())}")
        if not np.all(np.isfinite(m.view(np.float64))):
            raise ValidationError("coefficients must be finite")
        self.dim = d
        self.freqs, self.mats = _canonical(f, m, d)

    @classmethod
    def from_terms(cls, terms: dict, dim: int | None = None) -> "DirichletSeries":
        """Build from a {frequency: matrix} mapping."""
        items = sorted(terms.items())
        if not items and dim is None:
            raise ValidationError("an empty series needs an explicit dimension")
        mats = []
        freqs = []
        for n, a in items:
            if not isinstance(n, int) or isinstance(n, bool) or n < 1:
                raise ValidationError(f"frequency must be a positive integer, got {n!r}")
            arr = as_matrix(a, dim=dim)
            if dim is None:
                dim = arr.shape[0]
            freqs.append(n)
            mats.append(arr)
        stack = (
            np.stack(mats) if mats else np.zeros((0, dim, dim), dtype=np.complex128)
        )
        return cls(np.array(freqs, dtype=np.int64), stack, dim=dim)

    def terms(self) -> dict:
        return {int(n): self.mats[k].copy() for k, n in enumerate(self.freqs)}

    @property
    def support(self) -> int:
        return int(self.freqs.size)

    def __add__(self, other: "DirichletSeries") -> "DirichletSeries":
        if not isinstance(other, DirichletSeries):
            return NotImplemented
        if other.dim != self.dim:
            raise ValidationError(f"dimension mismatch: {self.dim} vs {other.dim}")
        return DirichletSeries(
            np.concatenate([self.freqs, other.freqs]),
            np.concatenate([self.mats, other.mats]),
            dim=self.dim,
        )

    def __sub__(self, other: "DirichletSeries") -> "DirichletSeries":
        return self + (-1.0) * other

    def __mul__(self, scalar) -> "DirichletSeries":
        return DirichletSeries(self.freqs, complex(scalar) * self.mats, dim=self.dim)

    __rmul__ = __mul__

    def __neg__(self) -> "DirichletSeries":
        return (-1.0) * self


def zero_series(dim: int) -> DirichletSeries:
    return DirichletSeries(np.zeros(0, dtype=np.int64), None, dim=dim)


def embed(a) -> DirichletSeries:
    """Constant series a * 1^(-z); isometric for every half-plane norm."""
    arr = as_matrix(a)
    return DirichletSeries(np.array([1], dtype=np.int64), arr[None, :, :])


def norm_s(gamma: DirichletSeries, s: float) -> float:
    """Half-plane norm sum_n compatible_norm(a_n) n^(-s)."""
    s = float(s)
    if not math.isfinite(s):
        raise ValidationError(f"half-plane parameter must be finite, got {s!r}")
    total = 0.0
    for k, n in enumerate(gamma.freqs):
        total += compatible_norm(gamma.mats[k]) * float(n) ** (-s)
    return total


def bracket(g1: DirichletSeries, g2: DirichletSeries) -> DirichletSeries:
    """Convolution Lie bracket: coefficient at N is sum over n1*n2 = N of [a, b].

    Support is kept exactly; nothing is truncated.
    """
    if g1.dim != g2.dim:
        raise ValidationError(f"dimension mismatch: {g1.dim} vs {g2.dim}")
    d = g1.dim
    if g1.support == 0 or g2.support == 0:
        return zero_series(d)
    prod_freqs = (g1.freqs[:, None] * g2.freqs[None, :]).reshape(-1)
    ab = np.einsum("iab,jbc->ijac", g1.mats, g2.mats)
    ba = np.einsum("jab,ibc->ijac", g2.mats, g1.mats)
    comms = (ab - ba).reshape(-1, d, d)
    return DirichletSeries(prod_freqs, comms, dim=d)


def evaluate(gamma: DirichletSeries, z: complex) -> np.ndarray:
    """Partial sum sum a_n exp(-z ln n) with the real logarithm of n."""
    z = complex(z)
    d = gamma.dim
    if gamma.support == 0:
        return np.zeros((d, d), dtype=np.complex128)
    weights = np.exp(-z * np.log(gamma.freqs.astype(np.float64)))
    return np.einsum("p,pab->ab", weights, gamma.mats)


def _raw_bracket(f1, m1, f2, m2, dim):
    """Bracket on bare (freqs, mats) pairs, canonicalized, no validation."""
    if f1.size == 0 or f2.size == 0:
        return np.zeros(0, dtype=np.int64), np.zeros((0, dim, dim), dtype=np.complex128)
    prod = (f1[:, None] * f2[None, :]).reshape(-1)
    ab = np.einsum("iab,jbc->ijac", m1, m2)
    ba = np.einsum("jab,ibc->ijac", m2, m1)
    return _canonical(prod, (ab - ba).reshape(-1, dim, dim), dim)


_LATTICE_CAP = 600


def _product_lattice(base, order: int, cap: int):
    """Frequencies reachable as products of at most `order` support members.

    Breadth-first closure in exact integer arithmetic; None when the closure
    exceeds `cap` (the caller then walks sparsely instead).
    """
    seen = set(base)
    frontier = set(base)
    for _ in range(order - 1):
        if len(seen) > cap:
            return None
        frontier = {s * f for s in frontier for f in base} - seen
        if not frontier:
            break
        seen |= frontier
    if len(seen) > cap:
        return None
    return sorted(seen)


def _dense_scatter(lattice_pos, leaf_freqs):
    """Static gather/scatter for bracketing a lattice vector with one leaf.

    Returns (parent rows, leaf rows, reduceat starts, output rows); pairs
    whose product leaves the lattice carry only zero values and are dropped.
    """
    pairs = []
    for s, i in sorted(lattice_pos.items()):
        for j, f in enumerate(leaf_freqs):
            o = lattice_pos.get(s * int(f))
            if o is not None:
                pairs.append((o, i, j))
    pairs.sort()
    out = np.array([p[0] for p in pairs], dtype=np.intp)
    par = np.array([p[1] for p in pairs], dtype=np.intp)
    leaf = np.array([p[2] for p in pairs], dtype=np.intp)
    starts = np.flatnonzero(np.r_[True, out[1:] != out[:-1]]) if out.size else np.zeros(0, np.intp)
    return par, leaf, starts, out[starts] if out.size else out


def _walk_plan_dense(g1, g2, order, lattice):
    d = g1.dim
    size = len(lattice)
    pos = {n: i for i, n in enumerate(lattice)}
    leaves = []
    tables = []
    for g in (g1, g2):
        dense_rows = np.array([pos[int(n)] for n in g.freqs], dtype=np.intp)
        leaves.append((dense_rows, g.mats))
        tables.append(_dense_scatter(pos, [int(n) for n in g.freqs]))
    plan = _words.evaluation_plan(order)
    last_use = {}
    for k, (parent, _, _) in enumerate(plan):
        if parent is not None:
            last_use[parent] = k
    values: list = [None] * len(plan)
    acc = np.zeros((size, d, d), dtype=np.complex128)
    for k, (parent, letter, weight) in enumerate(plan):
        rows, mats = leaves[letter]
        if parent is None:
            v = np.zeros((size, d, d), dtype=np.complex128)
            v[rows] = mats
        else:
            par_idx, leaf_idx, starts, out_rows = tables[letter]
            p = values[parent]
            v = np.zeros((size, d, d), dtype=np.complex128)
            if starts.size:
                a = p[par_idx]
                b = mats[leaf_idx]
                comm = a @ b - b @ a
                v[out_rows] = np.add.reduceat(comm, starts, axis=0)
            if last_use.get(parent) == k:
                values[parent] = None
        values[k] = v
        if weight:
            acc += weight * v
    keep = np.any(acc != 0, axis=(1, 2))
    return DirichletSeries(
        np.array(lattice, dtype=np.int64)[keep], acc[keep], dim=d
    )


def _walk_plan_sparse(g1, g2, order):
    d = g1.dim
    leaves = ((g1.freqs, g1.mats), (g2.freqs, g2.mats))
    values = []
    acc_f, acc_m = [], []
    for parent, letter, weight in _words.evaluation_plan(order):
        lf, lm = leaves[letter]
        if parent is None:
            v = (lf, lm)
        else:
            pf, pm = values[parent]
            v = _raw_bracket(pf, pm, lf, lm, d)
        values.append(v)
        if weight and v[0].size:
            acc_f.append(v[0])
            acc_m.append(weight * v[1])
    if not acc_f:
        return zero_series(d)
    return DirichletSeries(np.concatenate(acc_f), np.concatenate(acc_m), dim=d)


def bch_series(
    g1: DirichletSeries, g2: DirichletSeries, s: float, order: int
) -> DirichletSeries:
    """BCH product in the series algebra, truncated at bracket-degree `order`.

    Gated by norm_s(g1) + norm_s(g2) < log(3/2), the radius within which the
    series converges for any norm with a submultiplicative bracket.  Support
    is exact: frequency products are never truncated.  When the product
    closure of the supports is small the plan is walked on a fixed frequency
    lattice with static scatter tables; otherwise sparsely, term by term.
    """
    if g1.dim != g2.dim:
        raise ValidationError(f"dimension mismatch: {g1.dim} vs {g2.dim}")
    total = norm_s(g1, s) + norm_s(g2, s)
    if not total < BCH_DOMAIN_RADIUS:
        raise DomainError(
            f"half-plane norm sum {total} is not below log(3/2) = {BCH_DOMAIN_RADIUS}"
        )
    order = _words.checked_order(order)
    base = sorted({int(n) for n in g1.freqs} | {int(n) for n in g2.freqs})
    if not base:
        return zero_series(g1.dim)
    if max(base) ** order >= 2**62:
        raise DomainError(
            f"frequency products up to {max(base)}^{order} leave the exact "
            "integer range; reduce the support or the order"
        )
    lattice = _product_lattice(base, order, _LATTICE_CAP)
    if lattice is not None:
        return _walk_plan_dense(g1, g2, order, lattice)
    return _walk_plan_sparse(g1, g2, order)


def exp_pointwise(gamma: DirichletSeries, z: complex) -> np.ndarray:
    """exp of the evaluated series: the pointwise image in the matrix group."""
    return mat_exp(evaluate(gamma, z))


class LeadingCoefficient(NamedTuple):
    value: np.ndarray
    tail_bound: float


def leading_coefficient(gamma: DirichletSeries, re_probe: float) -> LeadingCoefficient:
    """Probe of the first coefficient a_1 = limit of gamma(z) as Re z grows.

    Returns evaluate(gamma, re_probe) together with the certified tail bound
    sum over n >= 2 of compatible_norm(a_n) n^(-re_probe); the probe value
    differs from the stored a_1 by at most the tail bound.
    """
    re_probe = float(re_probe)
    if not re_probe >= LEADING_PROBE_MIN:
        raise DomainError(
            f"probe abscissa {re_probe} is below the minimum {LEADING_PROBE_MIN}"
        )
    value = evaluate(gamma, re_probe)
    tail = 0.0
    for k, n in enumerate(gamma.freqs):
        if n >= 2:
            tail += compatible_norm(gamma.mats[k]) * float(n) ** (-re_probe)
    return LeadingCoefficient(value, tail)


def series_to_json(gamma: DirichletSeries) -> dict:
    return {
        "dim": gamma.dim,
        "terms": [
            {"n": int(n), "coeff": matrix_to_json(gamma.mats[k])}
            for k, n in enumerate(gamma.freqs)
        ],
    }


def series_from_json(obj) -> DirichletSeries:
    if not isinstance(obj, dict) or "dim" not in obj or "terms" not in obj:
        raise ValidationError("series JSON must be an object with 'dim' and 'terms'")
    dim = obj["dim"]
    if not isinstance(dim, int) or dim < 1:
        raise ValidationError(f"series dimension must be a positive integer, got {dim!r}")
    terms = {}
    last = 0
    for entry in obj["terms"]:
        if not isinstance(entry, dict) or "n" not in entry or "coeff" not in entry:
            raise ValidationError("each term needs 'n' and 'coeff'")
        n = entry["n"]
        if not isinstance(n, int) or n < 1:
            raise ValidationError(f"frequency must be a positive integer, got {n!r}")
        if n <= last:
            raise ValidationError("terms must be sorted by strictly increasing frequency")
        last = n
        terms[n] = matrix_from_json(entry["coeff"], dim=dim)
    return DirichletSeries.from_terms(terms, dim=dim)
