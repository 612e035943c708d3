"""Seeded random generators for matrices, Dirichlet series and germs.

Everything takes an explicit numpy Generator; `generator(seed)` and
`spawn(seed, n)` build them from a single 64-bit seed so runs are exactly
reproducible.  The element builders accept a target norm and rescale the raw
draw, which hits the target up to a few ulp; callers that need a strict
upper bound shave the target first (see `lbcalc.limits`).
"""

from __future__ import annotations

import numpy as np

from .dirichlet import DirichletSeries, norm_s
from .errors import ValidationError
from .germs import AnchorSet, Germ, d_norm, sup_norm
from .matrices import compatible_norm
from .series import space


def generator(seed: int) -> np.random.Generator:
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence(seed)))


def spawn(seed: int, n: int) -> list:
    """n independent generators derived from one seed."""
    return [np.random.Generator(np.random.PCG64(s)) for s in np.random.SeedSequence(seed).spawn(n)]


def _complex_normal(rng: np.random.Generator, shape) -> np.ndarray:
    return rng.standard_normal(shape) + 1j * rng.standard_normal(shape)


def random_matrix(rng: np.random.Generator, dim: int, target: float | None = None) -> np.ndarray:
    """Random complex matrix, optionally rescaled to a compatible_norm target."""
    m = _complex_normal(rng, (dim, dim))
    if target is not None:
        current = compatible_norm(m)
        if current == 0.0:
            raise ValidationError("cannot rescale a zero draw to a norm target")
        m = (target / current) * m
    return m


def random_series(
    rng: np.random.Generator,
    dim: int,
    freq_pool,
    terms: int,
    s: float = 0.0,
    target: float | None = None,
) -> DirichletSeries:
    """Sparse random series with `terms` distinct frequencies from the pool."""
    pool = np.asarray(sorted(set(int(n) for n in freq_pool)), dtype=np.int64)
    if terms > pool.size:
        raise ValidationError(f"cannot draw {terms} distinct frequencies from {pool.size}")
    freqs = np.sort(rng.choice(pool, size=terms, replace=False))
    mats = _complex_normal(rng, (terms, dim, dim))
    out = DirichletSeries(freqs, mats, dim=dim)
    if target is not None:
        current = norm_s(out, s)
        if current == 0.0:
            raise ValidationError("cannot rescale a zero draw to a norm target")
        out = (target / current) * out
    return out


def random_germ(
    rng: np.random.Generator,
    anchors: AnchorSet,
    index: int,
    degree: int = 8,
    terms: int = 12,
    d_target: float | None = None,
    sup_target: float | None = None,
) -> Germ:
    """Random sparse germ, optionally rescaled to a d_norm or sup_norm target."""
    if d_target is not None and sup_target is not None:
        raise ValidationError("give at most one of d_target and sup_target")
    sp = space(anchors.dim, degree)
    valid = np.flatnonzero(sp.totals >= 1)
    take = min(terms, valid.size)
    blocks = []
    for _ in range(len(anchors)):
        cols = sp.zeros(anchors.dim)
        slots = rng.choice(valid, size=take, replace=False)
        cols[:, slots] = _complex_normal(rng, (anchors.dim, take))
        blocks.append(cols)
    g = Germ(anchors, index, blocks, degree)
    if d_target is not None:
        current = d_norm(g)
        if current == 0.0:
            raise ValidationError("cannot rescale a zero draw to a norm target")
        g = (d_target / current) * g
    elif sup_target is not None:
        current = sup_norm(g)
        if current == 0.0:
            raise ValidationError("cannot rescale a zero draw to a norm target")
        g = (sup_target / current) * g
    return g
