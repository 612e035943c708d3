"""Anchored truncated series germs with majorant norms.

A germ is a finite family of truncated power series, one per anchor point in
C^d, with vector coefficients in C^d, total degree between 1 and D (so the
germ vanishes at every anchor), attached to a positive integer index n.  The
index fixes the ball radius 1/n used by the two majorant norms:

    sup_norm(g) = max over anchors of  sum_a ||c_a||  (1/n)^|a|
    d_norm(g)   = max over anchors of  sum_a |a| ||c_a|| (1/n)^(|a|-1)

with the max-absolute-component norm on coefficient vectors.  sup_norm
dominates the actual values on the ball and d_norm dominates the derivative's
operator norm there, and every degree-k term contributes (1/n) times more to
d_norm than to sup_norm, so sup_norm <= (1/n) d_norm holds term by term.
That comparison is asserted on every germ constructed anywhere; the counter
`norm_check_stats` records how often.

Composition works on the chart level: germs represent maps g + id, and the
returned germ is (g1 + id) o (g2 + id) - id = g1 o (g2 + id) + g2, truncated
at D.  It is gated by the containment check
(1 + d_norm(g2)) * (n + 2) <= l, which guarantees that the inner map sends
the radius-1/l ball into the radius-1/(n+2) ball where g1 is controlled.
Inversion solves the chart equation degree by degree and certifies both the
vanishing residual and the 1/(6n) bound on the inverse's sup_norm at the
output index 12n.
"""

from __future__ import annotations

import math

import numpy as np

from .errors import DomainError, InternalCheckError, ValidationError
from .series import space

DEFAULT_DEGREE = 8
INVERSION_D_BOUND = 0.5
INVERSION_INDEX_FACTOR = 12
INVERSION_SUP_FACTOR = 6

_NORM_SLACK = 1e-12          # rounding headroom for the constructor assertion
_RESIDUAL_TOL = 1e-10        # certified defect ceiling for inversion

norm_check_stats = {"checked": 0}


class AnchorSet:
    """Finite set of pairwise distinct anchor points in C^d.

    Distances are measured in the max-component norm, matching the vector
    norm used for series coefficients.
    """

    __slots__ = ("points", "dim", "min_distance")

    def __init__(self, points, dim: int | None = None):
        pts = []
        for p in points:
            arr = np.asarray(p, dtype=np.complex128).reshape(-1)
            if arr.size == 0:
                raise ValidationError("anchor points need at least one component")
            if not np.all(np.isfinite(arr.view(np.float64))):
                raise ValidationError("anchor coordinates must be finite")
            pts.append(arr)
        if not pts:
            raise ValidationError("an anchor set needs at least one point")
        d = pts[0].size
        if any(p.size != d for p in pts):
            raise ValidationError("all anchors must share one dimension")
        if dim is not None and d != dim:
            raise ValidationError(f"expected anchors in dimension {dim}, got {d}")
        mind = math.inf
        for i in range(len(pts)):
            for j in range(i + 1, len(pts)):
                dist = float(np.max(np.abs(pts[i] - pts[j])))
                if dist == 0.0:
                    raise ValidationError(f"anchors {i} and {j} coincide")
                mind = min(mind, dist)
        self.points = tuple(pts)
        self.dim = d
        self.min_distance = mind

    @classmethod
    def origin(cls, dim: int) -> "AnchorSet":
        return cls([np.zeros(dim)])

    def __len__(self) -> int:
        return len(self.points)

    def __eq__(self, other) -> bool:
        if not isinstance(other, AnchorSet):
            return NotImplemented
        return len(self) == len(other) and all(
            np.array_equal(a, b) for a, b in zip(self.points, other.points)
        )

    def __hash__(self):
        return hash((self.dim, len(self.points)))


class Germ:
    """Truncated series family over an AnchorSet at a fixed index.

    `coeffs` holds one (dim, (degree+1)**dim) packed array per anchor; see
    `lbcalc.series` for the layout.  Construction canonicalizes dtype, checks
    that the constant term vanishes, that multi-anchor balls of radius
    2/index stay disjoint, and runs the sup/d norm comparison hook.
    """

    __slots__ = ("anchors", "index", "degree", "coeffs")

    def __init__(self, anchors: AnchorSet, index: int, coeffs, degree: int = DEFAULT_DEGREE):
        if not isinstance(anchors, AnchorSet):
            anchors = AnchorSet(anchors)
        if not isinstance(index, int) or isinstance(index, bool) or index < 1:
            raise ValidationError(f"germ index must be a positive integer, got {index!r}")
        sp = space(anchors.dim, degree)
        if len(anchors) > 1 and not (2.0 / index < anchors.min_distance):
            raise DomainError(
                f"anchor balls of radius 1/{index} are not disjoint: "
                f"2/{index} >= minimal distance {anchors.min_distance}"
            )
        arrays = []
        if len(coeffs) != len(anchors):
            raise ValidationError(
                f"got {len(coeffs)} coefficient blocks for {len(anchors)} anchors"
            )
        invalid = sp.totals < 0
        for block in coeffs:
            arr = np.array(block, dtype=np.complex128)
            if arr.shape != (anchors.dim, sp.size):
                raise ValidationError(
                    f"coefficient block has shape {arr.shape}, expected {(anchors.dim, sp.size)}"
                )
            if not np.all(np.isfinite(arr.view(np.float64))):
                raise ValidationError("series coefficients must be finite")
            if np.any(arr[:, 0] != 0):
                raise ValidationError("germs vanish at their anchors; degree-0 term must be zero")
            if np.any(arr[:, invalid] != 0):
                raise ValidationError("coefficients above the truncation degree must be zero")
            arrays.append(arr)
        self.anchors = anchors
        self.index = index
        self.degree = degree
        self.coeffs = tuple(arrays)
        _run_norm_hook(self)

    @classmethod
    def from_terms(cls, anchors, index: int, terms_per_anchor, degree: int = DEFAULT_DEGREE) -> "Germ":
        """Build from one {multi-index: coefficient vector} dict per anchor."""
        if not isinstance(anchors, AnchorSet):
            anchors = AnchorSet(anchors)
        sp = space(anchors.dim, degree)
        blocks = [sp.from_terms(t, anchors.dim) for t in terms_per_anchor]
        return cls(anchors, index, blocks, degree)

    def terms(self, anchor: int = 0) -> dict:
        sp = space(self.anchors.dim, self.degree)
        return sp.to_terms(self.coeffs[anchor])

    @property
    def dim(self) -> int:
        return self.anchors.dim

    # Germs form a vector space over C; sums take the coarser (larger) index,
    # which is the direction in which restriction is trivial.
    def _check_peer(self, other: "Germ"):
        if not isinstance(other, Germ):
            raise ValidationError(f"expected a germ, got {type(other).__name__}")
        if self.anchors != other.anchors:
            raise ValidationError("germs live over different anchor sets")
        if self.degree != other.degree:
            raise ValidationError("germs use different truncation degrees")

    def __add__(self, other: "Germ") -> "Germ":
        self._check_peer(other)
        idx = max(self.index, other.index)
        blocks = [a + b for a, b in zip(self.coeffs, other.coeffs)]
        return Germ(self.anchors, idx, blocks, self.degree)

    def __sub__(self, other: "Germ") -> "Germ":
        self._check_peer(other)
        idx = max(self.index, other.index)
        blocks = [a - b for a, b in zip(self.coeffs, other.coeffs)]
        return Germ(self.anchors, idx, blocks, self.degree)

    def __neg__(self) -> "Germ":
        return Germ(self.anchors, self.index, [-a for a in self.coeffs], self.degree)

    def __mul__(self, scalar) -> "Germ":
        scalar = complex(scalar)
        return Germ(
            self.anchors, self.index, [scalar * a for a in self.coeffs], self.degree
        )

    __rmul__ = __mul__


def zero_germ(anchors, index: int, degree: int = DEFAULT_DEGREE) -> Germ:
    if not isinstance(anchors, AnchorSet):
        anchors = AnchorSet(anchors)
    sp = space(anchors.dim, degree)
    blocks = [sp.zeros(anchors.dim) for _ in range(len(anchors))]
    return Germ(anchors, index, blocks, degree)


def with_index(g: Germ, index: int) -> Germ:
    """Restriction to a finer ball: same coefficients, larger index."""
    if index < g.index:
        raise DomainError(
            f"restriction only goes to larger indices, {index} < {g.index}"
        )
    return Germ(g.anchors, index, g.coeffs, g.degree)


# -- norms ----------------------------------------------------------------


def _anchor_norms(sp, cols: np.ndarray, rho: float) -> tuple:
    """(sup majorant, derivative majorant) of one coefficient block."""
    coeff_norm = np.abs(cols).max(axis=0)
    sup = 0.0
    dval = 0.0
    rho_pow = 1.0  # rho^(k-1)
    for k in range(1, sp.degree + 1):
        if k > 1:
            rho_pow *= rho
        h = float(coeff_norm[sp.by_degree[k]].sum())
        if h:
            t = h * rho_pow
            sup += t * rho
            dval += k * t
    return sup, dval


def norms_at_index(g: Germ, index: int) -> tuple:
    """(sup_norm, d_norm) majorants evaluated with radius 1/index."""
    if not isinstance(index, int) or index < 1:
        raise ValidationError(f"index must be a positive integer, got {index!r}")
    sp = space(g.dim, g.degree)
    rho = 1.0 / index
    sup = 0.0
    dval = 0.0
    for cols in g.coeffs:
        s, d = _anchor_norms(sp, cols, rho)
        sup = max(sup, s)
        dval = max(dval, d)
    return sup, dval


def sup_norm(g: Germ) -> float:
    """Value majorant on the balls of radius 1/index."""
    return norms_at_index(g, g.index)[0]


def d_norm(g: Germ) -> float:
    """Derivative majorant on the balls of radius 1/index."""
    return norms_at_index(g, g.index)[1]


def degree_majorants(g: Germ) -> np.ndarray:
    """Per-degree coefficient sums h_k = max over anchors of sum ||c_a||, |a| = k."""
    sp = space(g.dim, g.degree)
    out = np.zeros(g.degree + 1)
    for cols in g.coeffs:
        coeff_norm = np.abs(cols).max(axis=0)
        for k in range(1, g.degree + 1):
            out[k] = max(out[k], float(coeff_norm[sp.by_degree[k]].sum()))
    return out


def _run_norm_hook(g: Germ):
    sup, dval = norms_at_index(g, g.index)
    rho = 1.0 / g.index
    if sup > rho * dval * (1.0 + _NORM_SLACK):
        raise InternalCheckError(
            f"norm comparison failed: sup {sup} > (1/{g.index}) * d {dval}"
        )
    norm_check_stats["checked"] += 1


# -- composition ----------------------------------------------------------


def composition_codomain_index(n: int, d_bound: float) -> int:
    """Smallest integer index l satisfying the static rule l >= (R+1)(n+2)."""
    if d_bound < 0:
        raise ValidationError("derivative bound must be nonnegative")
    return int(math.ceil((d_bound + 1.0) * (n + 2)))


def _check_frames(*germs: Germ):
    first = germs[0]
    for g in germs[1:]:
        if g.anchors != first.anchors:
            raise ValidationError("germs live over different anchor sets")
        if g.degree != first.degree:
            raise ValidationError("germs use different truncation degrees")


def _containment_gate(outer: Germ, inner: Germ):
    dn = d_norm(inner)
    lhs = (1.0 + dn) * (outer.index + 2)
    if lhs > inner.index:
        raise DomainError(
            "containment check failed: "
            f"(1 + d_norm {dn}) * (n + 2) = {lhs} exceeds codomain index {inner.index}"
        )


def _argument_components(sp, cols: np.ndarray):
    """Scalar series of the chart map id + g at one anchor."""
    comps = []
    for i in range(cols.shape[0]):
        c = cols[i].copy()
        c[sp.unit_packed[i]] += 1.0
        comps.append(c)
    return comps


def compose(g1: Germ, g2: Germ) -> Germ:
    """Chart-level composition (g1 + id) o (g2 + id) - id, truncated.

    Equals g1 o (g2 + id) + g2 per anchor.  Gated by the containment check
    (1 + d_norm(g2)) (g1.index + 2) <= g2.index; the static sizing rule is
    available as composition_codomain_index.  The result lives at g2's index.
    """
    _check_frames(g1, g2)
    _containment_gate(g1, g2)
    sp = space(g1.dim, g1.degree)
    blocks = []
    for cols1, cols2 in zip(g1.coeffs, g2.coeffs):
        u = _argument_components(sp, cols2)
        blocks.append(sp.substitute(cols1, u) + cols2)
    return Germ(g1.anchors, g2.index, blocks, g1.degree)


def residual(g1: Germ, g2: Germ) -> Germ:
    """Defect of a candidate inverse: (g1 + id) o (g2 + id) - id.

    On the chart level this is exactly the composition product, so a germ g2
    inverts g1 precisely when the residual vanishes through the truncation
    degree.
    """
    return compose(g1, g2)


def compose_derivative(g1: Germ, g2: Germ, dg1: Germ, dg2: Germ) -> Germ:
    """Directional derivative of compose at (g1, g2) in direction (dg1, dg2).

    The three contributions are dg1 o (g2 + id), the Jacobian of g1 evaluated
    along g2 + id applied to dg2, and dg2 itself.  Directions must live at
    the indices of their base points.
    """
    _check_frames(g1, g2, dg1, dg2)
    if dg1.index != g1.index or dg2.index != g2.index:
        raise ValidationError("directions must carry the indices of their base germs")
    _containment_gate(g1, g2)
    sp = space(g1.dim, g1.degree)
    d = g1.dim
    blocks = []
    for cols1, cols2, dc1, dc2 in zip(g1.coeffs, g2.coeffs, dg1.coeffs, dg2.coeffs):
        u = _argument_components(sp, cols2)
        term1 = sp.substitute(dc1, u)
        jac = np.concatenate([sp.differentiate(cols1, j) for j in range(d)], axis=0)
        # row layout: entry (j * d + i) is the partial of component i along x_j
        jac_sub = sp.substitute(jac, u)
        term2 = np.zeros_like(term1)
        for i in range(d):
            for j in range(d):
                term2[i] += sp.mul(jac_sub[j * d + i], dc2[j])
        blocks.append(term1 + term2 + dc2)
    return Germ(g1.anchors, g2.index, blocks, g1.degree)


def invert(g: Germ) -> Germ:
    """Compositional inverse on the chart level.

    Requires d_norm(g) <= 1/2 (which is stricter than the < 1 threshold that
    already guarantees a local diffeomorphism).  The inverse is returned at
    index 12 * g.index, solves the chart equation h + g o (id + h) = 0 degree
    by degree, and two post-conditions are certified before returning: the
    recomputed residual vanishes through the truncation degree, and
    sup_norm(result) <= 1 / (6 * g.index).
    """
    dn = d_norm(g)
    if dn > INVERSION_D_BOUND:
        raise DomainError(
            f"inversion needs d_norm <= {INVERSION_D_BOUND}, got {dn}"
        )
    sp = space(g.dim, g.degree)
    d = g.dim
    out_index = INVERSION_INDEX_FACTOR * g.index
    eye = np.eye(d, dtype=np.complex128)
    blocks = []
    for cols in g.coeffs:
        lin = np.empty((d, d), dtype=np.complex128)
        for j in range(d):
            lin[:, j] = cols[:, sp.unit_packed[j]]
        m = eye + lin
        h = sp.zeros(d)
        for k in range(1, g.degree + 1):
            u = _argument_components(sp, h)
            t = sp.substitute(cols, u) + h
            idx = sp.by_degree[k]
            h[:, idx] -= np.linalg.solve(m, t[:, idx])
        u = _argument_components(sp, h)
        defect = sp.substitute(cols, u) + h
        worst = float(np.abs(defect).max())
        if worst > _RESIDUAL_TOL:
            raise InternalCheckError(
                f"inversion residual {worst} exceeds {_RESIDUAL_TOL}"
            )
        blocks.append(h)
    inv = Germ(g.anchors, out_index, blocks, g.degree)
    ceiling = 1.0 / (INVERSION_SUP_FACTOR * g.index)
    got = sup_norm(inv)
    if got > ceiling:
        raise InternalCheckError(
            f"inverse sup_norm {got} exceeds certified bound {ceiling}"
        )
    return inv


# -- derivative growth bound ----------------------------------------------


def derivative_bound(g: Germ, order: int) -> float:
    """Certified ceiling for the order-th derivative on the shrunk ball.

    Uses the two-radii estimate with outer radius R = 1/(n(n+1)), the gap
    between the 1/n and 1/(n+1) balls, and probe radius r = R/(4e), for which
    the overhead factor R/(R - 2er) collapses to 2:

        bound = 2 * order! * (4e / R)^order * sup_norm(g).
    """
    if not isinstance(order, int) or order < 0:
        raise ValidationError(f"derivative order must be a nonnegative integer, got {order!r}")
    n = g.index
    big_r = 1.0 / (n * (n + 1))
    return 2.0 * math.factorial(order) * (4.0 * math.e / big_r) ** order * sup_norm(g)


# -- evaluation and serialization ------------------------------------------


def evaluate_germ(g: Germ, anchor: int, offset) -> np.ndarray:
    """Value of the truncated series at anchor + offset."""
    sp = space(g.dim, g.degree)
    return sp.evaluate(g.coeffs[anchor], offset)


def _vector_to_json(v) -> list:
    return [[float(c.real), float(c.imag)] for c in np.asarray(v, dtype=np.complex128)]


def _vector_from_json(obj, dim: int, what: str) -> np.ndarray:
    if not isinstance(obj, list) or len(obj) != dim:
        raise ValidationError(f"{what} must be a list of {dim} [re, im] pairs")
    out = np.empty(dim, dtype=np.complex128)
    for i, pair in enumerate(obj):
        if not isinstance(pair, list) or len(pair) != 2:
            raise ValidationError(f"{what} component {i} must be a [re, im] pair")
        out[i] = complex(float(pair[0]), float(pair[1]))
    return out


def germ_to_json(g: Germ) -> dict:
    series = []
    for a in range(len(g.anchors)):
        terms = [
            {"alpha": list(alpha), "coeff": _vector_to_json(vec)}
            for alpha, vec in sorted(g.terms(a).items(), key=lambda kv: (sum(kv[0]), kv[0]))
        ]
        series.append({"anchor": a, "terms": terms})
    return {
        "dim": g.dim,
        "index": g.index,
        "degree": g.degree,
        "anchors": [_vector_to_json(p) for p in g.anchors.points],
        "series": series,
    }


def germ_from_json(obj) -> Germ:
    if not isinstance(obj, dict):
        raise ValidationError("germ JSON must be an object")
    for key in ("dim", "index", "degree", "anchors", "series"):
        if key not in obj:
            raise ValidationError(f"germ JSON is missing the '{key}' field")
    dim = obj["dim"]
    if not isinstance(dim, int) or dim < 1:
        raise ValidationError(f"germ dimension must be a positive integer, got {dim!r}")
    anchors = AnchorSet(
        [_vector_from_json(p, dim, "anchor") for p in obj["anchors"]], dim=dim
    )
    degree = obj["degree"]
    if not isinstance(degree, int) or degree < 1:
        raise ValidationError(f"truncation degree must be a positive integer, got {degree!r}")
    terms_per_anchor = [dict() for _ in range(len(anchors))]
    seen = set()
    for block in obj["series"]:
        if not isinstance(block, dict) or "anchor" not in block or "terms" not in block:
            raise ValidationError("each series block needs 'anchor' and 'terms'")
        a = block["anchor"]
        if not isinstance(a, int) or not 0 <= a < len(anchors):
            raise ValidationError(f"series block targets unknown anchor {a!r}")
        if a in seen:
            raise ValidationError(f"anchor {a} appears in two series blocks")
        seen.add(a)
        for term in block["terms"]:
            alpha = tuple(term.get("alpha", ()))
            if len(alpha) != dim or any(not isinstance(x, int) or x < 0 for x in alpha):
                raise ValidationError(f"bad multi-index {term.get('alpha')!r}")
            if not 1 <= sum(alpha) <= degree:
                raise ValidationError(
                    f"multi-index {alpha} outside the degree range 1..{degree}"
                )
            terms_per_anchor[a][alpha] = _vector_from_json(term["coeff"], dim, "coefficient")
    return Germ.from_terms(anchors, obj["index"], terms_per_anchor, degree)
