"""Truncated Baker-Campbell-Hausdorff series built from exact rational data.

The series log(exp(x) exp(y)) is expanded once per truncation order in the
free associative algebra on two letters, using exact integer arithmetic
throughout (factorial-scaled convolution coefficients, then a Fraction per
word).  Each word u1 u2 .. uk of the associative logarithm is converted to the
left-nested commutator [[..[u1, u2], u3].., uk] scaled by 1/k; by the
Dynkin-Specht-Wever identity the sum of these reproduces the Lie-series term
of the same degree.  The result is a flat evaluation plan: a topologically
sorted list of bracket nodes plus a float weight per node.  Evaluating the
plan needs nothing from the element type beyond addition, scaling by a float
and one bracket callable, so matrices and coefficient series share it.
"""

from __future__ import annotations

import math
from fractions import Fraction
from functools import lru_cache

from .errors import DomainError, ValidationError

MAX_ORDER = 12


def checked_order(order) -> int:
    if not isinstance(order, int) or isinstance(order, bool):
        raise ValidationError(f"truncation order must be an integer, got {order!r}")
    if order < 1:
        raise DomainError(f"truncation order must be positive, got {order}")
    if order > MAX_ORDER:
        raise DomainError(
            f"truncation order {order} exceeds the supported maximum {MAX_ORDER}"
        )
    return order


@lru_cache(maxsize=None)
def word_coefficients(order: int) -> dict:
    """Coefficients of log(exp(X) exp(Y)) on words of total degree <= order.

    Words are tuples over {0, 1} (0 for X, 1 for Y), values are Fractions.
    All intermediate arithmetic is integer: the factor exp(X) exp(Y) - 1 is
    scaled by order!**2 so powers stay integral, and each power contributes
    sign/(m * scale**m) per word.
    """
    checked_order(order)
    fact = math.factorial(order)
    scale = fact * fact
    conv = {}
    for i in range(order + 1):
        for j in range(order + 1 - i):
            if i or j:
                conv[(0,) * i + (1,) * j] = (fact // math.factorial(i)) * (
                    fact // math.factorial(j)
                )

    out: dict[tuple, Fraction] = {}
    power = {(): 1}
    denom = 1
    for m in range(1, order + 1):
        step: dict[tuple, int] = {}
        for wa, ca in power.items():
            budget = order - len(wa)
            for wb, cb in conv.items():
                if len(wb) <= budget:
                    w = wa + wb
                    step[w] = step.get(w, 0) + ca * cb
        power = step
        denom *= scale
        sign = 1 if m % 2 else -1
        for w, c in power.items():
            if c:
                out[w] = out.get(w, Fraction(0)) + Fraction(sign * c, m * denom)
    return {w: c for w, c in out.items() if c}


@lru_cache(maxsize=None)
def evaluation_plan(order: int) -> tuple:
    """Bracket evaluation plan for the truncated series.

    Returns a tuple of (parent, letter, weight) nodes.  A node with parent
    None is the bare letter; otherwise its value is bracket(value[parent],
    letter).  Words whose first two letters agree are dropped together with
    their whole subtree, since their left-nested bracket starts with [x, x].
    """
    coeffs = word_coefficients(order)
    contributing = {
        w: c / len(w)
        for w, c in coeffs.items()
        if len(w) == 1 or w[0] != w[1]
    }
    needed = set()
    for w in contributing:
        for k in range(1, len(w) + 1):
            needed.add(w[:k])
    plan = []
    index = {}
    for w in sorted(needed, key=lambda w: (len(w), w)):
        index[w] = len(plan)
        parent = index[w[:-1]] if len(w) > 1 else None
        plan.append((parent, w[-1], float(contributing.get(w, 0))))
    return tuple(plan)


def apply_plan(order: int, x, y, bracket):
    """Evaluate the truncated series for concrete x, y and a bracket callable.

    The element type must support elementwise addition and multiplication by
    a float.  No other structure is assumed, so numpy matrices and
    coefficient series run through the same code path.
    """
    plan = evaluation_plan(order)
    leaves = (x, y)
    values = []
    acc = None
    for parent, letter, weight in plan:
        if parent is None:
            v = leaves[letter]
        else:
            v = bracket(values[parent], leaves[letter])
        values.append(v)
        if weight:
            term = weight * v
            acc = term if acc is None else acc + term
    return acc
