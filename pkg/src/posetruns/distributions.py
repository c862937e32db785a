"""Densities, upper probability functions and rate functions on posets.

For a random element ``X`` of a poset with density ``f`` the upper
probability function is ``F(x) = P(X >= x)`` and the rate function is
``r(x) = f(x) / F(x)``.  Infinite supports are handled by enumerating a
finite down-closed region; every object carries an explicit ``tail`` bound on
the probability mass that the enumeration may have missed.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Mapping

from .errors import NegativeMass, NotATree, TailTooLarge, ZeroUpf
from .poset import Poset, down_set, enumerate_poset, is_tree, up_sets

#: relative tolerance used to decide whether a rate function is constant
RATE_RTOL = 1e-9
#: absolute tolerance on negative mass produced by floating point cancellation
MASS_ATOL = 1e-12


@dataclass(frozen=True)
class Pdf:
    """Probability density on (an enumerated part of) a poset.

    ``tail`` bounds the mass carried by elements that are not listed.
    """

    weights: dict
    tail: float = 0.0
    flags: tuple = ()

    def __getitem__(self, x):
        return self.weights.get(x, 0)

    def total(self):
        return sum(self.weights.values())

    def support(self):
        return {x for x, w in self.weights.items() if w > 0}


@dataclass(frozen=True)
class Upf:
    """Upper probability function ``x -> P(X >= x)``.

    ``tail`` bounds the error of every listed value.
    """

    values: dict
    tail: float = 0.0
    depth: int | None = None
    flags: tuple = ()

    def __getitem__(self, x):
        return self.values[x]

    def __call__(self, x):
        return self.values[x]

    def __contains__(self, x):
        return x in self.values

    def is_monotone(self, poset: Poset, atol: float = 0.0) -> bool:
        """True when ``F(x) >= F(y)`` along every enumerated cover edge."""
        return all(
            self.values[x] + atol >= self.values[y]
            for x in self.values
            for y in poset.up_covers(x)
            if y in self.values
        )


@dataclass(frozen=True)
class RateFunction:
    values: dict
    constant: bool
    rate: float | None = None
    checked: tuple = field(default=(), repr=False)

    def __getitem__(self, x):
        return self.values[x]


def _upf_values(weights, poset, en):
    if is_tree(poset, en):
        F = {}
        for x in reversed(en.order):
            F[x] = weights.get(x, 0) + sum(F[y] for y in poset.up_covers(x) if y in en.height)
        return F
    ups = up_sets(poset, en)
    return {x: sum(weights.get(y, 0) for y in ups[x]) for x in en.order}


def upf_from_pdf(pdf: Pdf, poset: Poset, depth: int | None = None,
                 accuracy: float | None = None) -> Upf:
    """``F(x) = sum of f(y) over y >= x`` on the elements of height ``<= depth``.

    Mass of ``pdf`` outside the enumerated region is folded into the tail.
    Raises :class:`TailTooLarge` if the tail exceeds ``accuracy``.
    """
    en = enumerate_poset(poset, depth)
    outside = sum(w for x, w in pdf.weights.items() if x not in en.height)
    tail = pdf.tail + outside
    if accuracy is not None and tail > accuracy:
        raise TailTooLarge(f"tail mass {tail!r} exceeds requested accuracy {accuracy!r}")
    F = _upf_values(pdf.weights, poset, en)
    flags = []
    if any(pdf[x] <= 0 for x in en.order):
        flags.append("not_full_support")
    return Upf(F, tail=tail, depth=depth, flags=tuple(flags))


def pdf_from_upf_tree(upf, tree: Poset) -> Pdf:
    """Invert a UPF on a rooted tree: ``f(x) = F(x) - sum of F over children``.

    ``upf`` is a :class:`Upf` or a plain mapping.  Elements whose children are
    not all listed (the enumeration frontier) get no density; the mass they
    would carry is reported as the tail.
    """
    values = upf.values if isinstance(upf, Upf) else dict(upf)
    for x in values:
        if x != tree.root and len(tree.down_covers(x)) != 1:
            raise NotATree(f"{x!r} has {len(tree.down_covers(x))} parents")
    f = {}
    for x, Fx in values.items():
        kids = tree.up_covers(x)
        if not all(y in values for y in kids):
            continue
        fx = Fx - sum(values[y] for y in kids)
        if fx < -MASS_ATOL:
            raise NegativeMass(f"f({x!r}) = {fx!r} < 0")
        f[x] = fx
    tail = max(values[tree.root] - sum(f.values()), 0)
    flags = ("not_full_support",) if any(w <= 0 for w in f.values()) else ()
    return Pdf(f, tail=tail, flags=flags)


def rate_function(pdf: Pdf, poset: Poset, depth: int | None = None,
                  upf: Upf | None = None) -> RateFunction:
    """Pointwise ``r(x) = f(x) / F(x)`` and whether it is constant.

    Constancy is judged with relative tolerance :data:`RATE_RTOL`, and only on
    elements where the truncation tail cannot move ``F`` by more than that
    tolerance.
    """
    if upf is None:
        upf = upf_from_pdf(pdf, poset, depth)
    r = {}
    for x, Fx in upf.values.items():
        if Fx == 0:
            raise ZeroUpf(f"F({x!r}) = 0")
        r[x] = pdf[x] / Fx
    checked = tuple(x for x, Fx in upf.values.items() if upf.tail <= RATE_RTOL * Fx)
    constant = False
    rate = None
    if checked:
        r0 = r[checked[0]]
        constant = all(abs(r[x] - r0) <= RATE_RTOL * abs(r0) for x in checked)
        rate = r0 if constant else None
    return RateFunction(r, constant, rate, checked)


@dataclass(frozen=True)
class DownsetCheck:
    lhs: float
    rhs: float
    difference: float
    bound: float


def check_expected_downset(pdf: Pdf, poset: Poset, depth: int | None = None,
                           accuracy: float | None = None) -> DownsetCheck:
    """Compare ``sum_x F(x)`` with ``E[#{t : t <= X}]``."""
    upf = upf_from_pdf(pdf, poset, depth, accuracy)
    lhs = sum(upf.values.values())
    sizes = {x: len(down_set(poset, x)) for x in upf.values}
    rhs = sum(pdf[x] * sizes[x] for x in upf.values)
    return DownsetCheck(lhs, rhs, abs(lhs - rhs), max(sizes.values()) * upf.tail)


def total_variation(p: Mapping, q: Mapping) -> float:
    keys = set(p) | set(q)
    return 0.5 * sum(abs(p.get(x, 0) - q.get(x, 0)) for x in keys)
