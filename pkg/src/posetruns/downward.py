"""Downward run chains.

From ``x != e`` a downward run chain steps to an element covered by ``x``;
from the root it may jump anywhere.  Such a chain always returns to ``e``.
Its standard invariant function ``G(x) = P_e(U_x <= U_e)`` satisfies
``G(e) = 1`` and

    G(y) = Q(e, y) + sum over x covering y of G(x) Q(x, y),

which is evaluated from the top of the enumerated region downward.  Elements
above the enumeration depth can only add to ``G``; their total contribution
is bounded by the root-row mass they carry.
"""

from __future__ import annotations

import math
from typing import Mapping

from .distributions import Upf, pdf_from_upf_tree
from .errors import NonPositiveUpf, RowSumError, SupportError, ValidationError, ZeroOnCover
from .kernels import ROW_ATOL, Classification, DownwardKernel, InvariantFunction, Verdict
from .poset import LevelIndex, PathSpace, Poset, check_uniform, enumerate_poset


def validate_downward(rows, poset: Poset, tail: float = 0.0, *, strict: bool = True,
                      depth: int | None = None, atol: float = ROW_ATOL,
                      **kwargs) -> DownwardKernel:
    """Check ``rows`` against the downward-run support rules and wrap them.

    The root row may leave out at most ``tail`` probability mass (elements
    beyond the enumerated region).  Every other row must be a distribution on
    the elements covered by its state.
    """
    e = poset.root
    if isinstance(rows, Mapping):
        for x in rows:
            poset.check(x)
        if depth is None and not poset.finite:
            depth = max((poset.level(x) or 0) for x in rows)
    en = enumerate_poset(poset, depth)
    if isinstance(rows, Mapping):
        missing = [x for x in en.order if x not in rows]
        if missing:
            raise ValidationError(f"no row for {[poset.label(x) for x in missing]!r}")
    kernel = DownwardKernel(poset, rows, strict=strict, **kwargs)
    e_row = kernel.row(e)
    for y, p in e_row.items():
        poset.check(y)
        if p < 0:
            raise SupportError(f"negative entry Q(e, {poset.label(y)!r}) = {p!r}")
    total = sum(e_row.values())
    if total > 1 + atol or total < 1 - tail - atol:
        raise RowSumError(f"root row sums to {total!r} with declared tail {tail!r}")
    if strict:
        zero = [x for x in en.order if not e_row.get(x, 0) > 0]
        if zero:
            raise ZeroOnCover(f"root row puts no mass on {[poset.label(x) for x in zero]!r}")
    for x in en.order:
        if x == e:
            continue
        row = kernel.row(x)
        allowed = set(poset.down_covers(x))
        bad = [y for y in row if y not in allowed]
        if bad:
            raise SupportError(
                f"row {poset.label(x)!r} moves to {[poset.label(y) for y in bad]!r}, "
                "which it does not cover")
        if any(p < 0 for p in row.values()):
            raise SupportError(f"negative entry in row {poset.label(x)!r}")
        s = sum(row.values())
        if abs(s - 1) > atol:
            raise RowSumError(f"row {poset.label(x)!r} sums to {s!r}")
        if strict:
            zero = [y for y in allowed if not row.get(y, 0) > 0]
            if zero:
                raise ZeroOnCover(
                    f"row {poset.label(x)!r} puts no mass on {[poset.label(y) for y in zero]!r}")
    kernel.e_tail = max(1 - total, 0)
    return kernel


def standard_invariant_G(kernel: DownwardKernel, depth: int | None = None) -> InvariantFunction:
    """``G(x) = P_e(U_x <= U_e)`` on the elements of height ``<= depth``.

    Values beyond a finite enumeration are lower bounds; ``tail_bound`` is
    the root-row mass outside the enumerated region, which bounds the error.
    """
    poset = kernel.poset
    e = poset.root
    en = enumerate_poset(poset, depth)
    q_e = kernel.row(e)
    residual = max(1 - sum(q_e.get(x, 0) for x in en.order), 0)
    G = {}
    for y in reversed(en.order):
        if y == e:
            continue
        acc = q_e.get(y, 0)
        for x in poset.up_covers(y):
            if x in G:
                acc += G[x] * kernel.row(x).get(y, 0)
        G[y] = acc
    G[e] = 1
    values = {x: G[x] for x in en.order}
    flags = []
    if len(values) > 1 and all(v == 0 for x, v in values.items() if x != e):
        flags.append("degenerate")
    inv = InvariantFunction(values, "G", depth, en.complete,
                            tail_bound=0.0 if en.complete else residual)
    if not inv.is_monotone(poset):
        flags.append("not_monotone")
    if flags:
        inv = InvariantFunction(values, "G", depth, en.complete, inv.tail_bound, tuple(flags))
    return inv


def check_left_invariance(kernel: DownwardKernel, G: InvariantFunction) -> tuple:
    """Return ``(max over y != e of |(GQ)(y) - G(y)|, |(GQ)(e) - 1|)``."""
    e = kernel.root
    GQ = {}
    for x, Gx in G.values.items():
        for y, p in kernel.row(x).items():
            GQ[y] = GQ.get(y, 0) + Gx * p
    worst = 0.0
    for y in G.values:
        if y != e:
            worst = max(worst, abs(GQ.get(y, 0) - G[y]))
    return worst, abs(GQ.get(e, 0) - 1)


def level_masses(kernel: DownwardKernel, levels: LevelIndex) -> tuple:
    """``(Q(e, S_n) for n = 0..depth)`` on a uniform poset."""
    q_e = kernel.row(kernel.root)
    return tuple(sum(q_e.get(x, 0) for x in s) for s in levels.level_sets)


def classify_downward(kernel: DownwardKernel, depth: int | None = None,
                      tol: float = 1e-9) -> Classification:
    """Classify a downward run chain and compute ``nu(e) = E_e(U_e)``.

    The chain is always recurrent.  ``nu(e) = sum of G``; on uniform posets
    this equals ``sum over n of (n + 1) Q(e, S_n)``, which is cross-checked.
    ``survival`` holds ``P_e(U_e > n)`` for uniform posets.
    """
    poset = kernel.poset
    e = poset.root
    G = standard_invariant_G(kernel, depth)
    en = enumerate_poset(poset, depth)
    q_e = kernel.row(e)
    lower = G.total()
    moment = sum((1 + en.height[x]) * q_e.get(x, 0) for x in en.order)
    surv = ()
    levels = check_uniform(poset, depth)
    if isinstance(levels, LevelIndex):
        masses = level_masses(kernel, levels)
        # U_e = n + 1 exactly when Y_1 lies on level n
        surv = tuple(1 - sum(masses[:n]) for n in range(len(masses)))
    if G.complete:
        nu = lower
        return _positive(G, depth, nu, (nu, nu), lower, surv,
                         "finite poset: nu(e) = sum of G")
    upper = math.inf
    if kernel.moment_tail is not None:
        upper = moment + kernel.moment_tail(depth)
    verdict = kernel.closed_form_verdict
    if verdict == Verdict.NULL_RECURRENT:
        return Classification(verdict, depth, None, (lower, math.inf), lower, surv,
                              evidence="closed-form tail descriptor", invariant=G)
    if upper - lower <= tol or (verdict == Verdict.POSITIVE_RECURRENT and upper < math.inf):
        return _positive(G, depth, lower, (lower, upper), lower, surv, "certified moment tail")
    return Classification(Verdict.UNDETERMINED, depth, None, (lower, upper), lower, surv,
                          evidence="recurrent; finiteness of nu(e) not certified",
                          invariant=G)


def _positive(G, depth, nu, bounds, partial, surv, evidence):
    pdf = {x: v / nu for x, v in G.values.items()}
    times = {x: nu / v for x, v in G.values.items() if v > 0}
    return Classification(Verdict.POSITIVE_RECURRENT, depth, nu, bounds, partial, surv,
                          pdf, times, evidence, G)


def chain_from_upf_tree_down(upf, tree: Poset) -> DownwardKernel:
    """Downward kernel on a tree with ``G = upf``: ``Q(e, x) = g(x)`` where
    ``g`` is the density of ``upf``, and ``Q(x, parent(x)) = 1``."""
    values = upf.values if isinstance(upf, Upf) else dict(upf)
    for x, v in values.items():
        if not v > 0:
            raise NonPositiveUpf(f"G({tree.label(x)!r}) = {v!r}")
    g = pdf_from_upf_tree(values, tree)
    e = tree.root
    rows = {e: dict(g.weights)}
    for x in g.weights:
        if x != e:
            rows[x] = {tree.down_covers(x)[0]: 1}
    flags = g.flags
    return DownwardKernel(tree, rows, strict=not flags, e_tail=g.tail, flags=flags)


def lift_down_to_path_space(kernel: DownwardKernel, depth: int | None = None) -> DownwardKernel:
    """The kernel on covering paths with
    ``Q^(e, e x1..xn) = Q(e, xn) Q(xn, xn-1) ... Q(x1, e)`` and
    ``Q^(a, parent(a)) = 1``.

    The root row is enumerated over paths of length ``<= depth``.
    """
    space = PathSpace(kernel.poset)
    e = kernel.root
    q_e = kernel.row(e)
    en = enumerate_poset(space, depth)
    root_row = {}
    for a in en.order:
        w = q_e.get(a.end, 0)
        v = a.vertices
        for k in range(len(v) - 1, 0, -1):
            if not w:
                break
            w *= kernel.row(v[k]).get(v[k - 1], 0)
        root_row[a] = w

    def row(a):
        if a == space.root:
            return root_row
        return {a.parent: 1}

    tail = max(1 - sum(root_row.values()), 0)
    return DownwardKernel(space, row, strict=kernel.strict, e_tail=tail,
                          closed_form_verdict=kernel.closed_form_verdict)
