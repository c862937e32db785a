"""Upward run chains.

From state ``x`` an upward run chain moves to some ``y`` covering ``x`` or
resets to the root ``e``.  Its standard invariant function is

    F(x) = P_e(T_x <= T_e),

the probability of reaching ``x`` before returning to ``e``.  ``F`` satisfies
``F(e) = 1`` and ``F(y) = sum over x covered by y of F(x) P(x, y)``, which is
how it is computed: level by level in topological order, never through a
linear solve.
"""

from __future__ import annotations

import math
from typing import Mapping

from .distributions import Pdf, Upf
from .errors import (
    NonPositiveUpf,
    NotATree,
    RowSumError,
    SupportError,
    TailTooLarge,
    ValidationError,
    ZeroOnCover,
)
from .kernels import (
    ROW_ATOL,
    Classification,
    InvariantFunction,
    UpwardKernel,
    Verdict,
)
from .poset import FinitePoset, PathSpace, Poset, enumerate_poset


def validate_upward(rows, poset: Poset, *, strict: bool = True, depth: int | None = None,
                    atol: float = ROW_ATOL, **kwargs) -> UpwardKernel:
    """Check ``rows`` against the upward-run support rules and wrap them.

    Rows are checked on every element of height ``<= depth`` (the whole
    poset when it is finite and ``depth`` is None).
    """
    kernel = UpwardKernel(poset, rows, strict=strict, **kwargs)
    if isinstance(rows, Mapping):
        for x in rows:
            poset.check(x)
        if depth is None and not poset.finite:
            depth = max(_height_hint(poset, x) for x in rows)
    en = enumerate_poset(poset, depth)
    e = poset.root
    missing = [x for x in en.order if isinstance(rows, Mapping) and x not in rows]
    if missing:
        raise ValidationError(f"no row for {[poset.label(x) for x in missing]!r}")
    for x in en.order:
        _check_up_row(kernel, x, e, strict, atol)
    return kernel


def _height_hint(poset, x):
    lvl = poset.level(x)
    return 0 if lvl is None else lvl


def _check_up_row(kernel, x, e, strict, atol):
    poset = kernel.poset
    row = kernel.row(x)
    allowed = set(poset.up_covers(x)) | {e}
    bad = [(x, y) for y in row if y not in allowed]
    if bad:
        raise SupportError(f"mass outside A_x and e in row {poset.label(x)!r}: {bad!r}")
    neg = [(x, y, p) for y, p in row.items() if p < 0]
    if neg:
        raise SupportError(f"negative entries {neg!r}")
    total = sum(row.values())
    if abs(total - 1) > atol:
        raise RowSumError(f"row {poset.label(x)!r} sums to {total!r}")
    if strict:
        zero = [y for y in allowed if not row.get(y, 0) > 0]
        if zero:
            raise ZeroOnCover(
                f"row {poset.label(x)!r} puts no mass on {[poset.label(y) for y in zero]!r}")


def standard_invariant_F(kernel: UpwardKernel, depth: int | None = None) -> InvariantFunction:
    """``F(x) = P_e(T_x <= T_e)`` on all elements of height ``<= depth``."""
    poset = kernel.poset
    en = enumerate_poset(poset, depth)
    F = {poset.root: 1}
    rows = {}
    for y in en.order[1:]:
        acc = 0
        for x in poset.down_covers(y):
            if x not in rows:
                rows[x] = kernel.row(x)
            acc += F[x] * rows[x].get(y, 0)
        F[y] = acc
    inv = InvariantFunction(F, "F", depth, en.complete)
    if not inv.is_monotone(poset):
        inv = InvariantFunction(F, "F", depth, en.complete, flags=("not_monotone",))
    return inv


def ascent_masses(kernel: UpwardKernel, n: int) -> list:
    """Mass of ``X_k`` on excursions that have not reset, for ``k = 0..n``.

    Entry ``k`` maps ``x`` to ``P_e(X_k = x, T_e > k)``, i.e. the summed
    path products over covering paths of length ``k`` ending at ``x``.
    """
    e = kernel.root
    v = {e: 1}
    out = [v]
    for _ in range(n):
        nxt = {}
        for x, px in v.items():
            for y, p in kernel.row(x).items():
                if y != e:
                    nxt[y] = nxt.get(y, 0) + px * p
        v = nxt
        out.append(v)
    return out


def survival_sequence(kernel: UpwardKernel, n: int) -> tuple:
    """``(P_e(T_e > k) for k = 0..n)``."""
    return tuple(sum(v.values()) for v in ascent_masses(kernel, n))


def survival(kernel: UpwardKernel, n: int):
    """``P_e(T_e > n)``: total mass of covering paths of length ``n``."""
    if n < 0:
        raise ValueError("n must be nonnegative")
    return survival_sequence(kernel, n)[-1]


def check_left_invariance(kernel: UpwardKernel, F: InvariantFunction) -> tuple:
    """Return ``(max over y != e of |(FP)(y) - F(y)|, |(FP)(e) - 1|)``.

    ``FP`` is formed as a full row-by-row product over the listed states.
    Only targets whose predecessors are all listed are compared.
    """
    e = kernel.root
    FP = {}
    for x, Fx in F.values.items():
        for y, p in kernel.row(x).items():
            FP[y] = FP.get(y, 0) + Fx * p
    worst = 0.0
    for y in F.values:
        if y != e:
            worst = max(worst, abs(FP.get(y, 0) - F[y]))
    return worst, abs(FP.get(e, 0) - 1)


def classify(kernel: UpwardKernel, depth: int | None = None, tol: float = 1e-9) -> Classification:
    """Classify the chain from ``F`` and the survival sequence.

    Finite posets are always positive recurrent and handled exactly.  On
    infinite posets only a certified tail (``ascent_bound`` or
    ``survival_tail`` on the kernel) or a ``closed_form_verdict`` yields a
    verdict; otherwise the result is undetermined with both partial
    quantities reported.
    """
    F = standard_invariant_F(kernel, depth)
    poset = kernel.poset
    if F.complete:
        height = max(enumerate_poset(poset, depth).height.values())
        surv = survival_sequence(kernel, height + 1)
        mu = F.total()
        return _positive(F, Verdict.POSITIVE_RECURRENT, depth, mu, (mu, mu), mu, surv,
                         "finite poset: survival reaches 0 after the longest path")
    surv = survival_sequence(kernel, depth)
    partial = sum(surv)
    tail = None
    if kernel.survival_tail is not None:
        tail = kernel.survival_tail(depth)
    elif kernel.ascent_bound is not None and kernel.ascent_bound < 1:
        rho = kernel.ascent_bound
        tail = surv[-1] * rho / (1 - rho)
    verdict = kernel.closed_form_verdict
    if verdict in (Verdict.TRANSIENT, Verdict.NULL_RECURRENT):
        return Classification(verdict, depth, None, (partial, math.inf), partial, surv,
                              evidence="closed-form tail descriptor", invariant=F)
    if tail is not None and tail < math.inf and (
            tail <= tol or verdict == Verdict.POSITIVE_RECURRENT):
        evidence = "certified tail bound" if verdict is None else "closed-form tail descriptor"
        return _positive(F, Verdict.POSITIVE_RECURRENT, depth, partial,
                         (partial, partial + tail), partial, surv, evidence)
    if verdict == Verdict.POSITIVE_RECURRENT:
        return Classification(verdict, depth, None, (partial, math.inf), partial, surv,
                              evidence="closed-form tail descriptor; mean not bounded",
                              invariant=F)
    return Classification(Verdict.UNDETERMINED, depth, None, (partial, math.inf), partial,
                          surv, evidence="numeric evidence only: no certified tail",
                          invariant=F)


def _positive(F, verdict, depth, mu, bounds, partial, surv, evidence):
    pdf = {x: v / mu for x, v in F.values.items()}
    times = {x: mu / v for x, v in F.values.items() if v > 0}
    return Classification(verdict, depth, mu, bounds, partial, surv, pdf, times, evidence, F)


def chain_from_upf_tree(upf, tree: Poset) -> UpwardKernel:
    """Upward kernel on a rooted tree whose standard invariant function is ``upf``.

    ``P(x, y) = F(y) / F(x)`` for children ``y`` and ``P(x, e) = f(x) / F(x)``
    where ``f`` is the density of ``F``.  ``upf`` may be a :class:`Upf`, a
    mapping (rows are built where all children are listed) or a callable
    (rows are built lazily).
    """
    e = tree.root

    def values():
        if isinstance(upf, Upf):
            return upf.values
        return upf

    if callable(upf) and not isinstance(upf, (Upf, Mapping)):
        def F(x):
            return upf(x)

        def row(x):
            return _upf_row(tree, F, x, e)

        return UpwardKernel(tree, row, strict=True)

    vals = values()
    for x in vals:
        if x != e and len(tree.down_covers(x)) != 1:
            raise NotATree(f"{tree.label(x)!r} has several parents")
    rows = {}
    for x in vals:
        if all(y in vals for y in tree.up_covers(x)):
            rows[x] = _upf_row(tree, vals.__getitem__, x, e)
    flags = []
    if any(row.get(e, 0) <= 0 for row in rows.values()):
        flags.append("not_full_support")
    if isinstance(tree, FinitePoset) and len(tree) == 1:
        flags.append("degenerate")
    strict = not flags
    return UpwardKernel(tree, rows, strict=strict, flags=tuple(flags))


def _upf_row(tree, F, x, e):
    if x != e and len(tree.down_covers(x)) != 1:
        raise NotATree(f"{tree.label(x)!r} has several parents")
    Fx = F(x)
    if not Fx > 0:
        raise NonPositiveUpf(f"F({tree.label(x)!r}) = {Fx!r}")
    row = {}
    above = 0
    for y in tree.up_covers(x):
        Fy = F(y)
        if not Fy > 0:
            raise NonPositiveUpf(f"F({tree.label(y)!r}) = {Fy!r}")
        row[y] = Fy / Fx
        above += Fy
    row[e] = row.get(e, 0) + (Fx - above) / Fx
    return row


def lift_to_path_space(kernel: UpwardKernel) -> UpwardKernel:
    """The kernel ``P^(a, a.y) = P(m(a), y)``, ``P^(a, e) = P(m(a), e)`` on
    the tree of covering paths."""
    space = PathSpace(kernel.poset)
    base_root = kernel.root

    def row(a):
        out = {}
        for y, p in kernel.row(a.end).items():
            out[space.root if y == base_root else a.extend(y)] = p
        return out

    return UpwardKernel(space, row, strict=kernel.strict, ascent_bound=kernel.ascent_bound,
                        survival_tail=kernel.survival_tail,
                        closed_form_verdict=kernel.closed_form_verdict)


def last_state_distribution(kernel: UpwardKernel, F: InvariantFunction | None = None,
                            depth: int | None = None, accuracy: float | None = None) -> Pdf:
    """Law of the last state visited before the first return to ``e``:
    ``x -> F(x) P(x, e)``."""
    if F is None:
        F = standard_invariant_F(kernel, depth)
    e = kernel.root
    w = {x: Fx * kernel.row(x).get(e, 0) for x, Fx in F.values.items()}
    tail = max(1 - sum(w.values()), 0)
    if accuracy is not None and tail > accuracy:
        raise TailTooLarge(f"missing mass {tail!r} exceeds {accuracy!r}")
    return Pdf(w, tail=tail)
