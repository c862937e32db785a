"""Time reversal between recurrent upward chains and downward chains.

With the shared standard invariant function ``F`` (equal to ``G``), the
reversed kernels are

    Q(y, x) = F(x) P(x, y) / F(y)        P(x, y) = G(y) Q(y, x) / G(x)
    Q(e, x) = F(x) P(x, e)               P(x, e) = Q(e, x) / G(x)

Rows are never renormalised: a row-sum defect means the supplied invariant
function is wrong and is raised as :class:`RowSumError`.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

from .downward import standard_invariant_G
from .errors import NotRecurrent, RowSumError, ZeroInvariant
from .kernels import DownwardKernel, InvariantFunction, Kernel, UpwardKernel, Verdict
from .upward import standard_invariant_F, survival

#: largest tolerated row-sum defect of a reversed kernel
DEFECT_TOL = 1e-9


@dataclass(frozen=True)
class ReversalReport:
    source: Kernel
    target: Kernel
    invariant: InvariantFunction
    max_row_defect: float
    depth: int | None
    flags: tuple = ()


def reverse_upward(P: UpwardKernel, F: InvariantFunction | None = None,
                   depth: int | None = None, *, allow_transient: bool = False) -> DownwardKernel:
    """Reverse a recurrent upward chain into a downward chain."""
    return _reverse_up(P, F, depth, allow_transient).target


def _reverse_up(P, F, depth, allow_transient):
    if F is None:
        F = standard_invariant_F(P, depth)
    depth = F.depth if depth is None else depth
    flags = []
    if P.closed_form_verdict == Verdict.TRANSIENT:
        if not allow_transient:
            raise NotRecurrent("the upward chain is transient")
        flags.append("transient_override")
    elif not F.complete and P.closed_form_verdict is None:
        warnings.warn("recurrence of the upward chain is not certified", stacklevel=3)
        flags.append("recurrence_unverified")
    poset = P.poset
    e = poset.root
    zero = [x for x, v in F.values.items() if not v > 0]
    if zero:
        raise ZeroInvariant(f"F vanishes at {[poset.label(x) for x in zero]!r}")
    prow = {x: P.row(x) for x in F.values}
    rows = {e: {x: Fx * prow[x].get(e, 0) for x, Fx in F.values.items()}}
    worst = 0.0
    for y, Fy in F.values.items():
        if y == e:
            continue
        row = {x: F[x] * prow[x].get(y, 0) / Fy for x in poset.down_covers(y)}
        defect = abs(sum(row.values()) - 1)
        if defect > DEFECT_TOL:
            raise RowSumError(
                f"reversed row {poset.label(y)!r} is off by {defect!r}; F is not invariant for P")
        worst = max(worst, defect)
        rows[y] = row
    e_sum = sum(rows[e].values())
    tail = max(1 - e_sum, 0)
    if F.complete:
        defect = abs(e_sum - 1)
        if defect > DEFECT_TOL and not allow_transient:
            raise RowSumError(f"reversed root row sums to {e_sum!r}")
        worst = max(worst, defect)
        tail = 0.0 if defect <= DEFECT_TOL else tail
    moment_tail = None
    verdict = None
    if P.closed_form_verdict is not None and P.closed_form_verdict.recurrent:
        verdict = P.closed_form_verdict
    if poset.uniform and (P.survival_tail is not None or P.ascent_bound is not None):
        moment_tail = _moment_tail(P)
        verdict = verdict or Verdict.POSITIVE_RECURRENT
    Q = DownwardKernel(poset, rows, strict=P.strict, e_tail=tail, moment_tail=moment_tail,
                       closed_form_verdict=verdict, flags=tuple(flags))
    return ReversalReport(P, Q, F, worst, depth, tuple(flags))


def _moment_tail(P):
    # sum_{n>d} (n+1) P(T_e = n+1) = (d+1) s_{d+1} + sum_{n>d} s_n, s_n = P_e(T_e > n)
    def bound(d):
        s_next = survival(P, d + 1)
        if P.survival_tail is not None:
            rest = P.survival_tail(d)
        else:
            rho = P.ascent_bound
            rest = survival(P, d) * rho / (1 - rho)
        return (d + 1) * s_next + rest

    return bound


def reverse_downward(Q: DownwardKernel, G: InvariantFunction | None = None,
                     depth: int | None = None) -> UpwardKernel:
    """Reverse a downward chain into an upward chain."""
    return _reverse_down(Q, G, depth).target


def _reverse_down(Q, G, depth):
    if G is None:
        G = standard_invariant_G(Q, depth)
    depth = G.depth if depth is None else depth
    poset = Q.poset
    e = poset.root
    zero = [x for x, v in G.values.items() if not v > 0]
    if zero:
        raise ZeroInvariant(f"G vanishes at {[poset.label(x) for x in zero]!r}")
    q_e = Q.row(e)
    rows = {}
    worst = 0.0
    for x, Gx in G.values.items():
        ups = poset.up_covers(x)
        if not all(y in G.values for y in ups):
            continue
        row = {y: G[y] * Q.row(y).get(x, 0) / Gx for y in ups}
        row[e] = row.get(e, 0) + q_e.get(x, 0) / Gx
        defect = abs(sum(row.values()) - 1)
        if defect > DEFECT_TOL + 2 * G.tail_bound / Gx:
            raise RowSumError(
                f"reversed row {poset.label(x)!r} is off by {defect!r}; G is not invariant for Q")
        worst = max(worst, defect)
        rows[x] = row
    verdict = Q.closed_form_verdict
    P = UpwardKernel(poset, rows, strict=Q.strict, closed_form_verdict=verdict)
    return ReversalReport(Q, P, G, worst, depth)


def reverse(kernel: Kernel, invariant: InvariantFunction | None = None,
            depth: int | None = None, *, allow_transient: bool = False) -> ReversalReport:
    """Reverse either kind of kernel and report the shared invariant."""
    if isinstance(kernel, UpwardKernel):
        return _reverse_up(kernel, invariant, depth, allow_transient)
    if isinstance(kernel, DownwardKernel):
        return _reverse_down(kernel, invariant, depth)
    raise TypeError(f"cannot reverse {kernel!r}")
