"""Transition kernels and the result types shared by both chain directions."""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from typing import Callable, Mapping

from .errors import EnumerationBudgetExceeded, UnknownElement
from .poset import Poset

#: tolerance on row sums of validated kernels
ROW_ATOL = 1e-12


class Verdict(str, enum.Enum):
    TRANSIENT = "transient"
    NULL_RECURRENT = "null-recurrent"
    POSITIVE_RECURRENT = "positive-recurrent"
    UNDETERMINED = "undetermined"

    @property
    def recurrent(self) -> bool:
        return self in (Verdict.NULL_RECURRENT, Verdict.POSITIVE_RECURRENT)

    def __str__(self):
        return self.value


class Kernel:
    """Row-stochastic transition function on a poset.

    ``rows`` is either a mapping ``x -> {y: P(x, y)}`` (finite or truncated
    kernels) or a pure function ``x -> {y: P(x, y)}`` (lazily generated
    kernels on infinite posets).  Rows are returned as fresh dicts in a fixed
    target order, which the simulator relies on for reproducibility.
    """

    direction = "?"

    def __init__(self, poset: Poset, rows, *, strict: bool = True, name: str | None = None,
                 flags: tuple = ()):
        self.poset = poset
        self._rows = rows
        self.strict = strict
        self.name = name
        self.flags = tuple(flags)

    @property
    def root(self):
        return self.poset.root

    @property
    def explicit(self) -> bool:
        return not callable(self._rows)

    def domain(self) -> tuple:
        """States with an explicitly stored row (empty for lazy kernels)."""
        return tuple(self._rows) if self.explicit else ()

    def row(self, x) -> dict:
        if not self.explicit:
            return dict(self._rows(self.poset.check(x)))
        try:
            return dict(self._rows[x])
        except (KeyError, TypeError):
            if x in self.poset:
                raise EnumerationBudgetExceeded(
                    f"kernel row for {self.poset.label(x)!r} lies beyond the stored region"
                ) from None
            raise UnknownElement(x) from None

    def __call__(self, x, y):
        return self.row(x).get(y, 0)

    def rows_on(self, elements) -> dict:
        return {x: self.row(x) for x in elements}

    def __repr__(self):
        kind = "explicit" if self.explicit else "lazy"
        return f"{type(self).__name__}({kind}, {self.poset!r})"


class UpwardKernel(Kernel):
    """Upward run kernel: from ``x`` move to a cover ``y`` of ``x`` or reset
    to the root.

    ``ascent_bound``, when given, is a certified bound
    ``sup_x P(x, A_x) <= ascent_bound < 1``.  ``survival_tail(depth)``, when
    given, bounds ``sum over n > depth of P_e(T_e > n)``.
    ``closed_form_verdict`` is a classification known analytically (e.g. from
    a success-runs tail descriptor).
    """

    direction = "up"

    def __init__(self, poset, rows, *, strict=True, name=None, flags=(),
                 ascent_bound: float | None = None,
                 survival_tail: Callable[[int], float] | None = None,
                 closed_form_verdict: Verdict | None = None):
        super().__init__(poset, rows, strict=strict, name=name, flags=flags)
        self.ascent_bound = ascent_bound
        self.survival_tail = survival_tail
        self.closed_form_verdict = closed_form_verdict

    def reset(self, x):
        return self.row(x).get(self.root, 0)


class DownwardKernel(Kernel):
    """Downward run kernel: from ``x != e`` move to an element covered by
    ``x``; from the root jump anywhere.

    On an infinite poset the root row is stored truncated and ``e_tail``
    is the probability mass it leaves out.  ``moment_tail(depth)``, when
    given, bounds ``sum over height(x) > depth of (1 + height(x)) Q(e, x)``.
    """

    direction = "down"

    def __init__(self, poset, rows, *, strict=True, name=None, flags=(), e_tail: float = 0.0,
                 moment_tail: Callable[[int], float] | None = None,
                 closed_form_verdict: Verdict | None = None):
        super().__init__(poset, rows, strict=strict, name=name, flags=flags)
        self.e_tail = e_tail
        self.moment_tail = moment_tail
        self.closed_form_verdict = closed_form_verdict


@dataclass(frozen=True)
class InvariantFunction:
    """Standard invariant function ``F`` (upward) or ``G`` (downward).

    ``tail_bound`` bounds the truncation error of every listed value
    (zero when the values are exact).
    """

    values: dict
    kind: str
    depth: int | None
    complete: bool
    tail_bound: float = 0.0
    flags: tuple = ()

    def __getitem__(self, x):
        return self.values[x]

    def __call__(self, x):
        return self.values[x]

    def __contains__(self, x):
        return x in self.values

    def __iter__(self):
        return iter(self.values)

    def total(self):
        return sum(self.values.values())

    def is_monotone(self, poset: Poset, atol: float = 1e-12) -> bool:
        """Whether the values form a valid UPF shape (non-increasing upward)."""
        return all(
            self.values[x] + atol >= self.values[y]
            for x in self.values
            for y in poset.up_covers(x)
            if y in self.values
        )


@dataclass(frozen=True)
class Classification:
    """Recurrence verdict with the evidence that produced it.

    ``mean_return`` is ``mu(e)`` (or ``nu(e)``) when known to be finite;
    ``bounds`` always brackets it (the upper bound may be infinite).
    """

    verdict: Verdict
    depth: int | None
    mean_return: float | None
    bounds: tuple
    partial_sum: float
    survival: tuple = ()
    invariant_pdf: dict | None = None
    mean_return_times: dict | None = None
    evidence: str = ""
    invariant: InvariantFunction | None = field(default=None, repr=False)


def n_step_distributions(kernel: Kernel, start, n: int) -> list:
    """Exact distributions of ``X_0, ..., X_n`` started at ``start``."""
    dist = {start: 1}
    out = [dict(dist)]
    for _ in range(n):
        nxt = {}
        for x, px in dist.items():
            for y, p in kernel.row(x).items():
                nxt[y] = nxt.get(y, 0) + px * p
        dist = nxt
        out.append(dict(dist))
    return out


def pushforward(dist: Mapping, fn: Callable) -> dict:
    out = {}
    for x, p in dist.items():
        y = fn(x)
        out[y] = out.get(y, 0) + p
    return out


def max_abs_difference(p: Mapping, q: Mapping) -> float:
    keys = set(p) | set(q)
    return max((abs(p.get(x, 0) - q.get(x, 0)) for x in keys), default=0.0)


def is_finite_number(x) -> bool:
    return x is not None and math.isfinite(x)
