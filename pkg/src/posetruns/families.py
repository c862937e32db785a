"""Closed forms for special families of run chains.

* Success-runs chains on ``(N, <=)`` and level-homogeneous upward chains on
  uniform posets, which project onto a success-runs chain through the level
  map ``x -> d(e, x)``.
* Spatially homogeneous upward chains on positive semigroups, whose
  invariant function on the free semigroup of words is a product of letter
  rates.
* The grid ``N^k`` with multinomial invariant function.

Exact classification of infinite chains is only ever derived from a tail
descriptor (:class:`TailDescriptor`); numeric partial sums alone give
``undetermined``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Mapping, Sequence

from .errors import (
    EnumerationBudgetExceeded,
    InvalidTail,
    NotLevelHomogeneous,
    NotRecurrent,
    RatesSumExceedsOne,
    ValidationError,
    UnknownElement,
    ZeroPoint,
)
from .kernels import Classification, DownwardKernel, InvariantFunction, UpwardKernel, Verdict
from .poset import (
    GeneratedPoset,
    LevelIndex,
    Poset,
    check_uniform,
    enumerate_poset,
    free_poset,
    grid_poset,
)

HOMOGENEITY_ATOL = 1e-12


def chain_poset() -> GeneratedPoset:
    """The chain ``(N, <=)``; every ``n`` is covered by ``n + 1`` only."""
    return GeneratedPoset(
        0,
        lambda n: (n + 1,),
        lambda n: (n - 1,) if n > 0 else (),
        lambda n: isinstance(n, int) and not isinstance(n, bool) and n >= 0,
        parse=int,
        level=lambda n: n,
        uniform=True,
        name="chain",
    )


# -- success runs -----------------------------------------------------------

@dataclass(frozen=True)
class TailDescriptor:
    """Closed-form advance probabilities ``alpha_n`` for large ``n``.

    ``constant``: ``alpha_n = c``.  ``power``: ``alpha_n = 1 - c / (n + 2)**p``.
    """

    kind: str
    c: float
    p: float = 1.0

    def alpha(self, n: int):
        if self.kind == "constant":
            return self.c
        return 1 - self.c / (n + 2) ** self.p

    def verdict(self) -> Verdict:
        if self.kind == "constant":
            return Verdict.POSITIVE_RECURRENT
        if self.p > 1:
            return Verdict.TRANSIENT
        if self.p == 1:
            return Verdict.POSITIVE_RECURRENT if self.c > 1 else Verdict.NULL_RECURRENT
        return Verdict.POSITIVE_RECURRENT

    def __str__(self):
        if self.kind == "constant":
            return f"constant:{self.c}"
        return f"power:{self.c},{self.p}"


def parse_tail(text: str) -> TailDescriptor:
    """Parse ``constant:c`` or ``power:c,p``."""
    kind, _, args = text.partition(":")
    try:
        nums = [float(a) for a in args.split(",")] if args else []
    except ValueError:
        raise InvalidTail(f"bad tail descriptor {text!r}") from None
    if kind == "constant" and len(nums) == 1:
        return TailDescriptor("constant", nums[0])
    if kind == "power" and len(nums) == 2:
        return TailDescriptor("power", nums[0], nums[1])
    raise InvalidTail(f"bad tail descriptor {text!r}; expected constant:c or power:c,p")


@dataclass(frozen=True)
class LevelParams:
    """Advance probabilities ``alpha_0, alpha_1, ...``: an explicit prefix
    followed by a tail descriptor (``None`` means unknown beyond the prefix)."""

    prefix: tuple = ()
    tail: TailDescriptor | None = None

    def __post_init__(self):
        object.__setattr__(self, "prefix", tuple(self.prefix))
        for n, a in enumerate(self.prefix):
            if not 0 < a < 1:
                raise InvalidTail(f"alpha_{n} = {a!r} is not in (0, 1)")
        t = self.tail
        if t is None:
            return
        m = len(self.prefix)
        if t.kind == "constant":
            if not 0 < t.c < 1:
                raise InvalidTail(f"constant tail {t.c!r} is not in (0, 1)")
        elif t.kind == "power":
            # alpha_n increases with n, so checking n = m suffices
            if not (t.c > 0 and t.p > 0 and t.c / (m + 2) ** t.p < 1):
                raise InvalidTail(f"power tail {t} leaves (0, 1) at n = {m}")
        else:
            raise InvalidTail(f"unknown tail kind {t.kind!r}")

    def alpha(self, n: int):
        if n < len(self.prefix):
            return self.prefix[n]
        if self.tail is None:
            raise EnumerationBudgetExceeded(f"alpha_{n} lies beyond the explicit prefix")
        return self.tail.alpha(n)

    def products(self, n: int) -> list:
        """``[F^(0), ..., F^(n)]`` with ``F^(k) = alpha_0 ... alpha_{k-1}``."""
        out = [1]
        for k in range(n):
            out.append(out[-1] * self.alpha(k))
        return out

    def tail_sum(self, d: int, Fd=None) -> float:
        """Upper bound on ``sum over k > d of F^(k)`` (``inf`` if none known)."""
        if self.tail is None:
            return math.inf
        m = len(self.prefix)
        if d < m:
            F = self.products(m)
            head = sum(F[d + 1:m + 1])
            return head + self.tail_sum(m, F[m])
        if Fd is None:
            Fd = self.products(d)[-1]
        t = self.tail
        if t.kind == "constant":
            return Fd * t.c / (1 - t.c)
        if t.p > 1:
            return math.inf
        c_eff = t.c * (d + 2) ** (1 - t.p)
        if c_eff <= 1:
            return math.inf
        return Fd * (d + 2) / (c_eff - 1)


@dataclass(frozen=True)
class SuccessRuns:
    values: tuple
    classification: Classification
    mu: float | None
    bounds: tuple


def success_runs(params: LevelParams, n: int) -> SuccessRuns:
    """``F^(k) = alpha_0 ... alpha_{k-1}`` for ``k <= n`` with the closed-form
    verdict and ``mu(0) = sum of F^``."""
    if n < 0:
        raise ValueError("n must be nonnegative")
    if params.tail is None and n >= len(params.prefix):
        n_avail = len(params.prefix)
    else:
        n_avail = n
    F = params.products(n_avail)
    partial = sum(F)
    t = params.tail
    if t is None:
        verdict = Verdict.UNDETERMINED
        evidence = "no tail descriptor: numeric bounds only"
    else:
        verdict = t.verdict()
        evidence = f"tail descriptor {t}"
    mu = None
    bounds = (partial, math.inf)
    if verdict == Verdict.POSITIVE_RECURRENT:
        m = len(params.prefix)
        if t.kind == "constant":
            Fm = params.products(m)
            mu = sum(Fm[:m]) + Fm[m] / (1 - t.c)
            bounds = (mu, mu)
        else:
            rest = params.tail_sum(n_avail, F[-1])
            bounds = (partial, partial + rest)
            # only bounds are known for power tails
    cls = Classification(verdict, n_avail, mu, bounds, partial, tuple(F), evidence=evidence)
    return SuccessRuns(tuple(F), cls, mu, bounds)


def success_runs_kernel(params: LevelParams) -> UpwardKernel:
    """The success-runs upward kernel ``P(n, n+1) = alpha_n``, ``P(n, 0) = 1 - alpha_n``."""
    poset = chain_poset()

    def row(n):
        a = params.alpha(n)
        return {n + 1: a, 0: 1 - a}

    verdict = params.tail.verdict() if params.tail is not None else None
    return UpwardKernel(poset, row, name="success-runs",
                        survival_tail=params.tail_sum if params.tail is not None else None,
                        closed_form_verdict=verdict)


def success_runs_reversed(params: LevelParams, depth: int) -> DownwardKernel:
    """Remaining-life kernel obtained by reversing the success-runs chain:
    ``Q(n+1, n) = 1`` and ``Q(0, n) = alpha_0 ... alpha_{n-1} (1 - alpha_n)``."""
    poset = chain_poset()
    F = params.products(depth + 1)
    e_row = {k: F[k] * (1 - params.alpha(k)) for k in range(depth + 1)}
    rows = {0: e_row}
    for k in range(1, depth + 1):
        rows[k] = {k - 1: 1}
    verdict = None
    if params.tail is not None:
        verdict = params.tail.verdict()
        if verdict == Verdict.TRANSIENT:
            raise NotRecurrent("the success-runs chain is transient")

    def moment_tail(d):
        Fd1 = params.products(d + 1)[-1]
        return (d + 1) * Fd1 + params.tail_sum(d)

    return DownwardKernel(poset, rows, e_tail=F[depth + 1], name="remaining-life",
                          moment_tail=moment_tail if params.tail is not None else None,
                          closed_form_verdict=verdict)


# -- level-homogeneous chains on uniform posets -------------------------------

@dataclass(frozen=True)
class UpwardDecomposition:
    """``P(x, y) = alpha_n P+(x, y)`` for ``x`` on level ``n``, and
    ``P(x, e) = 1 - alpha_n`` (``1`` for maximal ``x``).

    ``levels`` maps elements to levels when the poset has no closed form.
    """

    params: LevelParams
    ascent: object  # mapping or callable x -> {y: P+(x, y)}
    poset: Poset
    levels: dict | None = field(default=None, repr=False)

    def ascent_row(self, x) -> dict:
        if callable(self.ascent) and not isinstance(self.ascent, Mapping):
            return dict(self.ascent(x))
        return dict(self.ascent.get(x, {}))

    def level(self, x) -> int:
        lvl = self.poset.level(x)
        return self.levels[x] if lvl is None else lvl


def _levels(poset, depth):
    idx = check_uniform(poset, depth)
    if not isinstance(idx, LevelIndex):
        raise ValidationError(
            f"poset is not uniform: {poset.label(idx.element)!r} has path lengths "
            f"{sorted(idx.lengths)}")
    return idx


def level_homogeneous_kernel(params: LevelParams, ascent, poset: Poset,
                             depth: int | None = None) -> UpwardKernel:
    """Build ``P = alpha_n P+`` on a uniform poset."""
    levels = _levels(poset, None).level if poset.finite else None
    decomp = UpwardDecomposition(params, ascent, poset, levels)
    e = poset.root

    def row(x):
        ups = poset.up_covers(x)
        if not ups:
            return {e: 1}
        a = params.alpha(decomp.level(x))
        plus = decomp.ascent_row(x)
        if set(plus) - set(ups) or abs(sum(plus.values()) - 1) > HOMOGENEITY_ATOL:
            raise ValidationError(f"ascent row at {poset.label(x)!r} is not a distribution on A_x")
        out = {y: a * plus.get(y, 0) for y in ups}
        out[e] = 1 - a
        return out

    if poset.finite:
        rows = {x: row(x) for x in enumerate_poset(poset).order}
        return UpwardKernel(poset, rows, name="level-homogeneous")
    verdict = params.tail.verdict() if params.tail is not None else None
    return UpwardKernel(poset, row, name="level-homogeneous",
                        survival_tail=params.tail_sum if params.tail is not None else None,
                        closed_form_verdict=verdict)


def decompose_level_homogeneous(P: UpwardKernel, depth: int | None = None) -> UpwardDecomposition:
    """Recover ``(alpha, P+)`` from a kernel whose ascent mass is constant on
    each level."""
    poset = P.poset
    e = poset.root
    idx = _levels(poset, depth)
    prefix = []
    ascent = {}
    for n, level in enumerate(idx.level_sets):
        members = sorted(level, key=poset.label)
        masses = {x: 1 - P.row(x).get(e, 0) for x in members}
        x0 = members[0]
        for x in members[1:]:
            if abs(masses[x] - masses[x0]) > HOMOGENEITY_ATOL:
                raise NotLevelHomogeneous((x0, x), (masses[x0], masses[x]))
        a = masses[x0]
        if not poset.up_covers(x0) or a == 0:
            if any(poset.up_covers(x) for x in members):
                raise NotLevelHomogeneous((x0, x0), (a, a))
            break
        if depth is not None and n >= depth:
            break
        prefix.append(a)
        for x in level:
            row = P.row(x)
            ascent[x] = {y: row.get(y, 0) / a for y in poset.up_covers(x)}
    return UpwardDecomposition(LevelParams(tuple(prefix)), ascent, poset, idx.level)


def _ascent_powers(decomp: UpwardDecomposition, depth):
    """Level-by-level ``P+^n(e, .)`` over the enumerated region."""
    poset = decomp.poset
    en = enumerate_poset(poset, depth)
    pi = [{poset.root: 1}]
    for level in en.levels[1:]:
        prev = pi[-1]
        cur = {y: 0 for y in level}
        for x, px in prev.items():
            for y, p in decomp.ascent_row(x).items():
                if y in cur:
                    cur[y] += px * p
        pi.append(cur)
    return en, pi


def _alpha_eff(decomp, n, x):
    return decomp.params.alpha(n) if decomp.poset.up_covers(x) else 0


def level_invariant_F(decomp: UpwardDecomposition, depth: int | None = None) -> InvariantFunction:
    """``F(x) = F^(n) P+^n(e, x)`` for ``x`` on level ``n``."""
    en, pi = _ascent_powers(decomp, depth)
    Fhat = decomp.params.products(len(pi) - 1)
    values = {}
    for n, level in enumerate(pi):
        for x, px in level.items():
            values[x] = Fhat[n] * px
    return InvariantFunction(values, "F", depth, en.complete)


def level_reversed_kernel(decomp: UpwardDecomposition, depth: int | None = None) -> DownwardKernel:
    """Reverse a level-homogeneous chain in closed form:
    ``Q(y, x) = P+^n(e, x) P+(x, y) / P+^{n+1}(e, y)`` and
    ``Q(e, x) = F^(n) (1 - alpha_n) P+^n(e, x)``."""
    params = decomp.params
    if params.tail is not None and params.tail.verdict() == Verdict.TRANSIENT:
        raise NotRecurrent("level chain is transient")
    en, pi = _ascent_powers(decomp, depth)
    Fhat = params.products(len(pi) - 1)
    e = decomp.poset.root
    e_row = {}
    rows = {}
    for n, level in enumerate(pi):
        for x, px in level.items():
            e_row[x] = Fhat[n] * (1 - _alpha_eff(decomp, n, x)) * px
            if n == 0:
                continue
            row = {}
            for w in decomp.poset.down_covers(x):
                row[w] = pi[n - 1][w] * decomp.ascent_row(w).get(x, 0) / px
            rows[x] = row
    rows = {e: e_row, **rows}
    tail = max(1 - sum(e_row.values()), 0)
    return DownwardKernel(decomp.poset, rows, e_tail=tail, name="level-reversed")


# -- positive semigroups ------------------------------------------------------

@dataclass(frozen=True)
class SemigroupSpec:
    """A positive semigroup with canonical element forms.

    ``left_divide(i, x)`` returns ``t`` with ``i t = x`` or ``None``;
    ``right_divide(x, i)`` returns ``w`` with ``w i = x`` or ``None``.
    """

    identity: object
    op: Callable
    irreducibles: tuple
    rates: tuple
    left_divide: Callable
    right_divide: Callable
    contains: Callable
    label: Callable = str
    parse: Callable | None = None
    level: Callable | None = None
    uniform: bool | None = None
    name: str = "semigroup"

    def __post_init__(self):
        object.__setattr__(self, "irreducibles", tuple(self.irreducibles))
        object.__setattr__(self, "rates", tuple(self.rates))
        if len(self.rates) != len(self.irreducibles):
            raise ValidationError("need one rate per irreducible element")
        if any(not r > 0 for r in self.rates):
            raise ValidationError("rates must be positive")
        if not sum(self.rates) < 1:
            raise RatesSumExceedsOne(f"rates sum to {sum(self.rates)!r}")

    @property
    def rate(self):
        return sum(self.rates)

    def rate_of(self, i):
        """Rate of irreducible ``i``; a bare letter names a one-letter word."""
        if i not in self.irreducibles and (i,) in self.irreducibles:
            i = (i,)
        if i not in self.irreducibles:
            raise UnknownElement(i)
        return self.rates[self.irreducibles.index(i)]


def check_semigroup(spec: SemigroupSpec, sample: Sequence) -> None:
    """Check identity, associativity, left cancellation and absence of
    nontrivial inverses on all pairs/triples drawn from ``sample``."""
    op, e = spec.op, spec.identity
    for x in sample:
        if op(e, x) != x or op(x, e) != x:
            raise ValidationError(f"{spec.label(x)!r}: identity law fails")
        for y in sample:
            if op(x, y) == e and (x != e or y != e):
                raise ValidationError(f"nontrivial inverse pair {spec.label(x)!r}, {spec.label(y)!r}")
            for z in sample:
                if op(op(x, y), z) != op(x, op(y, z)):
                    raise ValidationError("associativity fails")
                if y != z and op(x, y) == op(x, z):
                    raise ValidationError(f"left cancellation fails at {spec.label(x)!r}")


def semigroup_poset(spec: SemigroupSpec) -> GeneratedPoset:
    """``x <= y`` iff ``x t = y`` for some ``t``; covers are ``x -> x i``."""

    def down(x):
        out = []
        for i in spec.irreducibles:
            w = spec.right_divide(x, i)
            if w is not None and w not in out:
                out.append(w)
        return out

    return GeneratedPoset(
        spec.identity,
        lambda x: (spec.op(x, i) for i in spec.irreducibles),
        down,
        spec.contains,
        label=spec.label,
        parse=spec.parse,
        level=spec.level,
        uniform=spec.uniform,
        name=spec.name,
    )


def grid_semigroup(rates: Sequence) -> SemigroupSpec:
    """``(N^k, +)`` with irreducibles the unit vectors ``u_1..u_k``."""
    k = len(rates)
    units = tuple(tuple(int(j == i) for j in range(k)) for i in range(k))
    base = grid_poset(k)

    def left_divide(i, x):
        t = tuple(a - b for a, b in zip(x, i))
        return t if min(t) >= 0 else None

    return SemigroupSpec(
        (0,) * k,
        lambda x, y: tuple(a + b for a, b in zip(x, y)),
        units,
        tuple(rates),
        left_divide,
        lambda x, i: left_divide(i, x),
        base.__contains__,
        label=base.label,
        parse=base.parse,
        level=sum,
        uniform=True,
        name=f"grid(k={k})",
    )


def free_semigroup(alphabet: Sequence, rates: Sequence) -> SemigroupSpec:
    """Words over ``alphabet`` under concatenation."""
    base = free_poset(alphabet)
    alphabet = tuple(alphabet)

    def left_divide(i, w):
        return w[1:] if w and w[0] == i[0] else None

    def right_divide(w, i):
        return w[:-1] if w and w[-1] == i[0] else None

    return SemigroupSpec(
        (),
        lambda a, b: a + b,
        tuple((a,) for a in alphabet),
        tuple(rates),
        left_divide,
        right_divide,
        base.__contains__,
        label=base.label,
        parse=base.parse,
        level=len,
        uniform=True,
        name=base.name,
    )


def spatially_homogeneous_kernel(spec: SemigroupSpec, universe_depth: int | None = None) -> UpwardKernel:
    """``P(x, x i) = r_i`` and ``P(x, e) = 1 - sum of r_i``.

    With ``universe_depth`` the rows are materialised for all elements of
    height at most that depth; otherwise they are generated on demand.
    """
    poset = semigroup_poset(spec)
    reset = 1 - spec.rate

    def row(x):
        out = {}
        for i, r in zip(spec.irreducibles, spec.rates):
            y = spec.op(x, i)
            out[y] = out.get(y, 0) + r
        out[spec.identity] = reset
        return out

    rows = row
    if universe_depth is not None:
        rows = {x: row(x) for x in enumerate_poset(poset, universe_depth).order}
    return UpwardKernel(poset, rows, name="spatially-homogeneous", ascent_bound=spec.rate,
                        closed_form_verdict=Verdict.POSITIVE_RECURRENT)


def word_invariant(spec: SemigroupSpec, word: Sequence):
    """``F*(i_1 ... i_n) = r_{i_1} ... r_{i_n}`` on the free semigroup of
    words over the irreducibles."""
    out = 1
    for i in word:
        out *= spec.rate_of(i)
    return out


def factorings(spec: SemigroupSpec, x, max_length: int | None = None) -> tuple:
    """All words ``i_1 ... i_n`` over the irreducibles with product ``x``."""
    memo = {}

    def walk(y, budget):
        if y == spec.identity:
            return ((),)
        if budget == 0:
            raise EnumerationBudgetExceeded(f"factorings of {spec.label(x)!r} exceed the length budget")
        if y in memo:
            return memo[y]
        out = []
        for i in spec.irreducibles:
            t = spec.left_divide(i, y)
            if t is not None:
                out.extend((i,) + w for w in walk(t, None if budget is None else budget - 1))
        memo[y] = tuple(out)
        return memo[y]

    return walk(x, max_length)


def semigroup_invariant_F(spec: SemigroupSpec, x, depth: int | None = None):
    """``F(x)`` as the sum of ``F*`` over all factorings of ``x``."""
    return sum(word_invariant(spec, w) for w in factorings(spec, x, depth))


# -- the grid N^k -------------------------------------------------------------

def _check_rates(rates):
    rates = tuple(rates)
    if not rates or any(not r > 0 for r in rates):
        raise ValidationError("rates must be positive")
    if not sum(rates) < 1:
        raise RatesSumExceedsOne(f"rates sum to {sum(rates)!r}")
    return rates


def multinomial(x: Sequence[int]) -> int:
    """Number of factorings of ``x`` over the unit vectors."""
    out = math.factorial(sum(x))
    for c in x:
        out //= math.factorial(c)
    return out


@dataclass(frozen=True)
class GridClosedForms:
    C: int
    F: object
    f: object


def grid_closed_forms(k: int, rates: Sequence, x: Sequence[int]) -> GridClosedForms:
    """``C(x)``, ``F(x) = C(x) prod r_i^{x_i}`` and ``f(x) = (1 - r) F(x)``.

    Exact when the rates are :class:`~fractions.Fraction` values.
    """
    rates = _check_rates(rates)
    x = tuple(x)
    if len(rates) != k or len(x) != k or any(c < 0 for c in x):
        raise ValidationError("point and rates must have k nonnegative entries")
    C = multinomial(x)
    F = C
    for r, c in zip(rates, x):
        F = F * r ** c
    return GridClosedForms(C, F, (1 - sum(rates)) * F)


def grid_downward(x: Sequence[int], i: int) -> Fraction:
    """``Q(x, x - u_i) = x_i / sum of x`` (``i`` counts from 1)."""
    x = tuple(x)
    if not 1 <= i <= len(x):
        raise ValidationError(f"coordinate index {i} out of range 1..{len(x)}")
    total = sum(x)
    if total == 0:
        raise ZeroPoint("the origin has no downward move")
    return Fraction(x[i - 1], total)


@dataclass(frozen=True)
class GeometricMarginal:
    """Law of coordinate ``i`` under the invariant pdf:
    ``P(Z_i = n) = parameter * ratio**n``.

    ``printed`` is the alternative expression ``1 - r_i / sum_{j != i} r_j``;
    ``consistent`` records whether it agrees with ``parameter``.
    """

    i: int
    parameter: object
    ratio: object
    printed: object
    consistent: bool
    flags: tuple = field(default=())

    def pmf(self, n: int):
        return self.parameter * self.ratio ** n


def grid_marginal(i: int, rates: Sequence) -> GeometricMarginal:
    """Geometric law of ``Z_i`` (``i`` counts from 1).

    Summing the invariant pdf over the other coordinates gives ratio
    ``r_i / (1 - sum_{j != i} r_j)``.
    """
    rates = _check_rates(rates)
    if not 1 <= i <= len(rates):
        raise ValidationError(f"coordinate index {i} out of range 1..{len(rates)}")
    ri = rates[i - 1]
    others = sum(rates) - ri
    ratio = ri / (1 - others)
    parameter = 1 - ratio
    printed = 1 - ri / others if others else None
    consistent = printed is not None and abs(printed - parameter) <= 1e-12
    flags = () if consistent else ("printed_formula_inconsistent",)
    return GeometricMarginal(i, parameter, ratio, printed, consistent, flags)


def grid_marginal_bruteforce(i: int, rates: Sequence, n: int, max_level: int) -> float:
    """``sum of f(x)`` over grid points with ``x_i = n`` whose other
    coordinates sum to at most ``max_level``."""
    rates = _check_rates(rates)
    k = len(rates)
    ri = rates[i - 1]
    rest = [r for j, r in enumerate(rates) if j != i - 1]
    reset = 1 - sum(rates)
    total = 0.0
    for m in range(max_level + 1):
        # sum over the other coordinates with total m of C(x) prod r^x
        for combo in _compositions(m, k - 1):
            x_other = combo
            C = math.comb(n + m, n) * multinomial(x_other)
            w = C * ri ** n
            for r, c in zip(rest, x_other):
                w *= r ** c
            total += reset * w
    return total


def _compositions(m, parts):
    if parts == 0:
        if m == 0:
            yield ()
        return
    if parts == 1:
        yield (m,)
        return
    for a in range(m + 1):
        for tail in _compositions(m - a, parts - 1):
            yield (a,) + tail


def grid_kernel(rates: Sequence, universe_depth: int | None = None) -> UpwardKernel:
    """Spatially homogeneous upward kernel on ``N^k`` with ``P(x, x + u_i) = r_i``."""
    return spatially_homogeneous_kernel(grid_semigroup(_check_rates(rates)), universe_depth)
