"""Discrete posets represented through their covering (Hasse) graphs.

A poset here always has a minimum element ``root`` and finite chains from the
root to every element.  Two concrete representations are provided:

* :class:`FinitePoset` -- an explicit, validated covering graph.
* :class:`GeneratedPoset` -- a lazily generated covering graph given by pure
  functions ``up(x)`` and ``down(x)``; used for infinite posets such as the
  grid ``N^k`` or the free semigroup on an alphabet.

Infinite posets are only ever analysed up to an explicit depth.  The depth of
an element is its *height*: the length of the longest covering path from the
root.  Elements of height at most ``depth`` form a down-closed set, so every
recursion that runs upward from the root is exact on it.
"""

from __future__ import annotations

import graphlib
from dataclasses import dataclass
from typing import Callable, Hashable, Iterable, Sequence

from .errors import (
    Cycle,
    EnumerationBudgetExceeded,
    NoUniqueMinimum,
    NonCoverEdge,
    UnknownElement,
    Unreachable,
    ValidationError,
)

DEFAULT_MAX_ELEMENTS = 250_000

Element = Hashable


class Poset:
    """Interface shared by all covering-graph posets."""

    root: Element
    finite: bool = False
    #: True when every element is known (by construction) to have paths of a
    #: single length from the root; ``None`` means "not known".
    uniform: bool | None = None

    def up_covers(self, x) -> tuple:
        """Return ``A_x``, the elements covering ``x``."""
        raise NotImplementedError

    def down_covers(self, x) -> tuple:
        """Return ``B_x``, the elements covered by ``x``."""
        raise NotImplementedError

    def __contains__(self, x) -> bool:
        raise NotImplementedError

    def label(self, x) -> str:
        return str(x)

    def parse(self, text: str):
        raise NotImplementedError

    def level(self, x) -> int | None:
        """Closed-form level of ``x`` when the poset knows it, else ``None``."""
        return None

    def check(self, x):
        if x not in self:
            raise UnknownElement(x)
        return x


class FinitePoset(Poset):
    """A finite poset given by its elements and its cover edges.

    Construction validates the structure; an invalid input raises one of
    :class:`Cycle`, :class:`NoUniqueMinimum`, :class:`Unreachable`,
    :class:`NonCoverEdge` or :class:`UnknownElement`.
    """

    finite = True

    def __init__(self, elements: Sequence, cover_edges: Iterable[Sequence], root=None):
        elements = tuple(elements)
        if not elements:
            raise ValidationError("a poset needs at least one element")
        if len(set(elements)) != len(elements):
            raise ValidationError("duplicate elements")
        known = set(elements)
        up = {x: [] for x in elements}
        down = {x: [] for x in elements}
        edges = []
        for edge in cover_edges:
            x, y = edge
            for z in (x, y):
                if z not in known:
                    raise UnknownElement(z)
            if x == y:
                raise Cycle(f"self-loop at {x!r}")
            if y in up[x]:
                continue
            up[x].append(y)
            down[y].append(x)
            edges.append((x, y))

        sorter = graphlib.TopologicalSorter({y: down[y] for y in elements})
        try:
            topo = tuple(sorter.static_order())
        except graphlib.CycleError as exc:
            raise Cycle(f"covering graph has a cycle through {exc.args[1]!r}") from None

        sources = [x for x in elements if not down[x]]
        if root is None:
            if len(sources) != 1:
                raise NoUniqueMinimum(f"elements without predecessors: {sources!r}")
            root = sources[0]
        else:
            if root not in known:
                raise UnknownElement(root)
            if down[root]:
                raise NoUniqueMinimum(f"declared root {root!r} has predecessors")
            stray = [x for x in sources if x != root]
            if stray:
                raise Unreachable(f"not reachable from {root!r}: {stray!r}")

        # descendants (strict) in reverse topological order
        below = {}
        for x in reversed(topo):
            acc = set()
            for y in up[x]:
                acc.add(y)
                acc |= below[y]
            below[x] = acc
        for x, y in edges:
            for z in up[x]:
                if z != y and y in below[z]:
                    raise NonCoverEdge((x, y), _witness_path(up, below, x, z, y))

        height = {}
        for x in topo:
            height[x] = 1 + max((height[w] for w in down[x]), default=-1)

        self.root = root
        self.elements = elements
        self.edges = tuple(edges)
        self._up = {x: tuple(v) for x, v in up.items()}
        self._down = {x: tuple(v) for x, v in down.items()}
        self._height = height
        self._by_label = {str(x): x for x in elements}

    def up_covers(self, x) -> tuple:
        try:
            return self._up[x]
        except (KeyError, TypeError):
            raise UnknownElement(x) from None

    def down_covers(self, x) -> tuple:
        try:
            return self._down[x]
        except (KeyError, TypeError):
            raise UnknownElement(x) from None

    def __contains__(self, x) -> bool:
        try:
            return x in self._up
        except TypeError:
            return False

    def __len__(self) -> int:
        return len(self.elements)

    def __iter__(self):
        return iter(self.elements)

    def parse(self, text: str):
        try:
            return self._by_label[text]
        except KeyError:
            raise UnknownElement(text) from None

    def height(self, x) -> int:
        return self._height[self.check(x)]

    @property
    def is_tree(self) -> bool:
        return all(len(self._down[x]) == 1 for x in self.elements if x != self.root)

    def __repr__(self):
        return f"FinitePoset({len(self.elements)} elements, {len(self.edges)} covers)"


def _witness_path(up, below, x, z, y):
    path = [x, z]
    while path[-1] != y:
        cur = path[-1]
        for w in up[cur]:
            if w == y or y in below[w]:
                path.append(w)
                break
    return tuple(path)


def validate_finite_poset(elements, cover_edges, root=None) -> FinitePoset:
    """Validate an explicit covering graph and return the poset."""
    return FinitePoset(elements, cover_edges, root=root)


class GeneratedPoset(Poset):
    """A (possibly infinite) poset described by pure cover functions."""

    def __init__(
        self,
        root,
        up: Callable[[Element], Iterable],
        down: Callable[[Element], Iterable],
        contains: Callable[[Element], bool],
        *,
        label: Callable[[Element], str] = str,
        parse: Callable[[str], Element] | None = None,
        level: Callable[[Element], int] | None = None,
        uniform: bool | None = None,
        name: str = "generated",
    ):
        self.root = root
        self._up = up
        self._down = down
        self._contains = contains
        self._label = label
        self._parse = parse
        self._level = level
        self.uniform = uniform
        self.name = name

    def up_covers(self, x) -> tuple:
        return tuple(self._up(self.check(x)))

    def down_covers(self, x) -> tuple:
        return tuple(self._down(self.check(x)))

    def __contains__(self, x) -> bool:
        try:
            return bool(self._contains(x))
        except (TypeError, ValueError):
            return False

    def label(self, x) -> str:
        return self._label(x)

    def parse(self, text: str):
        if self._parse is None:
            raise NotImplementedError(f"{self.name} poset cannot parse labels")
        x = self._parse(text)
        return self.check(x)

    def level(self, x) -> int | None:
        return None if self._level is None else self._level(x)

    def __repr__(self):
        return f"GeneratedPoset({self.name})"


def grid_poset(k: int) -> GeneratedPoset:
    """The grid ``N^k`` ordered coordinatewise; covers add one unit vector."""
    if k < 1:
        raise ValidationError("grid dimension must be at least 1")

    def up(x):
        return (x[:i] + (x[i] + 1,) + x[i + 1:] for i in range(k))

    def down(x):
        return (x[:i] + (x[i] - 1,) + x[i + 1:] for i in range(k) if x[i] > 0)

    def contains(x):
        return (
            isinstance(x, tuple)
            and len(x) == k
            and all(isinstance(c, int) and not isinstance(c, bool) and c >= 0 for c in x)
        )

    def parse(text):
        return tuple(int(c) for c in text.split(","))

    return GeneratedPoset(
        (0,) * k, up, down, contains,
        label=lambda x: ",".join(map(str, x)),
        parse=parse,
        level=sum,
        uniform=True,
        name=f"grid(k={k})",
    )


def free_poset(alphabet: Sequence) -> GeneratedPoset:
    """Words over ``alphabet`` ordered by prefix (the free semigroup order).

    Words are tuples of letters; the empty word is the root and renders as
    ``"e"``.  Letters render with ``str`` and are joined with ``"."``.
    """
    alphabet = tuple(alphabet)
    if not alphabet:
        raise ValidationError("alphabet must be nonempty")
    names = [str(a) for a in alphabet]
    if len(set(names)) != len(names) or any(n == "e" or "." in n or not n for n in names):
        raise ValidationError("letters need distinct nonempty labels other than 'e' without '.'")
    letters = set(alphabet)
    by_name = dict(zip(names, alphabet))

    def parse(text):
        if text == "e":
            return ()
        try:
            return tuple(by_name[part] for part in text.split("."))
        except KeyError as exc:
            raise UnknownElement(text) from exc

    return GeneratedPoset(
        (),
        lambda w: (w + (a,) for a in alphabet),
        lambda w: (w[:-1],) if w else (),
        lambda w: isinstance(w, tuple) and all(a in letters for a in w),
        label=lambda w: ".".join(map(str, w)) if w else "e",
        parse=parse,
        level=len,
        uniform=True,
        name=f"free({','.join(names)})",
    )


def tree_poset(children: dict, root=None) -> FinitePoset:
    """Build a finite rooted tree from a ``parent -> [children]`` mapping."""
    elements = []
    seen = set()
    for parent, kids in children.items():
        for z in (parent, *kids):
            if z not in seen:
                seen.add(z)
                elements.append(z)
    if root is not None and root not in seen:
        elements.insert(0, root)
    edges = [(p, c) for p, kids in children.items() for c in kids]
    poset = FinitePoset(elements, edges, root=root)
    if not poset.is_tree:
        bad = [x for x in poset.elements if len(poset.down_covers(x)) > 1]
        raise ValidationError(f"not a tree: {bad!r} have several parents")
    return poset


# -- enumeration ------------------------------------------------------------

@dataclass(frozen=True)
class Enumeration:
    """Elements of height at most ``depth``, in topological order.

    ``complete`` is true when no element of the poset lies beyond the
    enumerated region, i.e. the whole poset was enumerated.
    """

    poset: Poset
    depth: int | None
    order: tuple
    height: dict
    levels: tuple
    complete: bool

    def __contains__(self, x):
        return x in self.height

    def __iter__(self):
        return iter(self.order)

    def __len__(self):
        return len(self.order)


def enumerate_poset(poset: Poset, depth: int | None = None,
                    max_elements: int = DEFAULT_MAX_ELEMENTS) -> Enumeration:
    """Enumerate every element of height ``<= depth`` (all of a finite poset
    when ``depth`` is None)."""
    if depth is None and not poset.finite:
        raise EnumerationBudgetExceeded("an infinite poset needs an explicit depth")
    if depth is not None and depth < 0:
        raise ValueError("depth must be nonnegative")
    height = {poset.root: 0}
    levels = [(poset.root,)]
    h = 0
    while depth is None or h < depth:
        h += 1
        new = []
        for x in levels[-1]:
            for y in poset.up_covers(x):
                if y in height:
                    continue
                # every lower cover must sit on an earlier level
                if all(height.get(w, h) < h for w in poset.down_covers(y)):
                    height[y] = h
                    new.append(y)
        if len(height) > max_elements:
            raise EnumerationBudgetExceeded(
                f"more than {max_elements} elements below height {h}")
        if not new:
            break
        levels.append(tuple(new))
    complete = all(y in height for x in height for y in poset.up_covers(x))
    order = tuple(x for level in levels for x in level)
    return Enumeration(poset, depth, order, height, tuple(levels), complete)


def truncate(poset: Poset, depth: int | None = None,
             max_elements: int = DEFAULT_MAX_ELEMENTS) -> FinitePoset:
    """The finite down-closed subposet of elements with height ``<= depth``."""
    en = enumerate_poset(poset, depth, max_elements)
    edges = [(x, y) for x in en.order for y in poset.up_covers(x) if y in en.height]
    sub = FinitePoset(en.order, edges, root=poset.root)
    sub.label = poset.label  # keep the parent's rendering
    return sub


# -- uniformity ---------------------------------------------------------------

@dataclass(frozen=True)
class LevelIndex:
    level: dict
    level_sets: tuple
    depth: int | None

    def __getitem__(self, n):
        return self.level_sets[n]


@dataclass(frozen=True)
class NonUniformWitness:
    element: Element
    lengths: frozenset


def path_lengths(poset: Poset, depth: int | None = None,
                 max_elements: int = DEFAULT_MAX_ELEMENTS) -> dict:
    """Map each enumerated element to the set of lengths of paths from the root."""
    en = enumerate_poset(poset, depth, max_elements)
    lengths = {poset.root: frozenset({0})}
    for y in en.order[1:]:
        lengths[y] = frozenset(n + 1 for w in poset.down_covers(y) for n in lengths[w])
    return lengths


def check_uniform(poset: Poset, depth: int | None = None,
                  max_elements: int = DEFAULT_MAX_ELEMENTS):
    """Return a :class:`LevelIndex` if all paths to each enumerated element
    have one length, else a :class:`NonUniformWitness`."""
    en = enumerate_poset(poset, depth, max_elements)
    lengths = path_lengths(poset, depth, max_elements)
    for x in en.order:
        if len(lengths[x]) > 1:
            return NonUniformWitness(x, lengths[x])
    return LevelIndex(dict(en.height), tuple(frozenset(s) for s in en.levels), depth)


# -- paths ------------------------------------------------------------------

@dataclass(frozen=True)
class Path:
    """A covering path from the root, identified by its vertex sequence."""

    vertices: tuple

    @property
    def end(self):
        """The endpoint ``m(a)``."""
        return self.vertices[-1]

    @property
    def length(self) -> int:
        return len(self.vertices) - 1

    @property
    def parent(self) -> "Path":
        """The path with its endpoint removed."""
        if len(self.vertices) == 1:
            raise ValueError("the degenerate path has no parent")
        return Path(self.vertices[:-1])

    def extend(self, y) -> "Path":
        return Path(self.vertices + (y,))

    def is_prefix_of(self, other: "Path") -> bool:
        n = len(self.vertices)
        return other.vertices[:n] == self.vertices

    def __repr__(self):
        return "Path(" + "·".join(map(str, self.vertices)) + ")"


def enumerate_paths_to(poset: Poset, x) -> tuple:
    """All covering paths from the root to ``x``."""
    poset.check(x)
    memo = {poset.root: (Path((poset.root,)),)}

    def walk(y):
        if y not in memo:
            memo[y] = tuple(p.extend(y) for w in poset.down_covers(y) for p in walk(w))
        return memo[y]

    return walk(x)


class PathSpace(Poset):
    """The rooted tree of covering paths of ``base``, ordered by prefix."""

    uniform = True

    def __init__(self, base: Poset):
        self.base = base
        self.root = Path((base.root,))
        self.finite = base.finite

    def up_covers(self, a: Path) -> tuple:
        self.check(a)
        return tuple(a.extend(y) for y in self.base.up_covers(a.end))

    def down_covers(self, a: Path) -> tuple:
        self.check(a)
        return (a.parent,) if a.length else ()

    def __contains__(self, a) -> bool:
        if not isinstance(a, Path) or a.vertices[0] != self.base.root:
            return False
        v = a.vertices
        try:
            return all(v[i + 1] in self.base.up_covers(v[i]) for i in range(len(v) - 1))
        except UnknownElement:
            return False

    def label(self, a: Path) -> str:
        return "/".join(self.base.label(v) for v in a.vertices)

    def parse(self, text: str) -> Path:
        return self.check(Path(tuple(self.base.parse(t) for t in text.split("/"))))

    def level(self, a: Path) -> int:
        return a.length

    def endpoint(self, a: Path):
        return a.end

    def __repr__(self):
        return f"PathSpace({self.base!r})"


def path_space(poset: Poset) -> PathSpace:
    return PathSpace(poset)


def down_set(poset: Poset, x) -> frozenset:
    """``{t : t <= x}``; its size is ``len(down_set(...))``."""
    poset.check(x)
    seen = {x}
    stack = [x]
    while stack:
        for w in poset.down_covers(stack.pop()):
            if w not in seen:
                seen.add(w)
                stack.append(w)
    return frozenset(seen)


def up_sets(poset: Poset, en: Enumeration) -> dict:
    """``{y in en : y >= x}`` for every enumerated ``x``."""
    ups = {}
    for x in reversed(en.order):
        acc = {x}
        for y in poset.up_covers(x):
            if y in en.height:
                acc |= ups[y]
        ups[x] = frozenset(acc)
    return ups


def is_tree(poset: Poset, en: Enumeration | None = None) -> bool:
    if isinstance(poset, PathSpace):
        return True
    elements = en.order if en is not None else poset
    return all(len(poset.down_covers(x)) == 1 for x in elements if x != poset.root)
