"""Regular rooted metric trees and their branching functions.

A regular tree is determined by the distances ``t_k`` of its vertex
generations from the root together with the branching numbers ``b_k``
(with ``t_0 = 0`` and ``b_0 = 1``).  The first branching function

    g_0(t) = b_0 b_1 ... b_k   on  (t_k, t_{k+1}]

counts the points of the tree at distance ``t`` from the root; the
higher branching functions ``g_k`` count points of a subtree rooted at
generation ``k`` and use left-closed pieces ``[t_n, t_{n+1})``.

Infinite trees are described by a finite generation listing plus a tail
rule.  Only periodic and homogeneous tails admit exact reduced-height
certification; a tree without a tail rule keeps its last branching
value forever (its final edges extend to infinity), which makes it
recurrent.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterator

__all__ = [
    "TreeSpecError",
    "Homogeneous",
    "Periodic",
    "RegularTreeSpec",
    "BranchingFunction",
    "homogeneous_tree",
    "ray",
    "branching_value",
    "reduced_height",
    "global_dimension_bounds",
]

DIVERGENT = math.inf


class TreeSpecError(ValueError):
    """Raised when a tree description violates the regularity rules."""


@dataclass(frozen=True)
class Homogeneous:
    """Tail rule: every further generation has branching ``b`` and edge length ``length``."""

    b: int
    length: float


@dataclass(frozen=True)
class Periodic:
    """Tail rule: the last ``period`` listed generations repeat forever."""

    period: int


@dataclass(frozen=True)
class RegularTreeSpec:
    """Generation data ``(edge_length, branching)`` plus a tail rule.

    ``generations[k-1] = (l_k, b_k)`` gives the edge length of generation
    ``k`` (so ``t_k = l_1 + ... + l_k``) and the branching number at the
    vertices of distance ``t_k``.  ``tail`` is ``Homogeneous``, ``Periodic``
    or ``None`` (finite listing; edges of the last generation extend to
    infinity without further branching).
    """

    generations: tuple[tuple[float, int], ...] = ()
    tail: Homogeneous | Periodic | None = None

    def __post_init__(self):
        gens = tuple((float(l), int(b)) for l, b in self.generations)
        object.__setattr__(self, "generations", gens)
        for i, (l, b) in enumerate(gens):
            if not (l > 0 and math.isfinite(l)):
                raise TreeSpecError(f"generation {i + 1}: edge length must be positive, got {l}")
            if b < 2:
                raise TreeSpecError(
                    f"generation {i + 1}: branching must be >= 2 (every vertex other "
                    f"than the root branches), got {b}"
                )
        if isinstance(self.tail, Periodic):
            if not (1 <= self.tail.period <= len(gens)):
                raise TreeSpecError(
                    f"periodic tail needs 1 <= period <= number of listed generations, "
                    f"got period={self.tail.period} with {len(gens)} generations"
                )
        elif isinstance(self.tail, Homogeneous):
            if self.tail.b < 2:
                raise TreeSpecError(f"homogeneous tail branching must be >= 2, got {self.tail.b}")
            if not (self.tail.length > 0 and math.isfinite(self.tail.length)):
                raise TreeSpecError(f"homogeneous tail edge length must be positive, got {self.tail.length}")
        elif self.tail is not None:
            raise TreeSpecError(f"unknown tail rule {self.tail!r}")

    # -- structure ---------------------------------------------------------

    @property
    def transient(self) -> bool:
        """True iff the tree has finite reduced height (certified from the tail rule)."""
        return self.tail is not None

    def tail_pattern(self) -> tuple[tuple[float, int], ...] | None:
        """The repeating (length, branching) pattern of the tail, or None."""
        if isinstance(self.tail, Homogeneous):
            return ((self.tail.length, self.tail.b),)
        if isinstance(self.tail, Periodic):
            return self.generations[-self.tail.period :]
        return None

    def explicit_vertices(self) -> list[float]:
        """Distances t_1 < t_2 < ... of the listed vertex generations."""
        out, t = [], 0.0
        for l, _ in self.generations:
            t += l
            out.append(t)
        return out

    def pieces(self, upto: float) -> Iterator[tuple[float, float, float]]:
        """Yield ``(t_left, t_right, g0)`` pieces covering ``[0, upto]``.

        The tail rule is unrolled as far as needed; for a finite listing
        the last value extends to infinity.
        """
        t, g = 0.0, 1.0
        for l, b in self.generations:
            if t >= upto:
                return
            yield t, t + l, g
            t, g = t + l, g * b
        pattern = self.tail_pattern()
        if pattern is None:
            if t < upto:
                yield t, math.inf, g
            return
        while t < upto:
            for l, b in pattern:
                if t >= upto:
                    return
                yield t, t + l, g
                t, g = t + l, g * b

    def g0(self, t: float) -> float:
        """Evaluate g_0 with the right-closed convention ``(t_k, t_{k+1}]``; g0(0) = 1."""
        return branching_value(self, 0, t)


def homogeneous_tree(b: int, length: float = 1.0) -> RegularTreeSpec:
    """All edges of length ``length``, all branching numbers ``b``."""
    return RegularTreeSpec((), Homogeneous(b, length))


def ray() -> RegularTreeSpec:
    """The halfline: no vertices at all, g_0 identically 1 (recurrent)."""
    return RegularTreeSpec((), None)


def _generation_bounds(tree: RegularTreeSpec, n_max: int) -> tuple[list[float], list[int]]:
    """Vertex distances t_0..t_n and branchings b_1..b_n, unrolling the tail to n_max."""
    ts = [0.0]
    bs: list[int] = []
    for l, b in tree.generations:
        ts.append(ts[-1] + l)
        bs.append(b)
    pattern = tree.tail_pattern()
    if pattern is not None:
        i = 0
        while len(bs) < n_max:
            l, b = pattern[i % len(pattern)]
            ts.append(ts[-1] + l)
            bs.append(b)
            i += 1
    return ts, bs


def branching_value(tree: RegularTreeSpec, k: int, t: float) -> float:
    """Evaluate the k-th branching function g_k at t.

    ``g_0`` uses right-closed pieces ``(t_j, t_{j+1}]`` (with ``g_0(0) = 1``);
    ``g_k`` with ``k >= 1`` vanishes for ``t < t_k``, equals 1 on
    ``[t_k, t_{k+1})`` and ``b_{k+1}...b_n`` on ``[t_n, t_{n+1})``.
    Values are returned as floats since products of branchings grow fast.
    """
    if k < 0:
        raise ValueError(f"branching function index must be >= 0, got {k}")
    if not math.isfinite(t) or t < 0:
        raise ValueError(f"evaluation point must be finite and >= 0, got {t}")
    # Unroll enough generations to cover t.  For a finite listing the last
    # value extends to infinity (the final edges never branch again).
    n = len(tree.generations)
    pattern = tree.tail_pattern()
    if pattern is not None:
        pat_len = sum(l for l, _ in pattern)
        t_listed = sum(l for l, _ in tree.generations)
        n += max(0, math.ceil((t - t_listed) / pat_len)) + 1
    n = max(n, k + 1)
    ts, bs = _generation_bounds(tree, n)

    if k == 0:
        if t == 0.0:
            return 1.0
        g = 1.0
        for j in range(len(bs)):
            if t <= ts[j + 1]:
                return g
            g *= bs[j]
        return g  # beyond the listing of a finite tree
    if k > len(bs):
        raise TreeSpecError(f"tree has no generation {k} (only {len(bs)} resolvable)")
    if t < ts[k]:
        return 0.0
    # left-closed pieces: on [t_n, t_{n+1}) the value is b_{k+1}...b_n
    g, n = 1.0, k
    while n + 1 <= len(bs) and t >= ts[n + 1]:
        g *= bs[n]  # bs[n] is b_{n+1} in 1-based labels
        n += 1
    return g


def reduced_height(tree: RegularTreeSpec, tol: float = 0.0) -> float:
    """Exact value of the integral of 1/g_0 over [0, inf), or ``math.inf``.

    The explicit part is a finite sum of ``length/g`` terms; a periodic or
    homogeneous tail contributes a geometric series summed in closed form
    (each period divides g by at least 2), so the result carries no
    truncation error and ``tol`` is never consumed.  A tree without a tail
    rule keeps g_0 constant beyond its listing and is recurrent.
    """
    total, g = 0.0, 1.0
    for l, b in tree.generations:
        total += l / g
        g *= b
    pattern = tree.tail_pattern()
    if pattern is None:
        return DIVERGENT
    first_period, gg = 0.0, g
    beta = 1.0
    for l, b in pattern:
        first_period += l / gg
        gg *= b
        beta *= b
    # sum over periods m >= 0 of first_period * beta^{-m}
    total += first_period * beta / (beta - 1.0)
    return total


def global_dimension_bounds(
    tree: RegularTreeSpec, d: float, horizon: float
) -> tuple[float, float]:
    """inf and sup of ``g_0(t) / (1+t)^{d-1}`` over ``[0, horizon]``.

    On each constant piece of g_0 the ratio is monotone, so the extrema
    are attained at piece endpoints (left limits included).
    """
    if d <= 1:
        raise ValueError(f"global dimension must exceed 1, got {d}")
    if horizon <= 0:
        raise ValueError(f"horizon must be positive, got {horizon}")
    lo, hi = math.inf, 0.0
    for a, b, g in tree.pieces(horizon):
        right = min(b, horizon)
        for t in (a, right):
            r = g / (1.0 + t) ** (d - 1.0)
            lo, hi = min(lo, r), max(hi, r)
        if b >= horizon:
            break
    return lo, hi


class BranchingFunction:
    """Callable view of one branching function g_k of a tree."""

    def __init__(self, tree: RegularTreeSpec, k: int = 0):
        if k < 0:
            raise ValueError("index must be >= 0")
        self.tree = tree
        self.k = k

    def __call__(self, t: float) -> float:
        return branching_value(self.tree, self.k, t)

    def start(self) -> float:
        """Left end of the support: t_k (0 for g_0)."""
        if self.k == 0:
            return 0.0
        ts, _ = _generation_bounds(self.tree, self.k + 1)
        if self.k >= len(ts):
            raise TreeSpecError(f"tree has no generation {self.k}")
        return ts[self.k]

    def pieces(self, upto: float) -> Iterator[tuple[float, float, float]]:
        """Constant pieces ``(left, right, value)`` of g_k covering ``[start, upto]``."""
        if self.k == 0:
            yield from self.tree.pieces(upto)
            return
        t0 = self.start()
        if upto <= t0:
            return
        scale = None
        for a, b, g in self.tree.pieces(upto):
            if b <= t0:
                continue
            if scale is None:
                scale = g  # g_0 on the first piece past t_k equals b_0...b_k
            if a >= upto:
                return
            yield max(a, t0), b, g / scale
