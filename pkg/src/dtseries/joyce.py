"""Joyce's wall-crossing coefficients S and U for the pair (H0, F+), and tree enumeration."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations
from math import factorial
from typing import Iterator, List, Sequence, Tuple

from .geometry import SheafClass, slope_fplus, slope_h0

MAX_VERTICES = 7


@dataclass(frozen=True)
class Tree:
    m: int
    edges: Tuple[Tuple[int, int], ...]

    def __post_init__(self):
        check_tree(self.m, self.edges)


@dataclass(frozen=True)
class Digraph:
    vertices: Tuple[int, ...]
    edges: Tuple[Tuple[int, int], ...]

    def __post_init__(self):
        for i, j in self.edges:
            if i > j:
                raise ValueError(f"edge {i}->{j} points downwards")
            if i not in self.vertices or j not in self.vertices:
                raise ValueError(f"edge {i}->{j} leaves the vertex set")


def check_tree(m: int, edges) -> None:
    if m < 1:
        raise ValueError("a tree needs at least one vertex")
    if len(edges) != m - 1:
        raise ValueError(f"a tree on {m} vertices has {m - 1} edges, got {len(edges)}")
    parent = list(range(m + 1))

    def find(a):
        while parent[a] != a:
            parent[a] = parent[parent[a]]
            a = parent[a]
        return a

    for i, j in edges:
        if not (1 <= i < j <= m):
            raise ValueError(f"bad edge {i}->{j}")
        a, b = find(i), find(j)
        if a == b:
            raise ValueError("edges contain a cycle")
        parent[a] = b


def trees(m: int, max_vertices: int = MAX_VERTICES) -> List[Tree]:
    """All labelled trees on ``1..m`` with edges oriented upwards, in lexicographic edge order."""
    if m < 1:
        raise ValueError("m must be positive")
    if m > max_vertices:
        raise ValueError(f"m = {m} exceeds the configured maximum {max_vertices}")
    all_edges = list(combinations(range(1, m + 1), 2))
    out = []
    for chosen in combinations(all_edges, m - 1):
        parent = list(range(m + 1))

        def find(a):
            while parent[a] != a:
                parent[a] = parent[parent[a]]
                a = parent[a]
            return a

        ok = True
        for i, j in chosen:
            a, b = find(i), find(j)
            if a == b:
                ok = False
                break
            parent[a] = b
        if ok:
            out.append(Tree(m, tuple(chosen)))
    return out


def compositions(n: int, parts: int | None = None) -> Iterator[Tuple[int, ...]]:
    """Ordered compositions of ``n``; all lengths, or only ``parts`` long ones."""
    if n == 0:
        if parts in (None, 0):
            yield ()
        return
    if parts == 0:
        return
    for first in range(1, n + 1):
        rest = None if parts is None else parts - 1
        for tail in compositions(n - first, rest):
            yield (first,) + tail


def blocks(sizes: Sequence[int]) -> List[List[int]]:
    """Consecutive index blocks (0-based) of a composition."""
    out, start = [], 0
    for s in sizes:
        out.append(list(range(start, start + s)))
        start += s
    return out


def _sum(classes: Sequence[SheafClass]) -> SheafClass:
    total = classes[0]
    for c in classes[1:]:
        total = total + c
    return total


def s_coeff(classes: Sequence[SheafClass]) -> int:
    if not classes:
        raise ValueError("s_coeff needs a nonempty list")
    m = len(classes)
    k = 0
    for i in range(m - 1):
        left = slope_fplus(_sum(classes[: i + 1]))
        right = slope_fplus(_sum(classes[i + 1:]))
        a, b = slope_h0(classes[i]), slope_h0(classes[i + 1])
        if a <= b and left > right:
            k += 1
        elif a > b and left <= right:
            pass
        else:
            return 0
    return -1 if k % 2 else 1


def u_coeff(classes: Sequence[SheafClass], max_vertices: int = MAX_VERTICES) -> Fraction:
    if not classes:
        raise ValueError("u_coeff needs a nonempty list")
    m = len(classes)
    if m > max_vertices:
        raise ValueError(f"{m} classes exceed the configured maximum {max_vertices}")
    total = Fraction(0)
    for sizes in compositions(m):
        fibers = blocks(sizes)
        if any(len({slope_h0(classes[j]) for j in fib}) > 1 for fib in fibers):
            continue
        ups = [_sum([classes[j] for j in fib]) for fib in fibers]
        weight = Fraction(1)
        for fib in fibers:
            weight /= factorial(len(fib))
        for outer in compositions(len(ups)):
            groups = blocks(outer)
            sums = [slope_fplus(_sum([ups[i] for i in g])) for g in groups]
            if any(s != sums[0] for s in sums):
                continue
            prod = 1
            for g in groups:
                prod *= s_coeff([ups[i] for i in g])
                if not prod:
                    break
            if prod:
                mm = len(groups)
                total += weight * prod * Fraction((-1) ** (mm - 1), mm)
    return total
