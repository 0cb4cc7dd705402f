"""
Walk Enumeration Oracle

Brute-force verification path for the walk-count recurrence: enumerate
plane rooted trees and the even ordered walks covering them under the
riding rule (reuse an already passed edge, or open the leftmost edge not
yet passed).

Trees are numbered in preorder with the root as vertex 0. A walk is the
tuple of visited vertices, 2k + 1 entries for 2k steps.
"""

import math
import logging
from collections import Counter
from dataclasses import dataclass
from functools import lru_cache
from typing import Dict, Iterator, List, Tuple

from joblib import Parallel, delayed

logger = logging.getLogger(__name__)

# Enumeration guards
MAX_TREE_EDGES = 8
MAX_WALK_ORDER = 8
MAX_ORACLE_ORDER = 6


class EnumerationGuardError(ValueError):
    """Raised when a request exceeds the enumeration guards."""


def catalan(e: int) -> int:
    return math.comb(2 * e, e) // (e + 1)


@dataclass(frozen=True)
class PlaneRootedTree:
    """Rooted tree with ordered children; the root is implicit."""
    children: Tuple['PlaneRootedTree', ...] = ()

    @property
    def edge_count(self) -> int:
        return sum(1 + child.edge_count for child in self.children)

    def to_dyck(self) -> str:
        """Balanced-parenthesis encoding, one '(' ... ')' per edge."""
        return ''.join('(' + child.to_dyck() + ')' for child in self.children)

    @classmethod
    def from_dyck(cls, word: str) -> 'PlaneRootedTree':
        stack: List[List['PlaneRootedTree']] = [[]]
        for symbol in word:
            if symbol == '(':
                stack.append([])
            elif symbol == ')':
                if len(stack) < 2:
                    raise ValueError(f"Unbalanced Dyck word: {word!r}")
                finished = cls(tuple(stack.pop()))
                stack[-1].append(finished)
            else:
                raise ValueError(f"Unexpected symbol {symbol!r} in Dyck word")
        if len(stack) != 1:
            raise ValueError(f"Unbalanced Dyck word: {word!r}")
        return cls(tuple(stack[0]))

    def adjacency(self) -> Tuple[Tuple[Tuple[int, ...], ...], Tuple[int, ...], Tuple[int, ...]]:
        """
        Preorder layout of the tree.

        Returns:
            Tuple of (children per vertex, parent per vertex, depth per vertex);
            the root has parent -1
        """
        children: List[List[int]] = []
        parent: List[int] = []
        depth: List[int] = []

        def visit(node: 'PlaneRootedTree', up: int, level: int) -> None:
            index = len(children)
            children.append([])
            parent.append(up)
            depth.append(level)
            if up >= 0:
                children[up].append(index)
            for child in node.children:
                visit(child, index, level + 1)

        visit(self, -1, 0)
        return tuple(tuple(c) for c in children), tuple(parent), tuple(depth)


@dataclass(frozen=True)
class CoveringWalk:
    """A closed walk on a plane rooted tree, vertices in preorder numbering."""
    tree: PlaneRootedTree
    vertices: Tuple[int, ...]

    @property
    def steps(self) -> List[Tuple[int, int]]:
        return list(zip(self.vertices, self.vertices[1:]))

    @property
    def returns_to_root(self) -> int:
        return sum(1 for x in self.vertices[1:] if x == 0)


def _dyck_words(e: int) -> Iterator[str]:
    """Dyck words of semilength e in lexicographic order ('(' < ')')."""
    def extend(prefix: str, opened: int, closed: int) -> Iterator[str]:
        if closed == e:
            yield prefix
            return
        if opened < e:
            yield from extend(prefix + '(', opened + 1, closed)
        if closed < opened:
            yield from extend(prefix + ')', opened, closed + 1)

    yield from extend('', 0, 0)


def enumerate_trees(e: int) -> List[PlaneRootedTree]:
    """
    All plane rooted trees with e edges, each once, in Dyck-word order.

    Args:
        e: Edge count (0..MAX_TREE_EDGES)

    Returns:
        List of Catalan(e) trees
    """
    if not 0 <= e <= MAX_TREE_EDGES:
        raise EnumerationGuardError(f"Tree size e={e} outside 0..{MAX_TREE_EDGES}")
    return [PlaneRootedTree.from_dyck(word) for word in _dyck_words(e)]


# =============================================================================
# WALKS ON A FIXED TREE
# =============================================================================

def _check_walk_request(tree: PlaneRootedTree, k: int) -> None:
    if not 0 <= k <= MAX_WALK_ORDER:
        raise EnumerationGuardError(f"Walk order k={k} outside 0..{MAX_WALK_ORDER}")
    if tree.edge_count > MAX_TREE_EDGES:
        raise EnumerationGuardError(
            f"Tree with {tree.edge_count} edges exceeds the guard {MAX_TREE_EDGES}"
        )
    if k < tree.edge_count:
        raise ValueError(f"A walk of {2 * k} steps cannot cover {tree.edge_count} edges")


def iter_covering_walks(tree: PlaneRootedTree, k: int) -> Iterator[CoveringWalk]:
    """
    Generate every riding-rule walk of 2k steps covering tree, depth first.

    Moves are tried in a fixed order (parent, opened children left to
    right, then the leftmost unopened child), so the output order is
    deterministic.
    """
    _check_walk_request(tree, k)
    children, parent, depth = tree.adjacency()
    opened = [0] * len(children)
    path = [0]
    untouched = tree.edge_count

    def search(x: int, remaining: int) -> Iterator[Tuple[int, ...]]:
        nonlocal untouched
        if remaining == 0:
            if x == 0 and untouched == 0:
                yield tuple(path)
            return

        moves = []
        if parent[x] >= 0:
            moves.append(parent[x])
        moves.extend(children[x][:opened[x]])
        for y in moves:
            if remaining - 1 >= 2 * untouched + depth[y]:
                path.append(y)
                yield from search(y, remaining - 1)
                path.pop()

        if opened[x] < len(children[x]):
            y = children[x][opened[x]]
            # the new edge is touched on the way down
            if remaining - 1 >= 2 * (untouched - 1) + depth[y]:
                opened[x] += 1
                untouched -= 1
                path.append(y)
                yield from search(y, remaining - 1)
                path.pop()
                untouched += 1
                opened[x] -= 1

    for vertices in search(0, 2 * k):
        yield CoveringWalk(tree=tree, vertices=vertices)


def count_covering_walks(tree: PlaneRootedTree, k: int) -> int:
    """
    U(k; tree): the number of riding-rule walks of 2k steps covering tree.

    Same search as iter_covering_walks, memoized on (vertex, opened
    prefix lengths, remaining steps).
    """
    _check_walk_request(tree, k)
    children, parent, depth = tree.adjacency()
    edge_count = tree.edge_count

    @lru_cache(maxsize=None)
    def count(x: int, opened: Tuple[int, ...], remaining: int) -> int:
        untouched = edge_count - sum(opened)
        if remaining == 0:
            return 1 if x == 0 and untouched == 0 else 0

        total = 0
        moves = ([parent[x]] if parent[x] >= 0 else []) + list(children[x][:opened[x]])
        for y in moves:
            if remaining - 1 >= 2 * untouched + depth[y]:
                total += count(y, opened, remaining - 1)

        if opened[x] < len(children[x]):
            y = children[x][opened[x]]
            if remaining - 1 >= 2 * (untouched - 1) + depth[y]:
                bumped = opened[:x] + (opened[x] + 1,) + opened[x + 1:]
                total += count(y, bumped, remaining - 1)
        return total

    return count(0, (0,) * len(children), 2 * k)


def validate_walk(tree: PlaneRootedTree, vertices: Tuple[int, ...]) -> bool:
    """
    Replay a walk and check the covering-walk invariants.

    Raises:
        ValueError: on the first violated invariant
    """
    children, parent, _ = tree.adjacency()
    if not vertices or vertices[0] != 0 or vertices[-1] != 0:
        raise ValueError("Walk must start and end at the root")

    down: Counter = Counter()
    up: Counter = Counter()
    for x, y in zip(vertices, vertices[1:]):
        if not (0 <= x < len(parent) and 0 <= y < len(parent)):
            raise ValueError(f"Step ({x}, {y}) leaves the tree")
        if parent[y] == x:
            if down[y] == 0:
                siblings = children[x]
                position = siblings.index(y)
                if any(down[s] == 0 for s in siblings[:position]):
                    raise ValueError(f"Edge ({x}, {y}) opened before a left sibling")
            down[y] += 1
        elif parent[x] == y:
            up[x] += 1
        else:
            raise ValueError(f"Step ({x}, {y}) is not a tree edge")

    for child in range(1, len(parent)):
        passes = down[child] + up[child]
        if passes == 0 or passes % 2:
            raise ValueError(f"Edge to {child} passed {passes} times")
        if down[child] != up[child]:
            raise ValueError(f"Edge to {child} not retraced: {down[child]} down, {up[child]} up")
    return True


# =============================================================================
# WALKS OVER ALL TREES
# =============================================================================

def iter_riding_walks(u: int) -> Iterator[Tuple[int, ...]]:
    """
    Every even ordered walk of 2u steps, over all trees it can induce.

    Vertices are numbered by first appearance; a step either follows an
    existing edge or creates a new rightmost child of the current vertex.
    """
    if not 0 <= u <= MAX_ORACLE_ORDER:
        raise EnumerationGuardError(f"Walk order u={u} outside 0..{MAX_ORACLE_ORDER}")
    parent = [-1]
    depth = [0]
    children: List[List[int]] = [[]]
    path = [0]

    def search(x: int, remaining: int) -> Iterator[Tuple[int, ...]]:
        if remaining == 0:
            if x == 0:
                yield tuple(path)
            return
        moves = ([parent[x]] if parent[x] >= 0 else []) + children[x]
        for y in moves:
            if remaining - 1 >= depth[y]:
                path.append(y)
                yield from search(y, remaining - 1)
                path.pop()
        if remaining - 1 >= depth[x] + 1:
            y = len(parent)
            parent.append(x)
            depth.append(depth[x] + 1)
            children.append([])
            children[x].append(y)
            path.append(y)
            yield from search(y, remaining - 1)
            path.pop()
            children[x].pop()
            children.pop()
            depth.pop()
            parent.pop()

    yield from search(0, 2 * u)


def to_covering_walk(walk: Tuple[int, ...]) -> CoveringWalk:
    """Induced plane tree of a first-appearance walk, relabelled to preorder."""
    kids: Dict[int, List[int]] = {0: []}
    for x, y in zip(walk, walk[1:]):
        if y not in kids:
            kids[y] = []
            kids[x].append(y)

    preorder: Dict[int, int] = {}

    def build(x: int) -> PlaneRootedTree:
        preorder[x] = len(preorder)
        return PlaneRootedTree(tuple(build(c) for c in kids[x]))

    tree = build(0)
    return CoveringWalk(tree=tree, vertices=tuple(preorder[x] for x in walk))


def induced_tree(walk: Tuple[int, ...]) -> PlaneRootedTree:
    return to_covering_walk(walk).tree


def walks_by_returns(u: int) -> Dict[int, int]:
    """
    Tally the even ordered walks of 2u steps by their returns to the root.

    Every return count v = 0..u appears, zeros included, so the result lines
    up with column u of the intensity-1 walk table.
    """
    tally: Counter = Counter()
    for walk in iter_riding_walks(u):
        tally[sum(1 for x in walk[1:] if x == 0)] += 1
    return {v: tally[v] for v in range(u + 1)}


def oracle_moment(k: int, n_jobs: int = 1) -> int:
    """
    m_k at intensity 1 as the sum of U(k; tree) over trees with 1..k edges.

    Args:
        k: Moment order (1..MAX_ORACLE_ORDER)
        n_jobs: joblib workers, one task per tree

    Returns:
        Exact oracle value of m_k
    """
    if not 1 <= k <= MAX_ORACLE_ORDER:
        raise EnumerationGuardError(f"Oracle order k={k} outside 1..{MAX_ORACLE_ORDER}")
    trees = [tree for e in range(1, k + 1) for tree in enumerate_trees(e)]
    counts = Parallel(n_jobs=n_jobs)(delayed(count_covering_walks)(tree, k) for tree in trees)
    logger.debug(f"Oracle m_{k}: {len(trees)} trees, total {sum(counts)}")
    return sum(counts)
