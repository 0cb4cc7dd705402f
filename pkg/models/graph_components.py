"""
Union-find over vertex indices 0..n-1, tracking the component count.
"""

from typing import Dict, List


class UnionFind:
    """Disjoint sets with path compression and union by size."""

    def __init__(self, size: int):
        if size < 0:
            raise ValueError(f"Size must be nonnegative, got {size}")
        self.parents = list(range(size))
        self.sizes = [1] * size
        self.num_components = size

    def find(self, x: int) -> int:
        root = x
        while root != self.parents[root]:
            root = self.parents[root]
        # compress
        while x != root:
            self.parents[x], x = root, self.parents[x]
        return root

    def union(self, a: int, b: int) -> bool:
        """Merge the sets of a and b; False if already joined."""
        root_a, root_b = self.find(a), self.find(b)
        if root_a == root_b:
            return False
        if self.sizes[root_a] < self.sizes[root_b]:
            root_a, root_b = root_b, root_a
        self.parents[root_b] = root_a
        self.sizes[root_a] += self.sizes[root_b]
        self.num_components -= 1
        return True

    def components(self) -> List[List[int]]:
        groups: Dict[int, List[int]] = {}
        for x in range(len(self.parents)):
            groups.setdefault(self.find(x), []).append(x)
        return list(groups.values())
