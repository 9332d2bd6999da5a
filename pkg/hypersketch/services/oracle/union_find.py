from typing import Dict, Iterable, List


class UnionFind:
    """Union-find over arbitrary hashable items, with path compression."""

    def __init__(self, items: Iterable = ()):
        self.parents: Dict = {}
        self.num_components = 0
        for item in items:
            self.add(item)

    def add(self, item) -> None:
        if item not in self.parents:
            self.parents[item] = item
            self.num_components += 1

    def find_parent(self, item):
        self.add(item)
        root = item
        while root != self.parents[root]:
            root = self.parents[root]
        # compress path
        while item != root:
            self.parents[item], item = root, self.parents[item]
        return root

    def union(self, a, b) -> bool:
        p1 = self.find_parent(a)
        p2 = self.find_parent(b)
        if p1 == p2:
            return False
        # smaller representative wins so component ids are reproducible
        if p2 < p1:
            p1, p2 = p2, p1
        self.parents[p2] = p1
        self.num_components -= 1
        return True

    def union_all(self, items: Iterable) -> None:
        it = iter(items)
        first = next(it, None)
        if first is None:
            return
        for other in it:
            self.union(first, other)

    def retrieve_components(self) -> List[List]:
        groups: Dict = {}
        for item in self.parents:
            groups.setdefault(self.find_parent(item), []).append(item)
        return [sorted(g) for _, g in sorted(groups.items())]
