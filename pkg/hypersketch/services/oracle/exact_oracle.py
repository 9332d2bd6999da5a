"""
Exact Oracle: brute-force ground truth for cuts and strengths.

Enumerates set partitions with restricted growth strings and keeps every
value an exact rational. Used by the decoder on contracted instances and by
the test-suite to check every probabilistic component.
"""

import logging
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, FrozenSet, Iterable, Iterator, List, NamedTuple, Optional, Sequence, Set, Tuple

from hypersketch.core.errors import OracleCapExceededError, ParameterError
from hypersketch.schemas.hypergraph import EdgeLike, Hyperedge, Hypergraph, Partition, as_edge
from hypersketch.services.oracle.union_find import UnionFind

logger = logging.getLogger("hypersketch.oracle")

DEFAULT_VERTEX_CAP = 12
DEFAULT_TWO_CUT_CAP = 20


def _restricted_growth(m: int) -> Iterator[Tuple[List[int], int, List[int]]]:
    """Yield (labels, k, block_masks) for every set partition of range(m).

    The yielded lists are reused between iterations; copy what you keep.
    Block j is the j-th block by smallest member.
    """
    if m <= 0:
        return
    labels = [0] * m
    masks = [0] * (m + 1)
    masks[0] = 1

    def rec(i: int, k: int) -> Iterator[int]:
        if i == m:
            yield k
            return
        bit = 1 << i
        for c in range(k + 1):
            labels[i] = c
            masks[c] |= bit
            yield from rec(i + 1, k + 1 if c == k else k)
            masks[c] ^= bit

    for k in rec(1, 1):
        yield labels, k, masks


def enumerate_partitions(vertices: Sequence[int]) -> Iterator[Partition]:
    """All set partitions of `vertices` (including the one-block partition)."""
    vs = sorted(vertices)
    for labels, k, _ in _restricted_growth(len(vs)):
        yield Partition.from_labels(labels, vs)


def enumerate_bipartitions(n: int) -> Iterator[int]:
    """Side masks of every 2-cut of [0, n); vertex n-1 is always on the other side."""
    for side in range(1, 1 << (n - 1)):
        yield side


class _LocalInstance:
    """Edges of an induced sub-hypergraph, re-indexed to local bit positions."""

    def __init__(self, vertices: Iterable[int], edges: Iterable[Tuple[Hyperedge, int]]):
        self.vertices = tuple(sorted(vertices))
        pos = {v: i for i, v in enumerate(self.vertices)}
        self.edges: List[Tuple[int, int, int]] = []
        self.originals: List[Hyperedge] = []
        for e, w in edges:
            local = 0
            for v in e.vertices:
                local |= 1 << pos[v]
            self.edges.append((local, w, pos[e.vertices[0]]))
            self.originals.append(e)

    def crossing(self, labels: List[int], masks: List[int]) -> int:
        total = 0
        for local, w, first in self.edges:
            if local & ~masks[labels[first]]:
                total += w
        return total

    def blocks(self, labels: Sequence[int], k: int) -> Tuple[Tuple[int, ...], ...]:
        out: List[List[int]] = [[] for _ in range(k)]
        for i, label in enumerate(labels):
            out[label].append(self.vertices[i])
        return tuple(tuple(b) for b in out)

    def min_kcut(self, cap: int) -> Tuple[Fraction, Tuple[Tuple[int, ...], ...]]:
        m = len(self.vertices)
        if m < 2:
            raise ParameterError("minimum k-cut needs at least 2 vertices")
        if m > cap:
            raise OracleCapExceededError(m, cap)
        best_cw = best_k = -1
        best_key: Optional[Tuple[Tuple[int, ...], ...]] = None
        for labels, k, masks in _restricted_growth(m):
            if k < 2:
                continue
            cw = self.crossing(labels, masks)
            if best_k < 0:
                better = True
            else:
                lhs, rhs = cw * (best_k - 1), best_cw * (k - 1)
                if lhs != rhs:
                    better = lhs < rhs
                elif k != best_k:
                    better = k < best_k
                else:
                    better = self.blocks(labels, k) < best_key
            if better:
                best_cw, best_k = cw, k
                best_key = self.blocks(labels, k)
        return Fraction(best_cw, best_k - 1), best_key


def _components(vertices: Iterable[int], edges: Iterable[Hyperedge]) -> List[List[int]]:
    uf = UnionFind(vertices)
    for e in edges:
        uf.union_all(e.vertices)
    return uf.retrieve_components()


def _inside(edges: Dict[Hyperedge, int], vertices: Iterable[int]) -> Dict[Hyperedge, int]:
    mask = 0
    for v in vertices:
        mask |= 1 << v
    return {e: w for e, w in edges.items() if e.mask & ~mask == 0}


def _phi_of(vertices: Sequence[int], edges: Dict[Hyperedge, int], cap: int) -> Fraction:
    """Phi(H[S]) for a vertex set S with |S| >= 2."""
    if not edges or len(_components(vertices, edges)) > 1:
        return Fraction(0)
    return _LocalInstance(vertices, edges.items()).min_kcut(cap)[0]


# ─── Public Operations ───

def min_normalized_kcut(H: Hypergraph, cap: int = DEFAULT_VERTEX_CAP) -> Tuple[Fraction, Partition]:
    """Phi(H) with its witness; ties go to the smallest k, then the lexicographically smallest partition."""
    if H.n < 2:
        raise ParameterError(f"minimum k-cut needs n >= 2, got n={H.n}")
    phi, blocks = _LocalInstance(range(H.n), H.edges.items()).min_kcut(cap)
    return phi, Partition.from_blocks(blocks)


def component_strength(H: Hypergraph, S: Iterable[int], cap: int = DEFAULT_VERTEX_CAP) -> Fraction:
    """lambda_S = Phi(H[S])."""
    vs = sorted(set(S))
    if len(vs) < 2:
        raise ParameterError("component strength needs at least 2 vertices")
    return _phi_of(vs, _inside(dict(H.edges), vs), cap)


@dataclass
class StrengthAssignment:
    """Per-edge strengths of a hypergraph."""

    hypergraph: Hypergraph
    strengths: Dict[Hyperedge, Fraction] = field(default_factory=dict)
    cap: int = DEFAULT_VERTEX_CAP

    def __getitem__(self, e: EdgeLike) -> Fraction:
        return self.strengths[as_edge(e)]

    def get(self, e: EdgeLike, default: Optional[Fraction] = None) -> Optional[Fraction]:
        return self.strengths.get(as_edge(e), default)

    def items(self):
        return sorted(self.strengths.items())

    def distinct_values(self) -> List[Fraction]:
        return sorted(set(self.strengths.values()))

    def below(self, w: Fraction) -> FrozenSet[Hyperedge]:
        return frozenset(e for e, s in self.strengths.items() if s <= w)

    def component_strength(self, S: Iterable[int]) -> Fraction:
        return component_strength(self.hypergraph, S, self.cap)


def strength_recursive(H: Hypergraph, cap: int = DEFAULT_VERTEX_CAP) -> StrengthAssignment:
    """Recursive peeling: crossing edges of the minimum normalized k-cut get Phi, then recurse."""
    out: Dict[Hyperedge, Fraction] = {}

    def peel(vertices: List[int], edges: Dict[Hyperedge, int]) -> None:
        if len(vertices) < 2 or not edges:
            return
        comps = _components(vertices, edges)
        if len(comps) > 1:
            # a zero cut; no edge crosses it
            for comp in comps:
                peel(comp, _inside(edges, comp))
            return
        inst = _LocalInstance(vertices, edges.items())
        phi, blocks = inst.min_kcut(cap)
        block_masks = []
        for b in blocks:
            m = 0
            for v in b:
                m |= 1 << v
            block_masks.append(m)
        for e in edges:
            if not any(e.mask & ~bm == 0 for bm in block_masks):
                out[e] = phi
        for b in blocks:
            peel(list(b), _inside(edges, b))

    peel(list(range(H.n)), dict(H.edges))
    return StrengthAssignment(H, out, cap)


def strength_characterization(H: Hypergraph, e: EdgeLike, cap: int = DEFAULT_VERTEX_CAP) -> Fraction:
    """lambda_e = max over S containing e of Phi(H[S])."""
    edge = as_edge(e)
    if edge not in H.edges:
        raise ParameterError(f"edge {edge} is not in the hypergraph")
    others = [v for v in range(H.n) if v not in edge]
    all_edges = dict(H.edges)
    best = Fraction(0)
    for sub in range(1 << len(others)):
        S = list(edge.vertices) + [others[i] for i in range(len(others)) if sub >> i & 1]
        phi = _phi_of(sorted(S), _inside(all_edges, S), cap)
        if phi > best:
            best = phi
    return best


def count_small_kcuts(H: Hypergraph, t: Fraction, cap: int = DEFAULT_VERTEX_CAP) -> int:
    """Number of partitions (k >= 2) with crossing weight <= t * Phi(H)."""
    phi, _ = min_normalized_kcut(H, cap)
    threshold = Fraction(t) * phi
    inst = _LocalInstance(range(H.n), H.edges.items())
    count = 0
    for labels, k, masks in _restricted_growth(H.n):
        if k >= 2 and inst.crossing(labels, masks) <= threshold:
            count += 1
    return count


def edges_below_strength(H: Hypergraph, w: Fraction, cap: int = DEFAULT_VERTEX_CAP) -> FrozenSet[Hyperedge]:
    return strength_recursive(H, cap).below(Fraction(w))


def connected_components(H: Hypergraph, P: Optional[Partition] = None) -> Partition:
    """Connected components of H (or of H contracted by P), as a vertex partition."""
    uf = UnionFind(range(H.n))
    if P is not None:
        for block in P.blocks:
            uf.union_all(sorted(block))
    for e in H.edges:
        uf.union_all(e.vertices)
    return Partition.from_blocks(uf.retrieve_components())


class VerificationResult(NamedTuple):
    ok: bool
    worst_ratio: Fraction


def _mask_weights(H: Hypergraph) -> List[Tuple[int, int]]:
    return [(e.mask, w) for e, w in H.edges.items()]


def min_two_cut(H: Hypergraph, two_cut_cap: int = DEFAULT_TWO_CUT_CAP) -> Tuple[int, FrozenSet[int]]:
    """Lightest 2-cut of H as (weight, side); the side never holds vertex n - 1."""
    n = H.n
    if n < 2:
        raise ParameterError(f"a 2-cut needs at least 2 vertices, got n={n}")
    if n > two_cut_cap:
        raise OracleCapExceededError(n, two_cut_cap, "vertices for 2-cut enumeration")
    full = (1 << n) - 1
    edges = _mask_weights(H)
    best, best_side = None, 0
    for side in enumerate_bipartitions(n):
        other = full & ~side
        w = sum(wt for m, wt in edges if m & side and m & other)
        if best is None or w < best:
            best, best_side = w, side
    return best, frozenset(v for v in range(n) if best_side >> v & 1)


def verify_sparsifier(H: Hypergraph, Hs: Hypergraph, eps: Fraction, kcuts: bool = False,
                      two_cut_cap: int = DEFAULT_TWO_CUT_CAP,
                      vertex_cap: int = DEFAULT_VERTEX_CAP) -> VerificationResult:
    """Check every 2-cut (and with kcuts every k-cut) of Hs is within (1 +/- eps) of H."""
    eps = Fraction(eps)
    if Hs.n != H.n:
        raise ParameterError(f"sparsifier has {Hs.n} vertices, hypergraph has {H.n}")
    n = H.n
    if n > two_cut_cap:
        raise OracleCapExceededError(n, two_cut_cap, "vertices for 2-cut enumeration")
    if kcuts and n > vertex_cap:
        raise OracleCapExceededError(n, vertex_cap)

    ok = True
    worst = Fraction(1)
    checked = 0
    lo, hi = 1 - eps, 1 + eps

    def judge(w: int, ws: int) -> None:
        nonlocal ok, worst, checked
        checked += 1
        if w == 0:
            if ws != 0:
                ok = False
            return
        ratio = Fraction(ws, w)
        if abs(ratio - 1) > abs(worst - 1):
            worst = ratio
        if not lo <= ratio <= hi:
            ok = False

    full = (1 << n) - 1
    h_edges, s_edges = _mask_weights(H), _mask_weights(Hs)
    for side in enumerate_bipartitions(n):
        other = full & ~side
        w = sum(wt for m, wt in h_edges if m & side and m & other)
        ws = sum(wt for m, wt in s_edges if m & side and m & other)
        judge(w, ws)

    if kcuts:
        hi_inst = _LocalInstance(range(n), H.edges.items())
        hs_inst = _LocalInstance(range(n), Hs.edges.items())
        for labels, k, masks in _restricted_growth(n):
            if k >= 3:
                judge(hi_inst.crossing(labels, masks), hs_inst.crossing(labels, masks))

    logger.info(f"Verified {checked} cuts (kcuts={kcuts}): ok={ok}, worst ratio {worst}")
    return VerificationResult(ok, worst)
