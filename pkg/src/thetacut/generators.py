"""Deterministic instance generators.

Random families draw from xoshiro256** seeded through splitmix64, so a
(family, params, seed) triple names the same graph on every platform:

* ``next_u64``: xoshiro256** step.
* ``random()``: ``(next_u64() >> 11) * 2**-53``.
* ``randbelow(k)``: rejection sampling on ``next_u64() % k``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import combinations

from .graph import Graph, GraphError

MASK64 = (1 << 64) - 1


def _rotl(x: int, k: int) -> int:
    return ((x << k) | (x >> (64 - k))) & MASK64


def splitmix64(state: int) -> tuple[int, int]:
    """Return ``(new_state, output)``."""
    state = (state + 0x9E3779B97F4A7C15) & MASK64
    z = state
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & MASK64
    return state, z ^ (z >> 31)


class Xoshiro256:
    def __init__(self, seed: int):
        st = seed & MASK64
        s = []
        for _ in range(4):
            st, out = splitmix64(st)
            s.append(out)
        self.s = s

    def next_u64(self) -> int:
        s = self.s
        result = (_rotl((s[1] * 5) & MASK64, 7) * 9) & MASK64
        t = (s[1] << 17) & MASK64
        s[2] ^= s[0]
        s[3] ^= s[1]
        s[1] ^= s[2]
        s[0] ^= s[3]
        s[2] ^= t
        s[3] = _rotl(s[3], 45)
        return result

    def random(self) -> float:
        return (self.next_u64() >> 11) * (1.0 / (1 << 53))

    def randbelow(self, k: int) -> int:
        if k <= 0:
            raise ValueError("k must be positive")
        limit = (1 << 64) - ((1 << 64) % k)
        while True:
            x = self.next_u64()
            if x < limit:
                return x % k

    def shuffle(self, items: list) -> None:
        """Fisher-Yates, walking down from the last position."""
        for i in range(len(items) - 1, 0, -1):
            j = self.randbelow(i + 1)
            items[i], items[j] = items[j], items[i]


def gen_erdos_renyi(n: int, p: float, seed: int = 0) -> Graph:
    """G(n, p): pairs (i, j), i < j, visited row by row, one draw each."""
    if not 0.0 <= p <= 1.0:
        raise ValueError("p must lie in [0, 1]")
    rng = Xoshiro256(seed)
    edges = [(i, j) for i, j in combinations(range(n), 2) if rng.random() < p]
    return Graph.from_edges(n, edges, name=f"rand_n{n}_p{p:g}_s{seed}")


def gen_near_regular(n: int, r: int, seed: int = 0) -> Graph:
    """Random perfect matching on n*r points, points r*v..r*v+r-1 merged into v.

    Loops and parallel edges of the resulting multigraph are dropped.
    """
    if n < 2 or r < 2:
        raise ValueError("near-regular graphs need n >= 2 and r >= 2")
    if (n * r) % 2:
        raise ValueError(f"n*r = {n * r} is odd, no perfect matching exists")
    rng = Xoshiro256(seed)
    points = list(range(n * r))
    rng.shuffle(points)
    edges = set()
    for a, b in zip(points[0::2], points[1::2]):
        u, v = a // r, b // r
        if u != v:
            edges.add((min(u, v), max(u, v)))
    return Graph.from_edges(n, edges, name=f"reg_n{n}_r{r}_s{seed}")


def gen_torus(d: int) -> Graph:
    """d x d toroidal grid; square (i, j) (1-based) gets label (i-1)*d + j."""
    if d < 3:
        raise ValueError("torus needs d >= 3")
    idx = lambda i, j: (i % d) * d + (j % d)  # noqa: E731
    edges = []
    for i in range(d):
        for j in range(d):
            edges.append((idx(i, j), idx(i + 1, j)))
            edges.append((idx(i, j), idx(i, j + 1)))
    return Graph.from_edges(d * d, edges, name=f"torus_{d}")


def gen_queen(d: int) -> Graph:
    """Queen graph on a d x d board (row-major labels)."""
    if d < 1:
        raise ValueError("queen graph needs d >= 1")
    cells = [(r, c) for r in range(d) for c in range(d)]
    edges = []
    for a, b in combinations(range(d * d), 2):
        (r1, c1), (r2, c2) = cells[a], cells[b]
        if r1 == r2 or c1 == c2 or abs(r1 - r2) == abs(c1 - c2):
            edges.append((a, b))
    return Graph.from_edges(d * d, edges, name=f"queen{d}_{d}")


def mycielskian(g: Graph) -> Graph:
    """Vertices v, shadows n+v, apex 2n; shadow u' joins N(u) and the apex."""
    n = g.n
    edges = list(g.edges)
    for u, v in g.edges:
        edges.append((n + u, v))
        edges.append((n + v, u))
    edges.extend((n + u, 2 * n) for u in range(n))
    return Graph.from_edges(2 * n + 1, edges)


def gen_mycielski(levels: int) -> Graph:
    """DIMACS ``myciel(levels + 2)``: ``levels + 1`` Mycielskian steps from K2.

    levels = 0, 1, 2, 3, 4 give 5, 11, 23, 47, 95 vertices (C5, Groetzsch, ...).
    """
    if levels < 0:
        raise ValueError("levels must be >= 0")
    g = Graph.from_edges(2, [(0, 1)])
    for _ in range(levels + 1):
        g = mycielskian(g)
    return Graph.from_edges(g.n, g.edges, name=f"myciel{levels + 2}")


def gen_cycle(length: int) -> Graph:
    if length < 3:
        raise ValueError("cycle length must be >= 3")
    return Graph.from_edges(length, [(i, (i + 1) % length) for i in range(length)], name=f"C{length}")


def gen_complete(n: int) -> Graph:
    return Graph.from_edges(n, combinations(range(n), 2), name=f"K{n}")


def gen_empty(n: int) -> Graph:
    return Graph.from_edges(n, [], name=f"E{n}")


def gen_petersen() -> Graph:
    outer = [(i, (i + 1) % 5) for i in range(5)]
    spokes = [(i, i + 5) for i in range(5)]
    inner = [(5 + i, 5 + (i + 2) % 5) for i in range(5)]
    return Graph.from_edges(10, outer + spokes + inner, name="petersen")


FAMILIES = {
    "erdos_renyi": (gen_erdos_renyi, ("n", "p", "seed")),
    "near_regular": (gen_near_regular, ("n", "r", "seed")),
    "torus": (gen_torus, ("d",)),
    "queen": (gen_queen, ("d",)),
    "mycielski": (gen_mycielski, ("levels",)),
    "cycle": (gen_cycle, ("length",)),
    "complete": (gen_complete, ("n",)),
    "empty": (gen_empty, ("n",)),
    "petersen": (gen_petersen, ()),
}


@dataclass
class GenSpec:
    family: str
    params: dict = field(default_factory=dict)
    seed: int = 0

    def build(self) -> Graph:
        try:
            fn, names = FAMILIES[self.family]
        except KeyError:
            raise GraphError(f"unknown family {self.family!r}; choose from {sorted(FAMILIES)}") from None
        kwargs = {}
        for name in names:
            if name == "seed":
                kwargs["seed"] = self.seed
            elif name in self.params:
                kwargs[name] = self.params[name]
            else:
                raise GraphError(f"family {self.family!r} needs parameter {name!r}")
        return fn(**kwargs)
