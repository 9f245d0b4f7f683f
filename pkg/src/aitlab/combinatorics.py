"""Exact counting behind three incompressibility-method examples: the no-carry
adder, transitive subtournaments, and projections of a set of triples.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from math import comb

from aitlab.errors import InvalidWitness, MalformedCode, TooLarge


def adder_steps(x: int, y: int) -> int:
    """Rounds of ``(a, b) -> (a ^ b, (a & b) << 1)`` until the carry vanishes.

    Counted do-while style: the round that produces a zero carry is included,
    so ``adder_steps(x, 0) == 1``.
    """
    if x < 0 or y < 0:
        raise ValueError("operands must be >= 0")
    a, b, steps = x, y, 0
    while True:
        a, b = a ^ b, (a & b) << 1
        steps += 1
        if b == 0:
            return steps


def adder_sum(x: int, y: int) -> int:
    a, b = x, y
    while b:
        a, b = a ^ b, (a & b) << 1
    return a


def adder_histogram(bits: int) -> dict[int, int]:
    hist: dict[int, int] = {}
    n = 1 << bits
    for x in range(n):
        for y in range(n):
            s = adder_steps(x, y)
            hist[s] = hist.get(s, 0) + 1
    return hist


# -- tournaments -------------------------------------------------------------

def ceil_log2(n: int) -> int:
    return (n - 1).bit_length() if n > 1 else 0


def edge_index(n: int, i: int, j: int) -> int:
    """Position of the pair {i < j} in row-major order over i < j."""
    return i * n - i * (i + 1) // 2 + (j - i - 1)


@dataclass(frozen=True)
class Tournament:
    n: int
    edges: str  # bit per pair i<j, '1' meaning i beats j

    def __post_init__(self):
        if len(self.edges) != self.n * (self.n - 1) // 2:
            raise MalformedCode(f"{self.n} vertices need {comb(self.n, 2)} edge bits")

    def beats(self, i: int, j: int) -> bool:
        if i < j:
            return self.edges[edge_index(self.n, i, j)] == "1"
        return self.edges[edge_index(self.n, j, i)] == "0"

    def __str__(self) -> str:
        return f"{self.n}:{self.edges}"

    @classmethod
    def parse(cls, text: str) -> Tournament:
        n, _, edges = text.partition(":")
        return cls(int(n), edges.strip())

    @classmethod
    def from_order(cls, n: int, order) -> Tournament:
        """Transitive tournament in which earlier vertices of ``order`` beat later ones."""
        pos = {v: k for k, v in enumerate(order)}
        return cls(n, "".join("1" if pos[i] < pos[j] else "0"
                              for i in range(n) for j in range(i + 1, n)))

    @classmethod
    def from_index(cls, n: int, idx: int) -> Tournament:
        m = n * (n - 1) // 2
        return cls(n, format(idx, f"0{m}b") if m else "")


def is_transitive_list(T: Tournament, S) -> bool:
    return all(T.beats(S[a], S[b]) for a in range(len(S)) for b in range(a + 1, len(S)))


def encode_tournament(T: Tournament, S) -> str:
    """Vertex list of S (each ``ceil(log2 n)`` bits) then the remaining edge bits."""
    S = list(S)
    if len(set(S)) != len(S) or any(not 0 <= v < T.n for v in S):
        raise InvalidWitness("S must list distinct vertices of T")
    if not is_transitive_list(T, S):
        raise InvalidWitness("S is not transitive in dominance order")
    w = ceil_log2(T.n)
    inside = set(S)
    head = "".join(format(v, f"0{w}b") if w else "" for v in S)
    rest = "".join(T.edges[edge_index(T.n, i, j)]
                   for i in range(T.n) for j in range(i + 1, T.n)
                   if not (i in inside and j in inside))
    return head + rest


def encoded_length(n: int, v: int) -> int:
    return v * ceil_log2(n) + comb(n, 2) - comb(v, 2)


def decode_tournament(n: int, v: int, code: str) -> Tournament:
    if len(code) != encoded_length(n, v):
        raise MalformedCode(f"expected {encoded_length(n, v)} bits, got {len(code)}")
    w = ceil_log2(n)
    S = [int(code[k * w:(k + 1) * w], 2) if w else 0 for k in range(v)]
    if len(set(S)) != v or any(s >= n for s in S):
        raise MalformedCode("vertex list is not a set of vertices")
    pos = {s: k for k, s in enumerate(S)}
    rest = iter(code[v * w:])
    edges = []
    for i in range(n):
        for j in range(i + 1, n):
            if i in pos and j in pos:
                edges.append("1" if pos[i] < pos[j] else "0")
            else:
                edges.append(next(rest))
    return Tournament(n, "".join(edges))


def max_transitive_size(T: Tournament) -> int:
    if T.n > 16:
        raise TooLarge("brute force is capped at 16 vertices")
    if T.n == 0:
        return 0
    # a subset is transitive iff its out-degrees inside it are all distinct
    out = [0] * T.n
    for i in range(T.n):
        for j in range(T.n):
            if i != j and T.beats(i, j):
                out[i] |= 1 << j
    best = 1
    for mask in range(1, 1 << T.n):
        size = mask.bit_count()
        if size <= best:
            continue
        degs = set()
        m = mask
        while m:
            low = m & -m
            degs.add((out[low.bit_length() - 1] & mask).bit_count())
            m ^= low
        if len(degs) == size:
            best = size
    return best


def transitive_histogram(n: int) -> dict[int, int]:
    if n > 6:
        raise TooLarge("exhaustive sweeps are capped at n = 6")
    hist: dict[int, int] = {}
    for idx in range(1 << comb(n, 2)):
        k = max_transitive_size(Tournament.from_index(n, idx))
        hist[k] = hist.get(k, 0) + 1
    return hist


@dataclass
class BoundRow:
    v: int
    exact: int
    bound: int
    vacuous: bool

    @property
    def holds(self) -> bool:
        return self.exact <= self.bound


@dataclass
class TournamentReport:
    n: int
    histogram: dict[int, int]
    rows: list[BoundRow] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return all(r.holds for r in self.rows)

    def lines(self) -> list[str]:
        out = [f"n={self.n} total={sum(self.histogram.values())}"]
        out += [f"n={self.n} max_transitive={k} count={c}"
                for k, c in sorted(self.histogram.items())]
        out += [f"n={self.n} v={r.v} exact={r.exact} bound={r.bound} "
                f"vacuous={r.vacuous} holds={r.holds}" for r in self.rows]
        return out


def tournament_bound_check(n: int) -> TournamentReport:
    """Exact count of tournaments with a transitive v-set versus the encoding bound.

    The bound ``2**(v*ceil(log n) + C(n,2) - C(v,2))`` counts the codes; it is
    vacuous when it reaches the total ``2**C(n,2)``.
    """
    if n > 6:
        raise TooLarge("exhaustive check is capped at n = 6")
    hist = transitive_histogram(n)
    total = 1 << comb(n, 2)
    rep = TournamentReport(n, hist)
    for v in range(1, n + 1):
        exact = sum(c for k, c in hist.items() if k >= v)
        bound = 1 << encoded_length(n, v)
        rep.rows.append(BoundRow(v, exact, bound, bound >= total))
    return rep


def count_transitive_tournaments(n: int) -> int:
    if n > 6:
        raise TooLarge("exhaustive sweeps are capped at n = 6")
    return sum(1 for idx in range(1 << comb(n, 2))
               if max_transitive_size(Tournament.from_index(n, idx)) == n)


def plant_transitive(rng, n: int, v: int) -> tuple[Tournament, list[int]]:
    """Random tournament with a random transitive v-set planted in it."""
    S = rng.sample(range(n), v)
    pos = {s: k for k, s in enumerate(S)}
    edges = []
    for i in range(n):
        for j in range(i + 1, n):
            if i in pos and j in pos:
                edges.append("1" if pos[i] < pos[j] else "0")
            else:
                edges.append(rng.choice("01"))
    return Tournament(n, "".join(edges)), S


# -- projections ---------------------------------------------------------------

@dataclass(frozen=True)
class ProjectionReport:
    size: int
    xy: int
    yz: int
    xz: int

    @property
    def holds(self) -> bool:
        return self.size ** 2 <= self.xy * self.yz * self.xz

    def line(self) -> str:
        return (f"size={self.size} xy={self.xy} yz={self.yz} xz={self.xz} "
                f"lhs={self.size ** 2} rhs={self.xy * self.yz * self.xz} holds={self.holds}")


def projections_check(A, sizes: tuple[int, int, int] | None = None) -> ProjectionReport:
    A = set(A)
    if sizes is not None:
        if any(s > 64 for s in sizes):
            raise TooLarge("ground sets are capped at 64 elements")
        X, Y, Z = sizes
        for x, y, z in A:
            if not (0 <= x < X and 0 <= y < Y and 0 <= z < Z):
                raise ValueError(f"{(x, y, z)} outside the ground sets")
    rep = ProjectionReport(len(A),
                           len({(x, y) for x, y, _ in A}),
                           len({(y, z) for _, y, z in A}),
                           len({(x, z) for x, _, z in A}))
    assert rep.holds, rep
    return rep


def full_cube(X: int, Y: int, Z: int):
    return [(x, y, z) for x in range(X) for y in range(Y) for z in range(Z)]

