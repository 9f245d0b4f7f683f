"""Termination-probability lower bounds, request-stream machines and the
stage-by-stage merge that realises a prescribed Kraft sum.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Iterable, Mapping, Sequence

from aitlab.bits import unrank
from aitlab.bitvm import Machine, TableMachine, run_all
from aitlab.complexity import Horizon
from aitlab.dyadic import ONE, ZERO, Dyadic, kraft_sum
from aitlab.errors import BudgetExceeded, InvalidInput
from aitlab.kraft import allocate_revisions


def omega_lower(machine: Machine, h: Horizon, cond: str = "", shards: int = 1) -> Dyadic:
    """Sum of ``2**-|p|`` over the inputs found to halt within h."""
    return kraft_sum(len(p) for p, _ in run_all(machine, cond, h.max_len, h.fuel, shards=shards))


@dataclass
class DomainReport:
    checked: int
    halting: int
    violations: list[tuple[str, str]] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.violations


def prefix_domain_check(machine: Machine, h: Horizon, cond: str = "",
                        shards: int = 1) -> DomainReport:
    """Exhaustively look for two comparable halting inputs of length <= L."""
    halting = [p for p, _ in run_all(machine, cond, h.max_len, h.fuel, shards=shards)]
    domain = set(halting)
    bad = []
    for p in halting:
        for k in range(len(p)):
            if p[:k] in domain:
                bad.append((p[:k], p))
    return DomainReport((1 << (h.max_len + 1)) - 1, len(halting), sorted(bad))


def table_domain_check(machine: TableMachine) -> DomainReport:
    codewords = set(machine.table)
    bad = sorted((c[:k], c) for c in codewords for k in range(len(c)) if c[:k] in codewords)
    return DomainReport(len(codewords), len(codewords), bad)


def machine_from_requests(stream: Iterable[tuple[str, int]]) -> TableMachine:
    """Codeword-table machine giving every emitted ``(x, k)`` a codeword of length k."""
    return TableMachine({c: x for x, _, c in allocate_revisions(stream)})


def table_k(machine: TableMachine) -> dict[str, int]:
    """Shortest codeword length per output."""
    out: dict[str, int] = {}
    for c, x in machine.table.items():
        if x not in out or len(c) < out[x]:
            out[x] = len(c)
    return out


def final_values(stream: Iterable[tuple[str, int]]) -> dict[str, int]:
    out: dict[str, int] = {}
    for x, k in stream:
        out[x] = min(k, out.get(x, k))
    return out


def tail_double_transform(requests: Sequence[tuple[str, int]], split: int) -> list[tuple[str, int]]:
    """Rewrite a revision stream so that the total emitted budget is at most 1.

    Strings are indexed by first appearance.  Those with index < split form
    the head: each is emitted once, at its final value, before anything else.
    Tail strings keep every revision in enumeration order; since revisions
    for one string strictly decrease, their total is below twice the final
    term.  Requires tail final sum <= (1 - head final sum) / 2.
    """
    order: list[str] = []
    for x, _ in requests:
        if x not in order:
            order.append(x)
    head = set(order[:split])
    final = final_values(requests)
    last: dict[str, int] = {}
    for x, k in requests:
        if x in last and k >= last[x]:
            raise InvalidInput(f"revision for {x!r} does not decrease ({last[x]} -> {k})")
        last[x] = k
    head_sum = kraft_sum(final[x] for x in head)
    tail_sum = kraft_sum(final[x] for x in order[split:])
    if head_sum > ONE or tail_sum + tail_sum + head_sum > ONE:
        raise BudgetExceeded(f"head {head_sum} + 2 * tail {tail_sum} exceeds 1")
    out = [(x, final[x]) for x in order[:split]]
    out.extend((x, k) for x, k in requests if x not in head)
    return out


# -- merge construction ------------------------------------------------------

def default_slack(t: int) -> Dyadic:
    return Dyadic(1, t)


def weight(K: Mapping[str, int]) -> Dyadic:
    return kraft_sum(K.values())


@dataclass(frozen=True)
class Stage:
    t: int
    sum_k: Dyadic
    alpha: Dyadic
    sum_kprime: Dyadic
    kprime: dict

    def line(self) -> str:
        return f"t={self.t} sum_k={self.sum_k} alpha={self.alpha} sum_kprime={self.sum_kprime}"


def _fresh_strings(taken):
    r = 0
    while True:
        s = unrank(r)
        if s not in taken:
            yield s
        r += 1


def merge_construction(K_stages: Sequence[Mapping[str, int]],
                       alpha_stages: Sequence[Dyadic],
                       slack: Callable[[int], Dyadic] = default_slack) -> list[Stage]:
    """Decrease K stage by stage so that sum 2**-K' tracks sum 2**-K + alpha.

    At every stage ``K'_t <= K_t`` and
    ``sum 2**-K_t + alpha_t - slack(t) <= sum 2**-K'_t <= sum 2**-K_t + alpha_t``.
    Values are repaired downward only where K_t drops below K'; the lower
    bound is then restored by giving finite values to strings outside the
    current support, one per binary digit of the added mass.
    """
    if len(K_stages) != len(alpha_stages) or not K_stages:
        raise InvalidInput("need one alpha per K stage and at least one stage")
    for t in range(1, len(K_stages)):
        prev, cur = K_stages[t - 1], K_stages[t]
        for x, k in prev.items():
            if x not in cur or cur[x] > k:
                raise InvalidInput(f"K increased for {x!r} at stage {t}")
        if alpha_stages[t] < alpha_stages[t - 1]:
            raise InvalidInput(f"alpha decreased at stage {t}")

    kprime = dict(K_stages[0])
    out = []
    for t, (K, alpha) in enumerate(zip(K_stages, alpha_stages)):
        for x, k in K.items():
            if kprime.get(x, k + 1) > k:
                kprime[x] = k
        sum_k = weight(K)
        upper = sum_k + alpha
        have = weight(kprime)
        lower_needed = upper - slack(t) if upper > slack(t) else ZERO
        if have < lower_needed:
            if t == 0 and alpha > slack(0):
                raise InvalidInput("alpha_0 exceeds slack(0); K'_0 = K_0 cannot hold")
            # largest multiple of slack's resolution that still fits under upper
            add = upper - have
            s = slack(t)
            add = add.floor_to(s.exp) if s.num == 1 else add
            fresh = _fresh_strings(kprime)
            for j in add.bits():
                kprime[next(fresh)] = j
        out.append(Stage(t, sum_k, alpha, weight(kprime), dict(kprime)))
    return out


def check_stages(K_stages, alpha_stages, stages: list[Stage],
                 slack: Callable[[int], Dyadic] = default_slack) -> list[str]:
    """Return descriptions of every invariant violation (empty when all hold)."""
    bad = []
    prev = None
    for st, K, alpha in zip(stages, K_stages, alpha_stages):
        kp = st.kprime
        for x, k in K.items():
            if kp.get(x, k + 1) > k:
                bad.append(f"t={st.t}: K'({x}) > K({x})")
        total = weight(K) + alpha
        if not (weight(kp) <= total):
            bad.append(f"t={st.t}: upper bound fails")
        if weight(kp) + slack(st.t) < total:
            bad.append(f"t={st.t}: lower bound fails")
        if prev is not None:
            for x, k in prev.items():
                if kp.get(x, k + 1) > k:
                    bad.append(f"t={st.t}: K'({x}) increased")
        prev = kp
    if stages and stages[0].kprime != dict(K_stages[0]):
        bad.append("K'_0 differs from K_0")
    return bad


def random_merge_instance(rng, n_strings: int, n_stages: int,
                          alpha_exp: int = 24) -> tuple[list[dict[str, int]], list[Dyadic]]:
    """Random monotone (K_t, alpha_t) with total mass at most 1 at every stage.

    Final values are at least ``ceil(log2 n) + 1`` so that sum 2**-K <= 1/2;
    alpha never exceeds 1/2.  Strings enter at random stages with a large
    value and are lowered step by step towards their final value.
    """
    if n_strings < 1 or n_stages < 1:
        raise InvalidInput("need at least one string and one stage")
    floor = max(1, (n_strings - 1).bit_length()) + 1
    names = [unrank(rng.randrange(1 << 12)) for _ in range(n_strings * 4)]
    names = sorted(set(names), key=lambda s: (len(s), s))[:n_strings]
    rng.shuffle(names)
    final = {x: floor + rng.randrange(8) for x in names}
    enter = {x: rng.randrange(n_stages) for x in names}
    start = {x: final[x] + rng.randrange(12) for x in names}
    K_stages: list[dict[str, int]] = []
    cur: dict[str, int] = {}
    for t in range(n_stages):
        for x in names:
            if enter[x] == t:
                cur[x] = start[x]
            elif x in cur and cur[x] > final[x] and rng.random() < 0.2:
                cur[x] -= rng.randint(1, cur[x] - final[x])
        K_stages.append(dict(cur))
    half = 1 << (alpha_exp - 1)
    levels = sorted(rng.randrange(half + 1) for _ in range(n_stages))
    alphas = [Dyadic(a, alpha_exp) for a in levels]
    alphas[0] = min(alphas[0], default_slack(0))
    return K_stages, alphas
