"""Bounded-horizon complexity estimates.

Everything here is an upper bound on K (or a lower bound on a semimeasure):
a program that is not found within the horizon says nothing.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from fractions import Fraction

from aitlab.bits import binary, strings_of_length
from aitlab.bitvm import Halted, Machine, run_all
from aitlab.dyadic import ZERO, Dyadic, kraft_sum
from aitlab.errors import InvalidInput


@dataclass(frozen=True)
class Horizon:
    max_len: int
    fuel: int
    stages: int = 1

    def __post_init__(self):
        if self.max_len < 0 or self.fuel < 1 or self.stages < 1:
            raise InvalidInput(f"bad horizon {self}")


@dataclass(frozen=True)
class ComplexityEstimate:
    value: int
    witness: str
    horizon: Horizon


def k_upper(machine: Machine, x: str, cond: str, h: Horizon) -> ComplexityEstimate | None:
    """Shortest program (then lex-first) of length <= L that outputs x within T steps."""
    for length in range(h.max_len + 1):
        for p in strings_of_length(length):
            r = machine(p, cond, h.fuel)
            if isinstance(r, Halted) and r.output == x:
                return ComplexityEstimate(length, p, h)
    return None


def k_table(machine: Machine, cond: str, h: Horizon,
            shards: int = 1) -> dict[str, ComplexityEstimate]:
    table: dict[str, ComplexityEstimate] = {}
    for p, r in run_all(machine, cond, h.max_len, h.fuel, shards=shards):
        if r.output not in table:
            table[r.output] = ComplexityEstimate(len(p), p, h)
    return table


def table_lines(table: dict[str, ComplexityEstimate]) -> list[str]:
    rows = sorted(table.items(), key=lambda kv: (kv[1].value, len(kv[0]), kv[0]))
    return [f"output={x} value={e.value} witness={e.witness}" for x, e in rows]


def prefix_sum(machine: Machine, cond: str, h: Horizon, shards: int = 1) -> Dyadic:
    """Sum of ``2**-K_hat(x | cond)`` over the outputs found within h."""
    return kraft_sum(e.value for e in k_table(machine, cond, h, shards).values())


def deficiency(x: str, h: Horizon, machine: Machine | None = None) -> int:
    """``|x| - K_hat(x | binary(|x|))``, clamped below at 0.

    Since ``K_hat >= K`` the value never overstates the true deficiency; 0 is
    also reported when nothing is found within the horizon.
    """
    if machine is None:
        from aitlab.dispatch import DispatchMachine
        machine = DispatchMachine()
    est = k_upper(machine, x, binary(len(x)), Horizon(min(h.max_len, len(x)), h.fuel))
    if est is None:
        return 0
    return max(0, len(x) - est.value)


def effective_p_value(k_hat: int, prob: Dyadic) -> Dyadic:
    """``2**k_hat * prob``.  With ``k_hat >= K(A)`` this overstates the true value."""
    if prob > Dyadic(1):
        raise InvalidInput("probability must lie in [0, 1]")
    if k_hat < 0:
        raise InvalidInput("complexity must be >= 0")
    return prob.scale2(k_hat)


def semimeasure_estimate(machine: Machine, x: str, h: Horizon, cond: str = "",
                         shards: int = 1) -> Dyadic:
    lengths = [len(p) for p, r in run_all(machine, cond, h.max_len, h.fuel, shards=shards)
               if r.output == x]
    return kraft_sum(lengths) if lengths else ZERO


def empirical_a_priori(machine: Machine, samples: int, max_len: int, fuel: int,
                       seed: int, cond: str = "") -> dict[str, Fraction]:
    """Output frequencies of ``samples`` random programs (length uniform in [0, max_len])."""
    if samples < 1:
        raise InvalidInput("samples must be >= 1")
    rng = random.Random(seed)
    counts: dict[str, int] = {}
    for _ in range(samples):
        length = rng.randint(0, max_len)
        p = format(rng.getrandbits(length), f"0{length}b") if length else ""
        r = machine(p, cond, fuel)
        if isinstance(r, Halted):
            counts[r.output] = counts.get(r.output, 0) + 1
    return {x: Fraction(c, samples) for x, c in counts.items()}


def frequency_lines(freq: dict[str, Fraction],
                    table: dict[str, ComplexityEstimate] | None = None) -> list[str]:
    def key(kv):
        x, f = kv
        return (-f, len(x), x)
    out = []
    for x, f in sorted(freq.items(), key=key):
        line = f"output={x} frequency={f.numerator}/{f.denominator}"
        if table and x in table:
            line += f" value={table[x].value} witness={table[x].witness}"
        out.append(line)
    return out
