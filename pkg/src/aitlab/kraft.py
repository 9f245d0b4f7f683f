"""Online Kraft-Chaitin codeword allocation.

The free space is a set of aligned dyadic intervals, each named by the bit
string of its common prefix.  Free strings are pairwise incomparable and have
pairwise distinct lengths; a request of length ``l`` takes the longest free
string ``s`` with ``|s| <= l``, returns ``s 0^(l-|s|)`` and gives back the
fragments ``s 0^j 1`` for ``j < l - |s|``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Hashable, Iterable

from aitlab.dyadic import ONE, Dyadic, kraft_sum
from aitlab.errors import Infeasible


@dataclass
class AllocatorState:
    # keyed by length; distinct lengths make this a faithful representation
    free: dict[int, str] = field(default_factory=lambda: {0: ""})
    allocated: list[tuple[Hashable, str]] = field(default_factory=list)

    def free_strings(self) -> list[str]:
        return [self.free[k] for k in sorted(self.free)]

    def free_mass(self) -> Dyadic:
        return kraft_sum(self.free)

    def allocated_mass(self) -> Dyadic:
        return kraft_sum(len(c) for _, c in self.allocated)

    def dump(self) -> str:
        """One free string per line, sorted by length then lex."""
        return "".join(s + "\n" for s in self.free_strings())

    def check(self) -> None:
        """Assert the structural and accounting invariants."""
        strings = self.free_strings()
        for k, s in self.free.items():
            assert len(s) == k
        for i, a in enumerate(strings):
            for b in strings[i + 1:]:
                assert not b.startswith(a), (a, b)
        assert self.allocated_mass() + self.free_mass() == ONE

    def copy(self) -> AllocatorState:
        return AllocatorState(dict(self.free), list(self.allocated))


def allocate(state: AllocatorState, length: int, label: Hashable = None) -> str:
    """Serve one request in place and return the codeword of exactly ``length`` bits."""
    if length < 0:
        raise ValueError("codeword length must be >= 0")
    fits = [k for k in state.free if k <= length]
    if not fits:
        raise Infeasible(f"no free interval of length <= {length}")
    k = max(fits)
    s = state.free.pop(k)
    for j in range(length - k):
        state.free[k + j + 1] = s + "0" * j + "1"
    word = s + "0" * (length - k)
    state.allocated.append((label, word))
    return word


def allocate_all(lengths: Iterable[int]) -> list[str]:
    state = AllocatorState()
    return [allocate(state, l, i) for i, l in enumerate(lengths)]


def allocate_revisions(stream: Iterable[tuple[str, int]],
                       state: AllocatorState | None = None) -> list[tuple[str, int, str]]:
    """Give every emitted ``(x, k)`` its own codeword of length k.

    Later revisions for the same x are expected to be strictly smaller; the
    caller is responsible for the total budget being at most 1.
    """
    if state is None:
        state = AllocatorState()
    out = []
    for x, k in stream:
        out.append((x, k, allocate(state, k, x)))
    return out
