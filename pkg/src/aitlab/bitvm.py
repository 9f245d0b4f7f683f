"""BitVM: a step-bounded interpreter for a 16-opcode binary ISA.

A program is a bit string read as 4-bit opcodes; ``JF`` and ``JB`` carry a
4-bit immediate.  The machine state is a work queue ``W``, an output ``O``, a
one-bit flag ``F`` and read heads on two tapes: the data tape (no end
detection) and the condition tape (end detected through ``YREAD``).

======  =======  ===============================================
code    name     effect
======  =======  ===============================================
0000    HALT
0001    O0       append 0 to O
0010    O1       append 1 to O
0011    OW       append W to O (W unchanged)
0100    W0       append 0 to W
0101    W1       append 1 to W
0110    WCLR     empty W
0111    WPOP     drop the last bit of W (no-op if empty)
1000    READ     move the next data bit into W
1001    YREAD    next condition bit into W, F=0; at end F=1
1010    JF k     jump forward k+1 instructions past the next one
1011    JB k     jump back k+2 instructions from the next one
1100    SKIPZ    skip the next instruction if W is empty
1101    SKIPF    skip the next instruction if F=1
1110    WSHIFT   pop the first bit of W into F; F=1 if W empty
1111    NOP
======  =======  ===============================================

Jump offsets are counted from the instruction after the jump, so ``JF k``
lands on ``pc + k + 2`` and ``JB k`` on ``pc - k - 1``.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from functools import lru_cache
from typing import Protocol, Union

from aitlab.bits import decode_string, encode_string
from aitlab.errors import MalformedCode

HALT, O0, O1, OW, W0, W1, WCLR, WPOP, READ, YREAD, JF, JB, SKIPZ, SKIPF, WSHIFT, NOP = range(16)

MNEMONICS = ("HALT", "O0", "O1", "OW", "W0", "W1", "WCLR", "WPOP", "READ",
             "YREAD", "JF", "JB", "SKIPZ", "SKIPF", "WSHIFT", "NOP")
ISA_VERSION = "bitvm-1"


@dataclass(frozen=True)
class Halted:
    output: str
    consumed: int
    steps: int


@dataclass(frozen=True)
class OutOfFuel:
    steps: int


@dataclass(frozen=True)
class Diverged:
    # instructions executed before the machine got stuck
    steps: int = 0


RunResult = Union[Halted, OutOfFuel, Diverged]


class Machine(Protocol):
    prefix: bool

    def __call__(self, s: str, cond: str, fuel: int) -> RunResult: ...


@lru_cache(maxsize=1 << 16)
def decode_program(code: str) -> tuple[tuple[tuple[int, int], ...], bool]:
    """Split ``code`` into ``(opcode, immediate)`` pairs.

    Returns the decodable instructions and whether a truncated tail follows.
    """
    ins = []
    i, n = 0, len(code)
    while i + 4 <= n:
        op = int(code[i:i + 4], 2)
        i += 4
        if op in (JF, JB):
            if i + 4 > n:
                return tuple(ins), True
            ins.append((op, int(code[i:i + 4], 2)))
            i += 4
        else:
            ins.append((op, 0))
    return tuple(ins), i < n


def assemble(text: str) -> str:
    """Assemble whitespace/comma separated mnemonics, e.g. ``"READ, JF 3, HALT"``."""
    out = []
    for tok in text.replace(",", " \n ").split("\n"):
        parts = tok.split()
        if not parts:
            continue
        op = MNEMONICS.index(parts[0].upper())
        out.append(format(op, "04b"))
        if op in (JF, JB):
            if len(parts) != 2 or not 0 <= int(parts[1]) < 16:
                raise ValueError(f"{parts[0]} needs an immediate in 0..15")
            out.append(format(int(parts[1]), "04b"))
        elif len(parts) != 1:
            raise ValueError(f"unexpected operand in {tok!r}")
    return "".join(out)


def disassemble(code: str) -> str:
    ins, truncated = decode_program(code)
    words = [MNEMONICS[op] + (f" {k}" if op in (JF, JB) else "") for op, k in ins]
    if truncated:
        words.append("<truncated>")
    return ", ".join(words)


def run(q: str, data: str, cond: str, fuel: int) -> RunResult:
    """Run program ``q`` on the data and condition tapes for at most ``fuel`` steps."""
    ins, _ = decode_program(q)
    n = len(ins)
    W: deque[str] = deque()
    O: list[str] = []
    pc = dpos = cpos = steps = 0
    flag = 0
    ndata, ncond = len(data), len(cond)
    while True:
        if pc < 0 or pc >= n:
            return Diverged(steps)
        if steps >= fuel:
            return OutOfFuel(steps)
        op, k = ins[pc]
        steps += 1
        pc += 1
        if op == HALT:
            return Halted("".join(O), dpos, steps)
        elif op == O0:
            O.append("0")
        elif op == O1:
            O.append("1")
        elif op == OW:
            O.extend(W)
        elif op == W0:
            W.append("0")
        elif op == W1:
            W.append("1")
        elif op == WCLR:
            W.clear()
        elif op == WPOP:
            if W:
                W.pop()
        elif op == READ:
            if dpos >= ndata:
                return Diverged(steps)
            W.append(data[dpos])
            dpos += 1
        elif op == YREAD:
            if cpos < ncond:
                W.append(cond[cpos])
                cpos += 1
                flag = 0
            else:
                flag = 1
        elif op == JF:
            pc += k + 1
        elif op == JB:
            pc -= k + 2
        elif op == SKIPZ:
            if not W:
                pc += 1
        elif op == SKIPF:
            if flag:
                pc += 1
        elif op == WSHIFT:
            if W:
                flag = 1 if W.popleft() == "1" else 0
            else:
                flag = 1
        # NOP falls through


def eval_plain(s: str, cond: str, fuel: int) -> RunResult:
    """The base machine: ``s = e(q) r`` runs program q on data r."""
    try:
        q, used = decode_string(s)
    except MalformedCode:
        return Diverged(0)
    return run(q, s[used:], cond, fuel)


def eval_prefix(machine: Machine, s: str, cond: str, fuel: int) -> RunResult:
    """Defined only when the run halts having read exactly ``|s|`` input bits."""
    r = machine(s, cond, fuel)
    if isinstance(r, Halted) and r.consumed != len(s):
        return Diverged(r.steps)
    return r


def adjunct(q: str, r: str = "") -> str:
    """Input for the base machine that runs program q on data r."""
    return encode_string(q) + r


class BaseMachine:
    """``U0(s, y) = run(q, r, y)`` for ``s = e(q) r``.

    Unlike :func:`eval_plain`, ``consumed`` counts the whole input read,
    header included, so that :class:`PrefixMachine` can wrap it.
    """

    prefix = False

    def __call__(self, s: str, cond: str, fuel: int) -> RunResult:
        try:
            q, used = decode_string(s)
        except MalformedCode:
            return Diverged(0)
        r = run(q, s[used:], cond, fuel)
        if isinstance(r, Halted):
            return Halted(r.output, used + r.consumed, r.steps)
        return r

    def __repr__(self):
        return "BaseMachine()"


class ProgramMachine:
    """A fixed BitVM program whose input is the data tape."""

    prefix = False

    def __init__(self, q: str):
        self.q = q

    def __call__(self, s: str, cond: str, fuel: int) -> RunResult:
        return run(self.q, s, cond, fuel)

    def __repr__(self):
        return f"ProgramMachine({self.q!r})"


class DirectMachine:
    """The input itself is the program; the data tape is empty."""

    prefix = False

    def __call__(self, s: str, cond: str, fuel: int) -> RunResult:
        return run(s, "", cond, fuel)

    def __repr__(self):
        return "DirectMachine()"


class PrefixMachine:
    """Exact-consumption restriction of another machine."""

    prefix = True

    def __init__(self, inner: Machine):
        self.inner = inner

    def __call__(self, s: str, cond: str, fuel: int) -> RunResult:
        return eval_prefix(self.inner, s, cond, fuel)

    def __repr__(self):
        return f"PrefixMachine({self.inner!r})"


class EmptyMachine:
    prefix = True

    def __call__(self, s: str, cond: str, fuel: int) -> RunResult:
        return Diverged(0)

    def __repr__(self):
        return "EmptyMachine()"


class TableMachine:
    """Decoder table: halts in one step exactly on the listed codewords."""

    prefix = True

    def __init__(self, table: dict[str, str]):
        self.table = dict(table)

    def __call__(self, s: str, cond: str, fuel: int) -> RunResult:
        if s not in self.table:
            return Diverged(0)
        if fuel < 1:
            return OutOfFuel(fuel)
        return Halted(self.table[s], len(s), 1)

    def dumps(self) -> str:
        rows = sorted(self.table.items(), key=lambda kv: (len(kv[0]), kv[0]))
        return "".join(f"{c}\t{x}\n" for c, x in rows)

    @classmethod
    def loads(cls, text: str) -> TableMachine:
        table = {}
        for line in text.splitlines():
            if not line.strip():
                continue
            c, _, x = line.partition("\t")
            table[c.strip()] = x.strip()
        return cls(table)

    def __repr__(self):
        return f"TableMachine({len(self.table)} codewords)"


# -- bulk enumeration ------------------------------------------------------

def _run_rank_range(machine: Machine, cond: str, fuel: int, lo: int, hi: int,
                    keep_all: bool) -> list[tuple[str, RunResult]]:
    from aitlab.bits import unrank
    out = []
    for r in range(lo, hi):
        p = unrank(r)
        res = machine(p, cond, fuel)
        if keep_all or isinstance(res, Halted):
            out.append((p, res))
    return out


def run_all(machine: Machine, cond: str, max_len: int, fuel: int,
            shards: int = 1, keep_all: bool = False) -> list[tuple[str, RunResult]]:
    """Run every input of length <= max_len; results come back in length-lex order.

    With ``shards > 1`` the rank range is split across worker processes; the
    merged list is identical to the single-process one.
    """
    total = (1 << (max_len + 1)) - 1
    if shards <= 1 or total < 2 * shards:
        return _run_rank_range(machine, cond, fuel, 0, total, keep_all)
    from concurrent.futures import ProcessPoolExecutor
    import multiprocessing as mp

    step = -(-total // (shards * 4))
    bounds = [(lo, min(lo + step, total)) for lo in range(0, total, step)]
    ctx = mp.get_context("fork")
    with ProcessPoolExecutor(max_workers=shards, mp_context=ctx) as pool:
        parts = pool.map(_run_rank_range, *zip(*[(machine, cond, fuel, lo, hi, keep_all)
                                                 for lo, hi in bounds]))
        merged = [item for part in parts for item in part]
    from aitlab.bits import rank
    merged.sort(key=lambda item: rank(item[0]))
    return merged


@dataclass(frozen=True)
class Event:
    program: str
    output: str
    stage: int
    steps: int


def dovetail(machine: Machine, cond: str, stages: int, shards: int = 1) -> list[Event]:
    """First-halt events of the staged enumeration up to ``stages``.

    At stage t every input of length <= t is run with fuel t, so an input p
    that halts in s steps first shows up at stage ``max(|p|, s, 1)``.  Events
    are ordered by (stage, length, lex).
    """
    if stages < 1:
        raise ValueError("stages must be >= 1")
    events = []
    for p, res in run_all(machine, cond, stages, stages, shards=shards):
        t = max(len(p), res.steps, 1)
        if t <= stages:
            events.append(Event(p, res.output, t, res.steps))
    events.sort(key=lambda e: (e.stage, len(e.program), e.program))
    return events
