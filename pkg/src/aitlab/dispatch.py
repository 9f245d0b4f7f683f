"""The constant-dispatch optimal machine and its witness constructors.

Every input starts with a 10-bit constant ``C_i`` (big-endian binary of i)
that selects a rule:

* ``C_0 p``            base machine on p with the same condition
* ``C_1 p``            p with the empty condition
* ``C_2``              the condition itself
* ``C_(2i+1) p``       ``f_i(U(p, y), y)``
* ``C_(2i+2) p``       ``U(p, g_i(y))``
* ``C_300 e(p) q``     ``<U(p, z), U(q, <U(p, z), z>)>``
* ``C_301 e(n) e(m) u`` the u-th x with at least ``2**m`` partners y such
  that ``<x, y>`` has a description of length <= n under condition z
* ``C_302 e(n) u``     under condition ``<x, z>``, the u-th such partner y of x

The last two enumerate this very machine's own halting computations; since
the interpreter has its own code at hand, no quining is needed.

Inputs are read as a stream and ``Halted.consumed`` reports how much of it was
read.  In plain mode the unread tail is ignored and the index ``u`` of
``C_301``/``C_302`` is the whole remaining input.  In prefix mode the result
is defined only on exact consumption and ``u`` is written as ``e(u)`` so that
the domain stays prefix-free.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

from aitlab import bits
from aitlab.bits import (decode_nat, decode_string, encode_nat, encode_string,
                         ilog2, pair, strings_of_length, unpair)
from aitlab.bitvm import (BaseMachine, Diverged, Halted, Machine, OutOfFuel, TableMachine,
                          RunResult, dovetail, run, run_all)
from aitlab.dyadic import Dyadic
from aitlab.errors import InvalidInput, MalformedCode, NotFound

CONST_BITS = 10
PAIR_DIRECT, REVERSE_X, REVERSE_Y = 300, 301, 302
MAX_TRANSFORM = 149


def const(i: int) -> str:
    if not 0 <= i < 1 << CONST_BITS:
        raise ValueError("constant index out of range")
    return format(i, f"0{CONST_BITS}b")


# -- transforms ------------------------------------------------------------

def _swap(x, y):
    a, b = unpair(x)
    return pair(b, a)


F_TRANSFORMS: dict[str, Callable[[str, str], str]] = {
    "swap": _swap,
    "concat": lambda x, y: x + y,
    "append0": lambda x, y: x + "0",
    "append1": lambda x, y: x + "1",
    "first": lambda x, y: unpair(x)[0],
    "second": lambda x, y: unpair(x)[1],
}

G_TRANSFORMS: dict[str, Callable[[str], str]] = {
    "identity": lambda y: y,
    "pair_eps": lambda y: pair(y, ""),
    "cond_first": lambda y: unpair(y)[0],
    "cond_length": lambda y: bits.binary(len(y)),
}

DEFAULT_MANIFEST = """\
slot=3 name=swap
slot=4 name=identity
slot=5 name=concat
slot=6 name=pair_eps
slot=7 name=append0
slot=8 name=cond_first
slot=9 name=append1
slot=10 name=cond_length
slot=11 name=first
slot=13 name=second
"""


@dataclass
class Registry:
    """Slot -> transform name.  Odd slots 2i+1 hold f_i, even slots 2i+2 hold g_i."""

    slots: dict[int, str] = field(default_factory=dict)

    @classmethod
    def parse(cls, text: str) -> Registry:
        slots: dict[int, str] = {}
        for lineno, line in enumerate(text.splitlines(), 1):
            line = line.split("#", 1)[0].strip()
            if not line.startswith("slot="):
                continue
            kv = dict(tok.split("=", 1) for tok in line.split())
            try:
                slot, name = int(kv["slot"]), kv["name"]
            except (KeyError, ValueError):
                raise InvalidInput(f"line {lineno}: expected 'slot=<index> name=<transform>'")
            if slot in slots:
                raise InvalidInput(f"line {lineno}: duplicate slot {slot}")
            slots[slot] = name
        reg = cls(slots)
        reg.validate()
        return reg

    @classmethod
    def default(cls) -> Registry:
        return cls.parse(DEFAULT_MANIFEST)

    def validate(self) -> None:
        for slot, name in self.slots.items():
            if slot in (0, 1, 2, PAIR_DIRECT, REVERSE_X, REVERSE_Y):
                raise InvalidInput(f"slot {slot} is reserved")
            if not 3 <= slot < PAIR_DIRECT:
                raise InvalidInput(f"slot {slot} outside 3..299")
            table = F_TRANSFORMS if slot % 2 else G_TRANSFORMS
            if name not in table:
                kind = "f" if slot % 2 else "g"
                raise InvalidInput(f"slot {slot} needs an {kind}-transform, got {name!r}")

    def f(self, i: int) -> Callable[[str, str], str] | None:
        name = self.slots.get(2 * i + 1)
        return F_TRANSFORMS[name] if name else None

    def g(self, i: int) -> Callable[[str], str] | None:
        name = self.slots.get(2 * i + 2)
        return G_TRANSFORMS[name] if name else None

    def f_indices(self) -> list[int]:
        return sorted((s - 1) // 2 for s in self.slots if s % 2)

    def g_indices(self) -> list[int]:
        return sorted((s - 2) // 2 for s in self.slots if s % 2 == 0)

    def dumps(self) -> str:
        return "".join(f"slot={s} name={n}\n" for s, n in sorted(self.slots.items()))


# -- the machine -----------------------------------------------------------

def _shift(r: RunResult, bits_read: int, steps: int, budget: int) -> RunResult:
    if isinstance(r, Halted):
        return Halted(r.output, r.consumed + bits_read, r.steps + steps)
    if isinstance(r, Diverged):
        return Diverged(r.steps + steps)
    return OutOfFuel(budget)


class _Trace:
    """Staged enumeration of the machine's own computations under condition z.

    Programs of length <= n enter at stage ``|p|`` (the empty one at stage 1)
    and are rerun with fuel t at stage t until they halt or diverge.  Each
    attempt costs one unit plus the steps it used.  The trace records
    ``(cumulative cost, output)`` per halting event and is extended lazily;
    a search with budget F sees exactly the events whose cumulative cost is
    at most F, which is what a run with fuel F would have produced.
    """

    def __init__(self, machine: DispatchMachine, z: str, n: int):
        self.events: list[tuple[int, str]] = []
        self.used = 0
        self.done = False
        self.busy = False
        self._steps = self._run(machine, z, n)

    def _run(self, machine, z, n):
        pending: list[str] = []
        t = 0
        while True:
            t += 1
            if t == 1:
                pending.append("")
            if t <= n:
                pending.extend(strings_of_length(t))
            still = []
            for p in pending:
                self.used += 1
                r = machine(p, z, t)
                if isinstance(r, OutOfFuel):
                    self.used += t
                    still.append(p)
                else:
                    self.used += r.steps
                    if isinstance(r, Halted):
                        self.events.append((self.used, r.output))
                yield
            pending = still
            if t >= n and not pending:
                self.done = True
                return

    def advance(self) -> None:
        self.busy = True
        try:
            next(self._steps, None)
        finally:
            self.busy = False


class DispatchMachine:
    """``U(s, y)`` with shared fuel; each dispatch layer costs one unit."""

    def __init__(self, registry: Registry | None = None, prefix: bool = False):
        self.registry = registry if registry is not None else Registry.default()
        self.prefix = prefix
        self._traces: dict[tuple[str, int], _Trace] = {}

    def __getstate__(self):
        return {"registry": self.registry, "prefix": self.prefix}

    def __setstate__(self, state):
        self.__init__(state["registry"], state["prefix"])

    def __repr__(self):
        return f"DispatchMachine(prefix={self.prefix})"

    def __call__(self, s: str, cond: str, fuel: int) -> RunResult:
        r = self.stream(s, cond, fuel)
        if self.prefix and isinstance(r, Halted) and r.consumed != len(s):
            return Diverged(r.steps)
        return r

    def registered(self, i: int) -> bool:
        if i in (0, 1, 2, PAIR_DIRECT, REVERSE_X, REVERSE_Y):
            return True
        return i in self.registry.slots

    def stream(self, s: str, cond: str, fuel: int) -> RunResult:
        if len(s) < CONST_BITS:
            return Diverged(0)
        i = int(s[:CONST_BITS], 2)
        if not self.registered(i):
            return Diverged(0)
        if fuel < 1:
            return OutOfFuel(fuel)
        p = s[CONST_BITS:]
        rest = fuel - 1
        head = CONST_BITS

        if i == 0:
            try:
                q, used = decode_string(p)
            except MalformedCode:
                return Diverged(1)
            return _shift(run(q, p[used:], cond, rest), head + used, 1, fuel)
        if i == 1:
            return _shift(self.stream(p, "", rest), head, 1, fuel)
        if i == 2:
            return Halted(cond, head, 1)
        if i == PAIR_DIRECT:
            return self._pair_direct(p, cond, fuel)
        if i in (REVERSE_X, REVERSE_Y):
            return self._reverse(i, p, cond, fuel)
        if i % 2:
            f = self.registry.f((i - 1) // 2)
            r = self.stream(p, cond, rest)
            if not isinstance(r, Halted):
                return _shift(r, head, 1, fuel)
            if rest - r.steps < 1:
                return OutOfFuel(fuel)
            return Halted(f(r.output, cond), head + r.consumed, r.steps + 2)
        g = self.registry.g((i - 2) // 2)
        if rest < 1:
            return OutOfFuel(fuel)
        return _shift(self.stream(p, g(cond), rest - 1), head, 2, fuel)

    def _delimited(self, p: str, cond: str, fuel: int) -> RunResult:
        r = self.stream(p, cond, fuel)
        if self.prefix and isinstance(r, Halted) and r.consumed != len(p):
            return Diverged(r.steps)
        return r

    def _pair_direct(self, payload: str, z: str, fuel: int) -> RunResult:
        try:
            p, used = decode_string(payload)
        except MalformedCode:
            return Diverged(1)
        rest = fuel - 1
        r1 = self._delimited(p, z, rest)
        if not isinstance(r1, Halted):
            return _shift(r1, 0, 1, fuel)
        x = r1.output
        r2 = self.stream(payload[used:], pair(x, z), rest - r1.steps)
        if not isinstance(r2, Halted):
            return _shift(r2, 0, 1 + r1.steps, fuel)
        return Halted(pair(x, r2.output), CONST_BITS + used + r2.consumed,
                      1 + r1.steps + r2.steps)

    def _read_index(self, payload: str, pos: int) -> tuple[int, int]:
        if self.prefix:
            u, used = decode_string(payload, pos)
            return (int(u, 2) if u else 0), pos + used
        u = payload[pos:]
        return (int(u, 2) if u else 0), len(payload)

    def _reverse(self, i: int, payload: str, cond: str, fuel: int) -> RunResult:
        try:
            n, a = decode_nat(payload)
            pos = a
            if i == REVERSE_X:
                m, b = decode_nat(payload, pos)
                pos += b
                if m > n:
                    return Diverged(1)
            u, pos = self._read_index(payload, pos)
        except MalformedCode:
            return Diverged(1)
        if i == REVERSE_X:
            pick = _qualified_picker(m, u)
            z = cond
        else:
            x, z = unpair(cond)
            pick = _partner_picker(x, u)
        r = self._search(z, n, fuel - 1, pick)
        if isinstance(r, Halted):
            return Halted(r.output, CONST_BITS + pos, 1 + r.steps)
        return _shift(r, 0, 1, fuel)

    def _search(self, z: str, n: int, budget: int, pick) -> RunResult:
        key = (z, n)
        trace = self._traces.get(key)
        if trace is None:
            trace = self._traces[key] = _Trace(self, z, n)
        i = 0
        while True:
            while i < len(trace.events):
                used, out = trace.events[i]
                if used > budget:
                    return OutOfFuel(budget)
                found = pick(out)
                if found is not None:
                    return Halted(found, 0, used)
                i += 1
            if trace.used > budget:
                return OutOfFuel(budget)
            if trace.done:
                return Diverged(trace.used)
            if trace.busy:
                # re-entered while this trace is being extended; replay privately
                trace = _Trace(self, z, n)
                i = 0
                continue
            trace.advance()


def _qualified_picker(m: int, u: int):
    partners: dict[str, set[str]] = {}
    need = 1 << m
    count = [0]

    def pick(s: str) -> str | None:
        x, y = unpair(s)
        ys = partners.setdefault(x, set())
        if y in ys:
            return None
        ys.add(y)
        if len(ys) == need:
            if count[0] == u:
                return x
            count[0] += 1
        return None
    return pick


def _partner_picker(x: str, u: int):
    seen: set[str] = set()

    def pick(s: str) -> str | None:
        a, y = unpair(s)
        if a != x or y in seen:
            return None
        if len(seen) == u:
            return y
        seen.add(y)
        return None
    return pick


# -- witness constructors --------------------------------------------------

def lift_cond(p: str) -> str:
    return const(1) + p


def self_witness() -> str:
    return const(2)


def apply_f(i: int, p: str) -> str:
    return const(2 * i + 1) + p


def recondition_g(i: int, p: str) -> str:
    return const(2 * i + 2) + p


def pair_direct(p: str, q: str) -> str:
    return const(PAIR_DIRECT) + encode_string(p) + q


def base_program(s: str) -> str:
    """Route an input of the base machine through ``C_0``."""
    return const(0) + s


def pair_direct_budget(p: str, q: str) -> int:
    """Length bound |p| + 2 floor(log |p|) + |q| + 12 for :func:`pair_direct`."""
    return len(p) + 2 * ilog2(len(p)) + len(q) + 12


# -- reverse direction of the pair formula ----------------------------------

@dataclass(frozen=True)
class ReverseWitnesses:
    p301: str
    p302: str
    n: int
    m: int
    u_x: str
    u_y: str


def _index_bits(k: int, width: int) -> str:
    return format(k, f"0{width}b") if width else ""


def reverse_witnesses(x: str, y: str, z: str, n: int, stages: int,
                      machine: DispatchMachine | None = None,
                      shards: int = 1) -> ReverseWitnesses:
    """Descriptions of x given z and of y given <x, z> via C_301 / C_302.

    Replays the staged enumeration of the machine's own halting computations
    (programs of length <= n, condition z) up to ``stages``.  Raises
    :class:`NotFound` if ``<x, y>`` has not shown up by then.
    """
    machine = machine or DispatchMachine()
    events = [e for e in dovetail(machine, z, stages, shards=shards)
              if len(e.program) <= n]
    target = pair(x, y)
    if not any(e.output == target for e in events):
        raise NotFound(f"<x,y> has no description of length <= {n} by stage {stages}")
    outputs = [e.output for e in events]

    ys: list[str] = []
    for s in outputs:
        a, b = unpair(s)
        if a == x and b not in ys:
            ys.append(b)
    m = ilog2(len(ys))

    partners: dict[str, set[str]] = {}
    order: list[str] = []
    for s in outputs:
        a, b = unpair(s)
        bucket = partners.setdefault(a, set())
        if b not in bucket:
            bucket.add(b)
            if len(bucket) == 1 << m:
                order.append(a)
    ux = order.index(x)
    uy = ys.index(y)

    if machine.prefix:
        tail_x = encode_string(format(ux, "b") if ux else "")
        tail_y = encode_string(format(uy, "b") if uy else "")
    else:
        tail_x = _index_bits(ux, n - m + 1)
        tail_y = _index_bits(uy, m + 1)
    p301 = const(REVERSE_X) + encode_nat(n) + encode_nat(m) + tail_x
    p302 = const(REVERSE_Y) + encode_nat(n) + tail_y
    return ReverseWitnesses(p301, p302, n, m, tail_x, tail_y)


# -- optimal -> universal ---------------------------------------------------

class EmbeddedUniversal:
    """``U'(0^d z, y) = U0(z, y)``; everything else is delegated to D."""

    def __init__(self, inner: Machine, d: int, base: Machine | None = None):
        if d < 1:
            raise ValueError("d must be >= 1")
        self.inner, self.d = inner, d
        self.base = base or BaseMachine()
        self.prefix = getattr(inner, "prefix", False)

    def __call__(self, s: str, cond: str, fuel: int) -> RunResult:
        if s.startswith("0" * self.d):
            r = self.base(s[self.d:], cond, fuel)
            if isinstance(r, Halted):
                return Halted(r.output, r.consumed + self.d, r.steps)
            return r
        return self.inner(s, cond, fuel)

    def __repr__(self):
        return f"EmbeddedUniversal({self.inner!r}, d={self.d})"


def optimal_to_universal(D: Machine, d: int) -> EmbeddedUniversal:
    return EmbeddedUniversal(D, d)


@dataclass
class ZeroRegionReport:
    d: int
    max_len: int
    fuel: int
    conds: tuple[str, ...]
    # (cond, output, program) minimal D-descriptions starting with 0^d
    zero_minimal: list[tuple[str, str, str]] = field(default_factory=list)
    # (cond, output, program) embedded descriptions beating D's minimum
    shorter_embedded: list[tuple[str, str, str]] = field(default_factory=list)

    @property
    def clean(self) -> bool:
        return not self.zero_minimal and not self.shorter_embedded

    def lines(self) -> list[str]:
        out = [f"d={self.d} max_len={self.max_len} fuel={self.fuel} "
               f"zero_minimal={len(self.zero_minimal)} "
               f"shorter_embedded={len(self.shorter_embedded)} clean={self.clean}"]
        for c, x, p in self.zero_minimal:
            out.append(f"finding=zero_minimal cond={c} output={x} program={p}")
        for c, x, p in self.shorter_embedded:
            out.append(f"finding=shorter_embedded cond={c} output={x} program={p}")
        return out


def check_zero_region(D: Machine, d: int, max_len: int, fuel: int,
                      conds=("",), base: Machine | None = None,
                      shards: int = 1) -> ZeroRegionReport:
    """Does the region 0^d matter for D's shortest descriptions within the horizon?"""
    base = base or BaseMachine()
    prefix0 = "0" * d
    report = ZeroRegionReport(d, max_len, fuel, tuple(conds))
    for c in conds:
        best: dict[str, int] = {}
        halting = run_all(D, c, max_len, fuel, shards=shards)
        for p, r in halting:
            best.setdefault(r.output, len(p))
        for p, r in halting:
            if best[r.output] == len(p) and p.startswith(prefix0):
                report.zero_minimal.append((c, r.output, p))
        if max_len >= d:
            for z, r in run_all(base, c, max_len - d, fuel, shards=shards):
                k = best.get(r.output)
                if k is None or d + len(z) < k:
                    report.shorter_embedded.append((c, r.output, prefix0 + z))
    return report


def find_zero_region(D: Machine, max_len: int, fuel: int, conds=("",),
                     shards: int = 1) -> tuple[int, ZeroRegionReport]:
    """Smallest d >= 1 whose zero-region report is clean (d = max_len + 1 always is)."""
    for d in range(1, max_len + 2):
        rep = check_zero_region(D, d, max_len, fuel, conds, shards=shards)
        if rep.clean:
            return d, rep
    raise AssertionError("d = max_len + 1 is always clean")


# -- constant verification ---------------------------------------------------

DEFAULT_CONDS = ("", "0", "1", "01", "101", "0110")


@dataclass
class ConstantCheck:
    name: str
    checks: int = 0
    violations: list[str] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.violations

    def line(self) -> str:
        status = "pass" if self.ok else "fail"
        return (f"inequality={self.name} checks={self.checks} "
                f"violations={len(self.violations)} status={status}")


def verify_constants(machine: DispatchMachine, max_len: int, fuel: int,
                     conds=DEFAULT_CONDS, shards: int = 1) -> list[ConstantCheck]:
    """Check every dispatch inequality by witness transport over full tables.

    For each entry of a k-table at (max_len, fuel) the constructed witness is
    evaluated (with the fixed fuel surcharge added) and must return the
    predicted output at the predicted length; where the transported witness
    still fits within max_len the target table entry must be at least as good.
    """
    from aitlab.complexity import Horizon, k_table

    h = Horizon(max_len, fuel)
    tables: dict[str, dict] = {}

    def table(c):
        if c not in tables:
            tables[c] = k_table(machine, c, h, shards=shards)
        return tables[c]

    def transport(chk, w, cond, expect, length_bound, extra_fuel, where):
        chk.checks += 1
        r = machine(w, cond, fuel + extra_fuel)
        if not isinstance(r, Halted) or r.output != expect:
            chk.violations.append(f"{where}: got {r}")
            return
        if len(w) > length_bound:
            chk.violations.append(f"{where}: length {len(w)} > {length_bound}")
            return
        if len(w) <= max_len:
            est = table(cond).get(expect)
            if est is None or est.value > len(w):
                chk.violations.append(f"{where}: table entry {est} worse than {len(w)}")

    results = []

    chk = ConstantCheck("lift_cond")  # K(x|y) <= K(x) + 10
    for x, est in table("").items():
        for y in conds:
            transport(chk, lift_cond(est.witness), y, x, est.value + CONST_BITS, 1,
                      f"x={x} y={y}")
    results.append(chk)

    chk = ConstantCheck("self")  # K(x|x) <= 10
    for y in set(conds) | set(table("")):
        transport(chk, self_witness(), y, y, CONST_BITS, 0, f"x={y}")
    results.append(chk)

    for i in machine.registry.f_indices():
        f = machine.registry.f(i)
        name = machine.registry.slots[2 * i + 1]
        chk = ConstantCheck(f"f{i}:{name}")  # K(f(x,y)|y) <= K(x|y) + 10
        for y in conds:
            for x, est in table(y).items():
                transport(chk, apply_f(i, est.witness), y, f(x, y),
                          est.value + CONST_BITS, 2, f"x={x} y={y}")
        results.append(chk)

    for i in machine.registry.g_indices():
        g = machine.registry.g(i)
        name = machine.registry.slots[2 * i + 2]
        chk = ConstantCheck(f"g{i}:{name}")  # K(x|y) <= K(x|g(y)) + 10
        for y in conds:
            for x, est in table(g(y)).items():
                transport(chk, recondition_g(i, est.witness), y, x,
                          est.value + CONST_BITS, 2, f"x={x} y={y}")
        results.append(chk)

    chk = ConstantCheck("pair_direct")  # K(<x,y>|z) <= K(x|z) + 2 log K(x|z) + K(y|<x,z>) + 12
    for z in conds:
        for x, ep in table(z).items():
            for y, eq in table(pair(x, z)).items():
                transport(chk, pair_direct(ep.witness, eq.witness), z, pair(x, y),
                          pair_direct_budget(ep.witness, eq.witness), fuel + 1,
                          f"x={x} y={y} z={z}")
    results.append(chk)
    return results


# -- geometric-tail machine --------------------------------------------------

def geometric_machine(K: dict[str, int], depth: int) -> TableMachine:
    """Prefix-free table with one codeword for x at each length K(x)+1 .. K(x)+depth.

    Requests are served round by round (all strings at offset 1, then 2, ...)
    in length-lex order of x.
    """
    from aitlab.kraft import allocate_revisions

    order = sorted(K, key=lambda x: (len(x), x))
    stream = [(x, K[x] + i) for i in range(1, depth + 1) for x in order]
    return TableMachine({c: x for x, _, c in allocate_revisions(stream)})


def truncated_semimeasure(K_x: int, depth: int) -> Dyadic:
    """``2**-K * (1 - 2**-depth)``, the mass of the lengths K+1 .. K+depth."""
    return Dyadic((1 << depth) - 1, K_x + depth)
