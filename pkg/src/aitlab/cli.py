"""Command-line front end.

Every report line follows one grammar: an optional upper-case tag followed by
space-separated ``key=value`` tokens (values never contain spaces; empty
values are allowed).  ``--format jsonl`` emits the same records as JSON
objects, with the tag under ``"tag"``.

Exit codes: 0 success, 2 precondition violation, 1 internal error.
"""

from __future__ import annotations

import argparse
import json
import random
import sys
from dataclasses import dataclass
from fractions import Fraction

from aitlab.errors import AitError

MACHINES = ("dispatch", "prefix-dispatch", "base", "prefix-base", "direct", "empty")


@dataclass(frozen=True)
class RunConfig:
    machine: str = "dispatch"
    manifest: str | None = None
    max_len: int = 12
    fuel: int = 1000
    stages: int = 12
    seed: int = 0
    shards: int = 1
    out: str | None = None
    fmt: str = "kv"

    def __post_init__(self):
        from aitlab.errors import InvalidInput
        if self.max_len < 1 or self.fuel < 1 or self.stages < 1 or self.shards < 1:
            raise InvalidInput("horizon fields and --shards must be >= 1")


# -- line grammar ------------------------------------------------------------

def parse_line(line: str) -> dict[str, str]:
    rec: dict[str, str] = {}
    toks = line.split(" ")
    if toks and "=" not in toks[0]:
        rec["tag"] = toks.pop(0)
    for tok in toks:
        key, sep, value = tok.partition("=")
        if not sep or not key:
            raise ValueError(f"bad token {tok!r} in {line!r}")
        rec[key] = value
    return rec


def render(rec: dict[str, str]) -> str:
    head = [rec["tag"]] if "tag" in rec else []
    return " ".join(head + [f"{k}={v}" for k, v in rec.items() if k != "tag"])


def _kv(tag: str | None = None, **fields) -> str:
    rec = {"tag": tag} if tag else {}
    rec.update({k: str(v) for k, v in fields.items()})
    return render(rec)


# -- machine construction ------------------------------------------------------

def read_manifest(path: str) -> tuple[dict[str, str], str]:
    """``key=value`` settings plus the raw text (slot lines go to the registry)."""
    with open(path) as fh:
        text = fh.read()
    settings = {}
    for line in text.splitlines():
        line = line.split("#", 1)[0].strip()
        if line and not line.startswith("slot=") and "=" in line:
            k, _, v = line.partition("=")
            settings[k.strip()] = v.strip()
    return settings, text


def build_machine(name: str, manifest: str | None = None):
    from aitlab.bitvm import (ISA_VERSION, BaseMachine, DirectMachine, EmptyMachine,
                              PrefixMachine)
    from aitlab.dispatch import DispatchMachine, Registry
    from aitlab.errors import InvalidInput

    registry = None
    if manifest:
        settings, text = read_manifest(manifest)
        isa = settings.get("isa", ISA_VERSION)
        if isa != ISA_VERSION:
            raise InvalidInput(f"manifest wants ISA {isa!r}, this build runs {ISA_VERSION!r}")
        if "slot=" in text:
            registry = Registry.parse(text)
        if settings.get("mode") == "prefix" and name in ("dispatch", "base"):
            name = "prefix-" + name
    if name == "dispatch":
        return DispatchMachine(registry)
    if name == "prefix-dispatch":
        return DispatchMachine(registry, prefix=True)
    if name == "base":
        return BaseMachine()
    if name == "prefix-base":
        return PrefixMachine(BaseMachine())
    if name == "direct":
        return DirectMachine()
    if name == "empty":
        return EmptyMachine()
    raise InvalidInput(f"unknown machine {name!r}")


def _manifest_fuel(args) -> None:
    if args.manifest and args.fuel is None:
        settings, _ = read_manifest(args.manifest)
        if "fuel" in settings:
            args.fuel = int(settings["fuel"])


# -- subcommands ----------------------------------------------------------------

def _horizon(cfg: RunConfig):
    from aitlab.complexity import Horizon
    return Horizon(cfg.max_len, cfg.fuel, cfg.stages)


def cmd_eval(cfg, args):
    from aitlab.bits import check_bits
    from aitlab.bitvm import Halted, OutOfFuel
    m = build_machine(cfg.machine, cfg.manifest)
    r = m(check_bits(args.input), check_bits(args.cond), cfg.fuel)
    if isinstance(r, Halted):
        return [_kv("HALTED", output=r.output, steps=r.steps, consumed=r.consumed)]
    if isinstance(r, OutOfFuel):
        return [_kv("OUT_OF_FUEL", steps=r.steps)]
    return [_kv("DIVERGED", steps=r.steps)]


def cmd_search(cfg, args):
    from aitlab.bits import check_bits
    from aitlab.complexity import k_upper
    m = build_machine(cfg.machine, cfg.manifest)
    x = check_bits(args.input)
    est = k_upper(m, x, check_bits(args.cond), _horizon(cfg))
    if est is None:
        return [_kv("NOT_FOUND", output=x, max_len=cfg.max_len, fuel=cfg.fuel)]
    return [_kv("FOUND", output=x, value=est.value, witness=est.witness)]


def cmd_table(cfg, args):
    from aitlab.bits import check_bits
    from aitlab.complexity import k_table, table_lines
    m = build_machine(cfg.machine, cfg.manifest)
    return table_lines(k_table(m, check_bits(args.cond), _horizon(cfg), shards=cfg.shards))


def cmd_omega(cfg, args):
    from aitlab.bits import check_bits
    from aitlab.complexity import Horizon
    from aitlab.omega import omega_lower, prefix_domain_check
    m = build_machine(cfg.machine, cfg.manifest)
    cond = check_bits(args.cond)
    out = []
    for L in range(1, cfg.max_len + 1):
        h = Horizon(L, cfg.fuel)
        out.append(_kv(max_len=L, fuel=cfg.fuel,
                       omega_lower=omega_lower(m, h, cond, shards=cfg.shards)))
    rep = prefix_domain_check(m, _horizon(cfg), cond, shards=cfg.shards)
    out.append(_kv("DOMAIN", checked=rep.checked, halting=rep.halting,
                   violations=len(rep.violations), prefix_free=rep.ok))
    return out


def cmd_alloc(cfg, args):
    from aitlab.dyadic import kraft_sum
    from aitlab.kraft import AllocatorState, allocate
    lengths = [int(t) for t in args.lengths.replace(",", " ").split()]
    state = AllocatorState()
    out = []
    for i, l in enumerate(lengths):
        out.append(_kv(request=i, length=l, codeword=allocate(state, l, i)))
    out.append(_kv("TOTAL", requests=len(lengths), kraft_sum=kraft_sum(lengths),
                   free_mass=state.free_mass()))
    return out


def cmd_merge(cfg, args):
    from aitlab.omega import check_stages, merge_construction, random_merge_instance
    rng = random.Random(cfg.seed)
    K, alpha = random_merge_instance(rng, args.strings, cfg.stages)
    stages = merge_construction(K, alpha)
    bad = check_stages(K, alpha, stages)
    out = [st.line() for st in stages]
    out.append(_kv("CHECK", stages=len(stages), violations=len(bad), ok=not bad))
    return out


def cmd_pvalue(cfg, args):
    from aitlab.complexity import effective_p_value
    from aitlab.dyadic import Dyadic
    prob = Dyadic.parse(args.prob)
    return [_kv(k=args.k, prob=prob, p_value=effective_p_value(args.k, prob))]


def cmd_verify_constants(cfg, args):
    from aitlab.dispatch import DEFAULT_CONDS, verify_constants
    m = build_machine(cfg.machine, cfg.manifest)
    if not hasattr(m, "registry"):
        from aitlab.errors import InvalidInput
        raise InvalidInput("verify-constants needs a dispatch machine")
    conds = tuple(args.conds.split(",")) if args.conds is not None else DEFAULT_CONDS
    checks = verify_constants(m, cfg.max_len, cfg.fuel, conds, shards=cfg.shards)
    out = [c.line() for c in checks]
    out.append(_kv("SUMMARY", inequalities=len(checks),
                   all_pass=all(c.ok for c in checks)))
    return out


def cmd_demo_adder(cfg, args):
    from aitlab.bits import ilog2
    from aitlab.combinatorics import adder_histogram
    bound = 1 + ilog2(args.bits)
    hist = adder_histogram(args.bits)
    total = sum(hist.values())
    mean = Fraction(sum(k * c for k, c in hist.items()), total)
    out = [_kv(bits=args.bits, steps=k, count=c) for k, c in sorted(hist.items())]
    out.append(_kv("MEAN", bits=args.bits, pairs=total,
                   mean=f"{mean.numerator}/{mean.denominator}",
                   bound=bound, holds=mean <= bound))
    return out


def cmd_demo_tournament(cfg, args):
    from aitlab.combinatorics import (decode_tournament, encode_tournament,
                                      plant_transitive, tournament_bound_check)
    rng = random.Random(cfg.seed)
    ok = 0
    for _ in range(args.trials):
        n = rng.randint(2, 12)
        v = rng.randint(1, n)
        T, S = plant_transitive(rng, n, v)
        ok += decode_tournament(n, v, encode_tournament(T, S)) == T
    out = [_kv("ROUNDTRIP", trials=args.trials, identities=ok)]
    rep = tournament_bound_check(args.n)
    out += rep.lines()
    return out


def cmd_demo_projections(cfg, args):
    from aitlab.combinatorics import full_cube, projections_check
    rng = random.Random(cfg.seed)
    cube = full_cube(8, 8, 8)
    held = 0
    out = []
    for i in range(args.trials):
        A = rng.sample(cube, rng.randint(0, len(cube)))
        rep = projections_check(A, (8, 8, 8))
        held += rep.holds
        if i < args.show:
            out.append(rep.line())
    out.append(_kv("SUMMARY", trials=args.trials, holds=held))
    return out


def cmd_empirical(cfg, args):
    from aitlab.bits import check_bits
    from aitlab.complexity import empirical_a_priori, frequency_lines, k_table
    m = build_machine(cfg.machine, cfg.manifest)
    cond = check_bits(args.cond)
    freq = empirical_a_priori(m, args.samples, cfg.max_len, cfg.fuel, cfg.seed, cond)
    table = k_table(m, cond, _horizon(cfg), shards=cfg.shards)
    return frequency_lines(freq, table)


COMMANDS = {
    "eval": cmd_eval,
    "search": cmd_search,
    "table": cmd_table,
    "omega": cmd_omega,
    "alloc": cmd_alloc,
    "merge": cmd_merge,
    "pvalue": cmd_pvalue,
    "verify-constants": cmd_verify_constants,
    "demo-adder": cmd_demo_adder,
    "demo-tournament": cmd_demo_tournament,
    "demo-projections": cmd_demo_projections,
    "empirical": cmd_empirical,
}


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--machine", choices=MACHINES, default="dispatch")
    common.add_argument("--manifest")
    common.add_argument("--input", default="")
    common.add_argument("--cond", default="")
    common.add_argument("--max-len", type=int, default=12)
    common.add_argument("--fuel", type=int, default=None)
    common.add_argument("--stages", type=int, default=12)
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--shards", type=int, default=1)
    common.add_argument("--format", choices=("kv", "jsonl"), default="kv")
    common.add_argument("--out")

    ap = argparse.ArgumentParser(prog="aitlab", description=__doc__.splitlines()[0])
    sub = ap.add_subparsers(dest="command", required=True)
    subs = {name: sub.add_parser(name, parents=[common]) for name in COMMANDS}
    subs["alloc"].add_argument("--lengths", required=True,
                               help="comma separated codeword lengths")
    subs["merge"].add_argument("--strings", type=int, default=20)
    subs["pvalue"].add_argument("--k", type=int, required=True)
    subs["pvalue"].add_argument("--prob", required=True, help="exact num/2^exp")
    subs["verify-constants"].add_argument("--conds", default=None,
                                          help="comma separated conditions")
    subs["demo-adder"].add_argument("--bits", type=int, default=8)
    subs["demo-tournament"].add_argument("--n", type=int, default=5)
    subs["demo-tournament"].add_argument("--trials", type=int, default=10_000)
    subs["demo-projections"].add_argument("--trials", type=int, default=10_000)
    subs["demo-projections"].add_argument("--show", type=int, default=5)
    subs["empirical"].add_argument("--samples", type=int, default=10_000)
    return ap


def configure(argv: list[str]) -> tuple[RunConfig, argparse.Namespace]:
    args = build_parser().parse_args(argv)
    _manifest_fuel(args)
    cfg = RunConfig(args.machine, args.manifest, args.max_len,
                    args.fuel if args.fuel is not None else 1000,
                    args.stages, args.seed, args.shards, args.out, args.format)
    return cfg, args


def run_command(argv: list[str]) -> list[str]:
    """Parse ``argv`` and return the report lines (raises on errors)."""
    cfg, args = configure(argv)
    return COMMANDS[args.command](cfg, args)


def main(argv: list[str] | None = None) -> int:
    argv = sys.argv[1:] if argv is None else argv
    try:
        cfg, args = configure(argv)
        lines = COMMANDS[args.command](cfg, args)
    except (AitError, ValueError) as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 2
    except SystemExit as exc:  # argparse
        return 2 if exc.code else 0
    except Exception as exc:
        print(f"internal error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 1
    if cfg.fmt == "jsonl":
        lines = [json.dumps(parse_line(l)) for l in lines]
    text = "".join(l + "\n" for l in lines)
    if cfg.out:
        with open(cfg.out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return 0


if __name__ == "__main__":
    sys.exit(main())
