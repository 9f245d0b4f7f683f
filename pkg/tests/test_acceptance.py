"""End-to-end acceptance checks, one test per criterion, at the stated tolerances."""

import random
import time

import pytest

from aitlab.bits import encode_nat, ilog2, pair, unpair, unrank
from aitlab.bitvm import (BaseMachine, Halted, PrefixMachine, adjunct, assemble, eval_plain, run)
from aitlab.cli import run_command
from aitlab.combinatorics import (adder_histogram, count_transitive_tournaments,
                                  decode_tournament, encode_tournament,
                                  full_cube, plant_transitive, projections_check,
                                  tournament_bound_check)
from aitlab.complexity import Horizon, effective_p_value, k_table
from aitlab.dispatch import (DEFAULT_CONDS, DispatchMachine, find_zero_region,
                             geometric_machine, optimal_to_universal,
                             reverse_witnesses, truncated_semimeasure,
                             verify_constants)
from aitlab.dyadic import ONE, Dyadic, kraft_sum
from aitlab.errors import Infeasible, NotFound
from aitlab.kraft import AllocatorState, allocate
from aitlab.omega import (check_stages, default_slack, merge_construction,
                          omega_lower, prefix_domain_check,
                          random_merge_instance, weight)


def test_c01_codec_bounds(record):
    t0 = time.perf_counter()
    codes = [encode_nat(n) for n in range(1 << 16)]
    lengths_ok = all(len(c) <= 2 * ilog2(n) + 2 for n, c in enumerate(codes))
    # a set is prefix-free iff no word is a prefix of its lexicographic successor
    srt = sorted(codes)
    prefix_free = len(set(codes)) == len(codes) and not any(
        b.startswith(a) for a, b in zip(srt, srt[1:]))
    dt = time.perf_counter() - t0
    ok = lengths_ok and prefix_free and dt < 5
    assert record("1", ok, f"n<2^16 prefix_free={prefix_free} "
                  f"length_bound={lengths_ok} runtime={dt:.2f}s")


# -- criterion 2 -----------------------------------------------------------------

MAXL = 40


def _feasible_stream(rng):
    n = rng.randint(1, 1000)
    out, used = [], 0
    while len(out) < n and used < 1 << MAXL:
        l = rng.choice((rng.randint(1, 12), rng.randint(8, MAXL)))
        if used + (1 << (MAXL - l)) <= 1 << MAXL:
            out.append(l)
            used += 1 << (MAXL - l)
    return out


def _serve_checked(lengths):
    """Allocate with per-step invariant checks; returns the codewords."""
    state = AllocatorState()
    free_int, alloc_int = 1 << MAXL, 0
    words = []
    for l in lengths:
        before = dict(state.free)
        w = allocate(state, l)
        assert len(w) == l
        added = {k: s for k, s in state.free.items() if before.get(k) != s}
        removed = {k for k, s in before.items() if state.free.get(k) != s}
        # the free lengths stay distinct and each key matches its string
        assert all(len(s) == k for k, s in added.items())
        assert len(state.free) == len(set(state.free.values()))
        free_int += sum(1 << (MAXL - k) for k in added) - sum(1 << (MAXL - k) for k in removed)
        alloc_int += 1 << (MAXL - l)
        assert free_int + alloc_int == 1 << MAXL
        words.append(w)
    return words, state


def test_c02_kraft_allocator(record):
    t0 = time.perf_counter()
    rng = random.Random(2024)
    feasible_ok = 0
    for i in range(10_000):
        lengths = _feasible_stream(rng)
        words, state = _serve_checked(lengths)
        srt = sorted(words + state.free_strings())
        assert not any(b.startswith(a) for a, b in zip(srt, srt[1:]))
        if i % 500 == 0:
            state.check()
        feasible_ok += 1
    infeasible_ok = 0
    for _ in range(1000):
        lengths = _feasible_stream(rng)[: rng.randint(1, 200)]
        total = kraft_sum(lengths)
        while True:
            l = rng.randint(0, 12)
            lengths.append(l)
            total = total + Dyadic(1, l)
            if total > ONE:
                break
        state = AllocatorState()
        for l in lengths[:-1]:
            allocate(state, l)
        with pytest.raises(Infeasible):
            allocate(state, lengths[-1])
        infeasible_ok += 1
    dt = time.perf_counter() - t0
    ok = feasible_ok == 10_000 and infeasible_ok == 1000 and dt < 60
    assert record("2", ok, f"feasible={feasible_ok}/10000 infeasible_fail_at_first={infeasible_ok}/1000 "
                  f"runtime={dt:.1f}s")


def test_c03_adjunction(record):
    rng = random.Random(3)
    ops = ["HALT", "O0", "O1", "OW", "W0", "W1", "WCLR", "WPOP", "READ", "YREAD",
           "SKIPZ", "SKIPF", "WSHIFT", "NOP", "JF", "JB"]
    mismatches = halted = 0
    for i in range(1000):
        if i % 2:
            q = format(rng.getrandbits(64), "064b")[: rng.randint(0, 64)]
        else:
            words = []
            for _ in range(rng.randint(1, 12)):
                op = rng.choice(ops)
                words.append(f"{op} {rng.randint(0, 3)}" if op in ("JF", "JB") else op)
            q = assemble(", ".join(words))
        r = "".join(rng.choice("01") for _ in range(rng.randint(0, 16)))
        y = "".join(rng.choice("01") for _ in range(rng.randint(0, 16)))
        a, b = eval_plain(adjunct(q, r), y, 500), run(q, r, y, 500)
        mismatches += a != b
        halted += isinstance(b, Halted)
    assert record("3", mismatches == 0, f"trials=1000 mismatches={mismatches} halted={halted}")


def test_c04_final_constants(record):
    t0 = time.perf_counter()
    checks = verify_constants(DispatchMachine(), 16, 10_000, DEFAULT_CONDS)
    dt = time.perf_counter() - t0
    bad = sum(len(c.violations) for c in checks)
    for c in checks:
        print(c.line())
    ok = bad == 0 and len(checks) == 13
    assert record("4", ok, f"inequalities={len(checks)} checks={sum(c.checks for c in checks)} "
                  f"violations={bad} runtime={dt:.1f}s")


REVERSE_Z = [unrank(r) for r in range(1, 21)] + ["0110", "11111", "101010"]


def _reverse_instances(ns):
    for n in ns:
        for z in REVERSE_Z:
            x, y = unpair(z)
            yield x, y, z, n


def _check_reverse(instances):
    U = DispatchMachine()
    done = decoded = within = 0
    missing = 0
    for x, y, z, n in instances:
        try:
            w = reverse_witnesses(x, y, z, n, 12, machine=U)
        except NotFound:
            missing += 1
            continue
        done += 1
        rx = U(w.p301, z, 10**6)
        ry = U(w.p302, pair(x, z), 10**6)
        decoded += isinstance(rx, Halted) and rx.output == x and ry.output == y
        within += (len(w.p301) + len(w.p302) <= n + 6 * ilog2(n) + 28
                   and len(w.p301) <= (n - w.m + 1) + 4 * ilog2(n) + 14
                   and len(w.p302) <= (w.m + 1) + 2 * ilog2(n) + 12)
    return done, decoded, within, missing


def test_c05_reverse_witnesses(record):
    # as stated: n <= 8.  Every dispatch program starts with a 10-bit constant,
    # so nothing has a description of length <= 8 and no instance exists.
    done, decoded, within, missing = _check_reverse(_reverse_instances(range(1, 9)))
    ok = done >= 20 and decoded == done and within == done
    assert record("5", ok, f"n<=8 stages<=12: instances={done} decoded={decoded} "
                  f"within_budget={within} not_found={missing}")


def test_c05b_reverse_witnesses_smallest_feasible_n(record):
    done, decoded, within, missing = _check_reverse(_reverse_instances([10, 11, 12]))
    ok = done >= 20 and decoded == done and within == done and missing == 0
    assert record("5b", ok, f"n in 10..12 stages=12: instances={done} decoded={decoded} "
                  f"within_budget={within}")


def test_c06_prefix_domain_and_omega(record):
    P = DispatchMachine(prefix=True)
    reps = [prefix_domain_check(P, Horizon(14, 10_000), c) for c in DEFAULT_CONDS]
    reps.append(prefix_domain_check(PrefixMachine(BaseMachine()), Horizon(14, 10_000)))
    domain_ok = all(r.ok for r in reps)
    ladder = []
    for machine in (P, PrefixMachine(BaseMachine())):
        vals = [omega_lower(machine, Horizon(L, 1000 * (L - 10))) for L in range(11, 21)]
        ladder.append(vals)
    monotone = all(a <= b for vals in ladder for a, b in zip(vals, vals[1:]))
    bounded = all(v <= ONE for vals in ladder for v in vals)
    ok = domain_ok and monotone and bounded
    assert record("6", ok, f"prefix_free={domain_ok} monotone={monotone} le_one={bounded} "
                  f"omega_dispatch={ladder[0][-1]} omega_base={ladder[1][-1]}")


def test_c07_merge(record):
    rng = random.Random(7)
    bad = 0
    gaps_ok = 0
    for _ in range(100):
        K, alpha = random_merge_instance(rng, rng.randint(1, 50), rng.randint(1, 200))
        stages = merge_construction(K, alpha)
        bad += len(check_stages(K, alpha, stages))
        t = len(stages) - 1
        gap = weight(K[-1]) + alpha[-1] - stages[-1].sum_kprime
        gaps_ok += gap <= default_slack(t)
    ok = bad == 0 and gaps_ok == 100
    assert record("7", ok, f"instances=100 violations={bad} final_gap_ok={gaps_ok}/100")


def test_c08_geometric_machine(record):
    table = k_table(PrefixMachine(BaseMachine()), "", Horizon(18, 1000))
    K = {x: e.value for x, e in table.items()}
    K.update({unrank(r): 3 + r % 5 for r in range(40, 48)})
    mismatches = entries = 0
    for depth in range(1, 7):
        m = geometric_machine(K, depth)
        for x, k in K.items():
            mass = kraft_sum(len(c) for c, out in m.table.items() if out == x)
            entries += 1
            mismatches += mass != Dyadic(1, k) * (ONE - Dyadic(1, depth))
            mismatches += mass != truncated_semimeasure(k, depth)
    # the full geometric tail K+1, K+2, ... sums to 2^-K, not 2^-(K+1)
    record("8", mismatches == 0,
           f"entries={entries} mismatches={mismatches} "
           f"note=limit_is_2^-K_not_2^-(K+1)")
    assert mismatches == 0


def test_c09_adder(record):
    t0 = time.perf_counter()
    hist = adder_histogram(8)
    total = sum(hist.values())
    steps = sum(k * c for k, c in hist.items())
    dt = time.perf_counter() - t0
    golden = steps == 207247 and total == 65536
    ok = steps <= 4 * total and golden and dt < 10
    assert record("9", ok, f"mean={steps}/{total} (~{steps / total:.4f}) bound=4 "
                  f"golden={golden} runtime={dt:.2f}s")


def test_c10_tournaments(record):
    rng = random.Random(10)
    ids = 0
    for _ in range(10_000):
        n = rng.randint(2, 16)
        v = rng.randint(1, n)
        T, S = plant_transitive(rng, n, v)
        ids += decode_tournament(n, v, encode_tournament(T, S)) == T
    rep = tournament_bound_check(5)
    for line in rep.lines():
        print(line)
    sums = sum(rep.histogram.values()) == 1 << 10
    flagged = all(r.vacuous == (r.bound >= 1 << 10) for r in rep.rows)
    t4 = count_transitive_tournaments(4)
    ok = ids == 10_000 and sums and rep.ok and flagged and t4 == 24
    vac = sum(r.vacuous for r in rep.rows)
    assert record("10", ok, f"roundtrips={ids}/10000 n5_total={sum(rep.histogram.values())} "
                  f"bound_holds={rep.ok} vacuous_rows={vac}/5 n4_transitive={t4}")


def test_c11_projections(record):
    rng = random.Random(11)
    cube = full_cube(8, 8, 8)
    held = sum(projections_check(rng.sample(cube, rng.randint(0, 512)), (8, 8, 8)).holds
               for _ in range(10_000))
    assert record("11", held == 10_000, f"trials=10000 holds={held}")


def test_c12_optimal_to_universal(record):
    D = DispatchMachine()
    d, rep = find_zero_region(D, 16, 10_000, DEFAULT_CONDS)
    Up = optimal_to_universal(D, d)
    h = Horizon(16, 10_000)
    diffs = outputs = 0
    for c in DEFAULT_CONDS:
        a = {x: e.value for x, e in k_table(D, c, h).items()}
        b = {x: e.value for x, e in k_table(Up, c, h).items()}
        outputs += len(a)
        diffs += a != b
    embedded = Up("0" * d + adjunct(assemble("O1, HALT")), "", 10)
    ok = rep.clean and diffs == 0 and isinstance(embedded, Halted)
    assert record("12", ok, f"d={d} conds={len(DEFAULT_CONDS)} outputs={outputs} "
                  f"differing_tables={diffs}")


def test_c13_p_values(record):
    a = effective_p_value(100, Dyadic.parse("1/2^1000"))
    b = effective_p_value(100, Dyadic.parse("1/2^1100"))
    cli = run_command(["pvalue", "--k", "100", "--prob", "1/2^1000"])[0]
    ok = a == Dyadic(1, 900) and b == Dyadic(1, 1000) and cli.endswith("p_value=1/2^900")
    assert record("13", ok, f"first={a} second={b}")


SWEEPS = [
    ["table", "--max-len", "16", "--fuel", "10000", "--cond", "01"],
    ["table", "--machine", "prefix-base", "--max-len", "18", "--fuel", "1000"],
    ["omega", "--machine", "prefix-dispatch", "--max-len", "14", "--fuel", "10000"],
    ["verify-constants", "--max-len", "16", "--fuel", "10000"],
    ["empirical", "--machine", "base", "--samples", "5000", "--max-len", "16",
     "--fuel", "1000", "--seed", "1"],
    ["merge", "--stages", "120", "--strings", "30", "--seed", "5"],
    ["demo-adder"],
    ["demo-tournament", "--trials", "2000"],
    ["demo-projections", "--trials", "2000"],
    ["alloc", "--lengths", "3,1,4,2,5"],
]


def test_c14_determinism(record):
    differing = []
    for argv in SWEEPS:
        runs = ["\n".join(run_command(argv + ["--shards", str(s)])) for s in (1, 1, 4, 4)]
        if len(set(runs)) != 1:
            differing.append(argv[0])
    ok = not differing
    assert record("14", ok, f"sweeps={len(SWEEPS)} shards=1,4 repeats=2 differing={differing}")
