"""Acceptance criteria, one test each.  Every test records a PASS/FAIL line
that is printed in the terminal summary."""

import math
import random
import time

import pytest

from conftest import record, random_dag, two_branch_graph
from womcodes import harness
from womcodes.codec import FAIL, FailAt, build_code_table, decode, encode, write_sequence
from womcodes.generators import FlashSpec, graph_for
from womcodes.graph import iter_bits, precedes
from womcodes.labeling import LabelingProblem, brute_force_oracle, build_problem, solve_exact
from womcodes.published import TABLES
from womcodes.regions import build_regions
from womcodes.verifier import (
    check_consistency,
    failing_witness,
    simulate_worst_writes,
    upper_bound_flash,
    upper_bound_ici,
)

BUDGET = 60.0


def _cells_text(results):
    return " ".join(f"({r.cell.M},{r.cell.q})={r.text()}" for r in results if r.status != harness.MATCH)


def test_table_one_reproduced():
    start = time.perf_counter()
    results = harness.run_table("1", BUDGET, seeds=100)
    elapsed = time.perf_counter() - start
    matched = sum(r.status == harness.MATCH for r in results)
    seeded = [r for r in results if r.seed is not None]
    ok = matched == 25 and elapsed < 120
    record(1, ok, f"table 1: {matched}/25 cells exact, {len(seeded)} needed a seeded tie-break, "
                  f"{elapsed:.1f}s {_cells_text(results)}".rstrip())
    assert ok


def test_table_two_bound_coincidence():
    results = harness.run_table("2", BUDGET)
    core = [r for r in results if r.cell.q <= 8]
    stretch = [r for r in results if r.cell.q > 8]
    core_ok = all(r.status == harness.MATCH and r.t_star == upper_bound_flash(r.cell.q) for r in core)
    stretch_bad = [r for r in stretch if r.status not in (harness.MATCH, harness.TIMEOUT)]
    record(2, core_ok and not stretch_bad,
           "q=4..8: " + " ".join(r.text() for r in core)
           + "; stretch q=16,32,48: " + " ".join(r.text() for r in stretch))
    assert core_ok and not stretch_bad


def test_three_cells_seven_levels():
    cell = TABLES["3"].cell("M=7", "q=7")
    table = harness.build_cell(cell, BUDGET)
    ok = table.M == 7 and table.t_star == 8
    record(3, ok, f"n=3 q=7 M=7: M*={table.M} t*={table.t_star}")
    assert ok


def test_ici_bound_coincidence():
    results = [r for r in harness.run_table("ici-ub", BUDGET) if r.cell.q <= 8]
    ok = all(r.status == harness.MATCH and r.t_star == upper_bound_ici(r.cell.q) for r in results)
    record(4, ok, "n=2 M=8 d=3, q=4..8: " + " ".join(r.text() for r in results))
    assert ok


def _grid_corpus():
    """Every published-table cell whose state graph has at most 300 nodes."""
    seen = set()
    for td in TABLES.values():
        for cell in td.cells:
            key = (cell.n, cell.q, cell.d, cell.M)
            if key in seen or cell.q ** cell.n > 300:
                continue
            seen.add(key)
            spec = FlashSpec(cell.n, cell.q, cell.d)
            yield spec.describe() + f" M={cell.M}", build_code_table(graph_for(spec), cell.M, BUDGET, spec=spec)


def _random_corpus(count=300):
    rng = random.Random(20240601)
    for i in range(count):
        n = rng.randint(2, 30)
        g = random_dag(rng, n, rng.choice([0.05, 0.15, 0.3, 0.5]))
        k = rng.randint(2, 5)
        yield f"random #{i} |V|={n} k={k}", build_code_table(g, k, BUDGET)


@pytest.fixture(scope="module")
def corpus():
    return list(_grid_corpus()) + list(_random_corpus())


def test_formula_matches_simulation(corpus):
    checked, bad, full_bad = 0, [], 0
    for name, table in corpus:
        if table.M == 0 or table.t_star == math.inf:
            continue
        checked += 1
        t = int(table.t_star)
        sim = simulate_worst_writes(table, t + 1)
        witness = failing_witness(table, t + 1)
        res = write_sequence(table, witness) if witness else None
        witness_ok = witness is not None and len(witness) == t + 1 and isinstance(res, FailAt) and res.index == t + 1
        if sim != t or not witness_ok:
            bad.append(f"{name} M*={table.M} formula={t} simulated={sim}")
            full_bad += table.M == table.k
    ok = not bad
    record(5, ok, f"{checked} instances, {len(bad)} disagree "
                  f"({full_bad} with M*=k, {len(bad) - full_bad} with M*<k)"
                  + (f"; first: {bad[0]}" if bad else ""))
    assert ok, "\n".join(bad)


def test_consistency_sweep(corpus):
    violations, encodes = [], 0
    for name, table in corpus:
        g = table.graph
        check = check_consistency(table)
        encodes += check.encodes
        if not check:
            violations.append(f"{name}: {check.counterexample}")
        # independent restatement of the sweep
        for s in iter_bits(g.reach[g.root]):
            for m in range(1, table.M + 1):
                nxt = encode(table, s, m)
                if nxt is not FAIL and not (precedes(g, s, nxt) and decode(table, nxt) == m):
                    violations.append(f"{name}: encode({s},{m})={nxt}")
    record(6, not violations, f"{len(corpus)} tables, {encodes} encode calls, {len(violations)} violations")
    assert not violations


def test_solver_matches_oracle():
    rng = random.Random(77)
    start = time.perf_counter()
    problems = [build_problem(build_regions(two_branch_graph(), 3))]
    while len(problems) < 241:
        k = rng.randint(1, 4)
        n = rng.randint(k, 12)
        gamma = tuple(range(1, n + 1))
        sets = tuple(tuple(sorted(rng.sample(gamma, k))) for _ in range(rng.randint(1, 8)))
        problems.append(LabelingProblem(gamma, k, sets))
    mismatches = [p for p in problems if solve_exact(p).m_star != brute_force_oracle(p)]
    elapsed = time.perf_counter() - start
    ok = not mismatches and elapsed < 60
    record(7, ok, f"{len(problems)} instances (incl. the six-node example), "
                  f"{len(mismatches)} mismatches, {elapsed:.1f}s")
    assert ok


def test_table_harness_is_deterministic(tmp_path):
    outputs = []
    for run in ("a", "b"):
        results = harness.run_table("1", BUDGET, keep_text=True)
        paths = harness.save_tables("1", results, tmp_path / run)
        files = {p.name: p.read_bytes() for p in paths}
        outputs.append((harness.render("1", results, BUDGET, 0), files))
    same = outputs[0] == outputs[1]
    record(8, same, f"two table 1 runs: rendered output and {len(outputs[0][1])} table files byte-identical = {same}")
    assert same
