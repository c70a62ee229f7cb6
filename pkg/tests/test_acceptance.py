"""End-to-end acceptance criteria, one test per criterion.

Each test prints a single ``[PASS]``/``[FAIL]`` line; the lines are also
collected and repeated in the pytest terminal summary.
"""

from __future__ import annotations

import json
import math
from fractions import Fraction

import networkx as nx
import numpy as np
import pytest

from pseudoramsey.cli import main
from pseudoramsey.constructions import balanced_blowup, complete_bipartite, cycle, paley, turan
from pseudoramsey.graph_core import Graph, VertexSet, clique_number, count_independent_tuples
from pseudoramsey.persistence import load_document, replay
from pseudoramsey.ramsey import FailureReport, RamseyInstance, certify, expected_it_blowup, monte_carlo_it
from pseudoramsey.spectral import adjacency_spectrum, ar_bound, ar_trace, expander_mixing_check, ndl_certify

from .conftest import brute_tuple_count

RESULTS: list[str] = []

BASES = {"cycle(5)": cycle(5), "paley(13)": paley(13), "turan(6,3)": turan(6, 3)}


def certified_graphs() -> dict[str, Graph]:
    out = dict(BASES)
    out["turan(12,3)"] = turan(12, 3)
    for name, g in BASES.items():
        for t in (2, 3):
            out[f"blowup({name},{t})"] = balanced_blowup(g, t)[0]
    out["K32,32"] = complete_bipartite(32, 32)
    return out


def report(number: int, title: str, ok: bool, detail: str) -> None:
    line = f"[{'PASS' if ok else 'FAIL'}] criterion {number}: {title} | {detail}"
    RESULTS.append(line)
    print(line)
    assert ok, line


def cli(*argv) -> int:
    return main([str(a) for a in argv])


def test_criterion_1_spectral_golden_values():
    errs = []
    p = ndl_certify(paley(13))
    errs.append(abs(p.lam - (1 + math.sqrt(13)) / 2))
    t = ndl_certify(turan(12, 3))
    errs.append(abs(t.lam - 4.0))
    exact = (p.n, p.d) == (13, 6) and (t.n, t.d) == (12, 8)
    worst = max(errs)
    report(1, "spectral golden values", exact and worst <= 1e-9,
           f"paley13 lam={p.lam:.12f}, turan(12,3) lam={t.lam:.12f}, max err={worst:.2e}")


def test_criterion_2_blowup_laws():
    worst, omega_ok = 0.0, True
    for g in BASES.values():
        base_spec, omega = adjacency_spectrum(g), clique_number(g)
        for t in (2, 3):
            blown, _ = balanced_blowup(g, t)
            expected = sorted([t * x for x in base_spec] + [0.0] * (g.n * (t - 1)), reverse=True)
            worst = max(worst, float(np.max(np.abs(np.array(adjacency_spectrum(blown)) - expected))))
            omega_ok &= clique_number(blown) == omega
    report(2, "blowup spectrum and clique number", worst <= 1e-8 and omega_ok,
           f"6 blowups, max spectral err={worst:.2e}, clique numbers preserved={omega_ok}")


def test_criterion_3_tuple_count_bound_and_oracle():
    g = complete_bipartite(32, 32)
    rep = count_independent_tuples(g, 70)
    b = ar_bound(ndl_certify(g), 70)
    closed = 70 * math.log(4 * math.e * 64 * 32 / 32)
    bound_ok = (rep.exact_count == 2 * 32**70 and math.log(rep.exact_count) <= b.log_bound
                and math.isclose(b.log_bound, closed, rel_tol=1e-12) and b.precondition_met)

    mismatches = checked = 0
    for h in nx.graph_atlas_g():
        if not 1 <= h.number_of_nodes() <= 6:
            continue
        small = Graph.from_edges(h.number_of_nodes(), h.edges())
        for t in range(1, 6):
            checked += 1
            mismatches += count_independent_tuples(small, t).exact_count != brute_tuple_count(small, t)
    report(3, "tuple-count bound and enumeration oracle", bound_ok and mismatches == 0,
           f"ln count={math.log(rep.exact_count):.4f} <= {b.log_bound:.4f}, threshold={b.threshold:.4f}; "
           f"{checked} (graph, t) cases, {mismatches} mismatches")


def random_nonadjacent_sequence(g: Graph, rng: np.random.Generator) -> list[int]:
    length = int(rng.integers(1, g.n + 1))
    seq: list[int] = []
    allowed = g.vertex_mask
    for _ in range(length):
        options = [v for v in range(g.n) if (allowed >> v) & 1]
        v = options[int(rng.integers(len(options)))]
        seq.append(v)
        allowed &= ~g.rows[v]
    return seq


def test_criterion_4_candidate_pool_trace():
    rng = np.random.default_rng(4)
    sequences = violations = 0
    for g in certified_graphs().values():
        cert = ndl_certify(g)
        limit = math.ceil(2 * g.n / cert.d * math.log(g.n))
        for _ in range(1000):
            rep = ar_trace(g, cert, random_nonadjacent_sequence(g, rng))
            sequences += 1
            bad = any(x >= rep.tk_limit for x in rep.tk_sizes) or rep.shrink_steps > limit
            violations += bad or not rep.ok
    report(4, "candidate-pool trace", violations == 0, f"{sequences} sequences, {violations} violations")


def random_subset(n: int, rng: np.random.Generator) -> VertexSet:
    while True:
        picks = np.flatnonzero(rng.random(n) < rng.random())
        if picks.size:
            return VertexSet.of(int(x) for x in picks)


def test_criterion_5_expander_mixing():
    rng = np.random.default_rng(5)
    pairs = failures = 0
    for g in certified_graphs().values():
        cert = ndl_certify(g)
        for _ in range(1000):
            res = expander_mixing_check(g, cert, random_subset(g.n, rng), random_subset(g.n, rng))
            pairs += 1
            failures += not res.passes
    report(5, "expander mixing on random (S, T)", failures == 0, f"{pairs} pairs, {failures} failures")


def test_criterion_6_blowup_expectation():
    exact = expected_it_blowup(cycle(5), 8, 2)
    mc = monte_carlo_it(cycle(5), 8, 2, master_seed=2024, trials=100_000, s=3)
    z = mc.z_score(float(exact))
    ok = exact == Fraction(84, 5) and abs(z) <= 3 and mc.all_clique_free
    report(6, "random-blowup expectation", ok,
           f"exact={float(exact)}, MC mean={mc.mean:.5f} +/- {mc.stderr:.5f} (z={z:+.2f}), "
           f"all {mc.trials} samples triangle-free={mc.all_clique_free}")


def test_criterion_7_end_to_end_witness():
    inst5 = RamseyInstance((3,), 3, 5)
    identity = certify(inst5, [cycle(5)], None, 1, mode="identity")
    again = certify(inst5, [cycle(5)], None, 1, mode="identity")
    identity_ok = identity.valid and identity == again
    wins = sum(certify(inst5, [cycle(5)], seed, 100).valid for seed in range(10))
    fail = certify(RamseyInstance((3,), 3, 6), [cycle(5)], 2024, 100)
    fail_ok = isinstance(fail, FailureReport) and len(fail.trials) == 100
    report(7, "end-to-end witness search", identity_ok and wins >= 9 and fail_ok,
           f"identity valid={identity.valid}, random seeds valid {wins}/10, "
           f"N=6 failed trials {len(getattr(fail, 'trials', ()))}/100")


def test_criterion_8_replay_determinism(tmp_path, capsys):
    emitted: list[tuple[str, list]] = []

    def emit(name, *argv):
        emitted.append((name, list(argv)))

    for spec in ("paley:13", "turan:12:3"):
        emit(f"spectrum-{spec}", "spectrum", "--family", spec)
    for spec in ("cycle:5", "paley:13", "turan:6:3"):
        for t in (2, 3):
            src = tmp_path / f"{spec.replace(':', '_')}x{t}.g"
            assert cli("blowup", "--family", spec, "--factor", t, "--out", src) == 0
            emit(f"spectrum-{src.name}", "spectrum", "--graph", src)
    emit("count-k32", "count-tuples", "--family", "bipartite:32:32", "--t", 70)
    emit("bound-k32", "bound", "--family", "bipartite:32:32", "--t", 70, "--N", 128)
    emit("trace-p13", "trace", "--family", "paley:13", "--sequence", "0,2,7")
    emit("expect-c5", "expect", "--family", "cycle:5", "--N", 8, "--t", 2, "--mc-trials", 100_000,
         "--check-s", 3, "--seed", 2024)
    emit("certify-identity", "certify", "--s", 3, "--t", 3, "--N", 5, "--family", "cycle:5", "--mode", "identity")
    for seed in range(10):
        emit(f"certify-seed{seed}", "certify", "--s", 3, "--t", 3, "--N", 5, "--family", "cycle:5",
             "--seed", seed)
    emit("certify-N6", "certify", "--s", 3, "--t", 3, "--N", 6, "--family", "cycle:5", "--seed", 2024)

    mismatches = []
    for name, argv in emitted:
        path = tmp_path / f"{name}.json"
        assert cli(*argv, "--out", path) in (0, 2)
        capsys.readouterr()
        code = cli("verify", "--replay", path)
        out = json.loads(capsys.readouterr().out)
        ok, _, _ = replay(load_document(path))
        if code != 0 or not out["match"] or not ok:
            mismatches.append(name)
    report(8, "replay determinism", not mismatches,
           f"{len(emitted)} documents replayed, mismatches={mismatches or 'none'}")


@pytest.fixture(scope="module", autouse=True)
def _header():
    RESULTS.clear()
    yield
