"""Rewindable devices, the blinded line reduction and the decision procedures."""

import json
from collections import Counter
from itertools import product

import numpy as np
import pytest
from hypothesis import given, strategies as st

from shallowlab.dense import DenseState
from shallowlab.diag import DiagWord, cnot, enumerate_H3, enumerate_H3_even, pentagram
from shallowlab.kilian import gamma
from shallowlab.parity import dfrak, efrak, efrak_wires, path_parity_bruteforce, random_dag
from shallowlab.pauli import PauliString
from shallowlab.solvers import (IDENTITY, THREE_CYCLE, Contamination, ExtractionOracle,
                                FaultyOracle, HonestLogical, HonestMbqc, ProtocolError,
                                RecordingOracle, SolverConfig, cycle_conjugate, exact_DR,
                                find_blocking_f, first_inconsistent, h3_key, line_tables,
                                nc1_estimate, nc1_samples, nc1_sigma, output_distribution,
                                phase1_estimate, phase2_distinguish, phase2_threshold, run_Rf_batch,
                                solve_dagparity, solve_dagparity_report)

IDENT_WORD = [cnot(0, 1), cnot(1, 2), cnot(2, 0), cnot(2, 0), cnot(1, 2), cnot(0, 1)]
# shortest CNOT word whose F2 product is the three-cycle e0 -> e1 -> e2 -> e0
CYCLE_WORD = [cnot(0, 1), cnot(0, 2), cnot(1, 0), cnot(0, 1), cnot(2, 1), cnot(1, 2)]


def tv(counts: Counter, law: dict) -> float:
    total = sum(counts.values())
    keys = set(counts) | set(law)
    return 0.5 * sum(abs(counts.get(k, 0) / total - law.get(k, 0.0)) for k in keys)


def labels(outs):
    return Counter("none" if o is None else o.label(with_sign=False) for o in outs)


def dense_line_law(w: DiagWord, line: int) -> dict:
    psi0 = DenseState.plus_state(3)
    psi0.vec = np.array([1j ** w.phase_exponent([(j >> q) & 1 for q in range(3)])
                         for j in range(8)]) / np.sqrt(8)
    paulis = pentagram().lines[line].paulis
    out = {}
    for signs in product((1, -1), repeat=4):
        psi, pr = psi0.copy(), 1.0
        for p, s in zip(paulis, signs):
            q = psi.outcome_probability(p, s)
            pr *= q
            if q < 1e-12:
                break
            psi.project(p, s)
        if pr > 1e-12:
            out[signs] = pr
    return out


def test_cycle_word():
    from shallowlab.diag import word_matrix
    from shallowlab.parity import CYCLE
    assert (word_matrix(CYCLE_WORD, 3) == CYCLE).all()
    assert (word_matrix(IDENT_WORD, 3) == np.eye(3)).all()


class TestLineTables:
    @pytest.mark.parametrize("key", [0, 1, 37, 100, 255, 300, 511])
    def test_tables_match_dense(self, key):
        vals, cum = line_tables()
        w = next(x for x in enumerate_H3() if h3_key(x) == key)
        for li in range(5):
            probs = np.diff(np.concatenate([[0.0], cum[key, li]]))
            table = {}
            for j in range(8):
                if probs[j] > 1e-12:
                    table[tuple(int(v) for v in vals[key, li, j])] = probs[j]
            dense = dense_line_law(w, li)
            assert set(table) == set(dense)
            assert all(abs(table[k] - dense[k]) < 1e-9 for k in dense)

    def test_first_inconsistent(self):
        ans = np.ones((5, 4), np.int8)
        assert first_inconsistent(ans) == -1
        pc = pentagram()
        (l1, p1), _ = pc.incidence["IYI"]
        ans[l1, p1] = -1
        assert first_inconsistent(ans) == pc.star_index(PauliString.from_label("IYI"))
        (l1, p1), _ = pc.incidence["XXX"]
        ans[l1, p1] = -1
        assert first_inconsistent(ans) == 0


class TestExactLaw:
    def test_support_and_normalisation(self):
        dr = exact_DR()
        assert abs(sum(dr.values()) - 1) < 1e-12
        assert set(dr) == {p.label(False) for p in pentagram().nonstab}
        assert max(dr.values()) >= 1 / 20

    def test_law_is_invariant_under_even_group(self):
        dr = exact_DR()
        for f in enumerate_H3_even()[::13]:
            moved = output_distribution(f)
            back = {f.inverse().conjugate_pauli(PauliString.from_label(k)).label(False): v
                    for k, v in moved.items()}
            assert back.keys() == dr.keys()
            assert all(abs(back[k] - dr[k]) < 1e-12 for k in dr)

    def test_blocking_elements(self):
        dr = exact_DR()
        for lab in dr:
            f = find_blocking_f(PauliString.from_label(lab))
            fp = f.conjugate_pauli(PauliString.from_label(lab)).label(False)
            assert fp not in output_distribution(cycle_conjugate(f))
            assert abs(output_distribution(f)[fp] - dr[lab]) < 1e-12
        with pytest.raises(ValueError):
            find_blocking_f(PauliString.from_label("XXX"))


class TestHonestDevices:
    def test_fast_and_full_paths_follow_exact_law(self):
        dr = exact_DR()
        for fast in (True, False):
            rng = np.random.default_rng(7)
            n = 3000 if fast else 600
            outs = run_Rf_batch([DiagWord.identity(3)] * n, [IDENT_WORD] * n, 5,
                                HonestLogical(rng, fast=fast), rng)
            c = labels(outs)
            assert "none" not in c
            assert set(c) <= set(dr)
            assert tv(c, dr) < (0.05 if fast else 0.1)

    def test_mbqc_device_follows_exact_law(self):
        rng = np.random.default_rng(8)
        n = 120
        outs = run_Rf_batch([DiagWord.identity(3)] * n, [CYCLE_WORD + CYCLE_WORD[::-1]] * n, 3,
                            HonestMbqc(rng), rng)
        c = labels(outs)
        assert "none" not in c and set(c) <= set(exact_DR())
        top = sum(c[k] for k in ("XYY", "YXY", "YYX")) / n
        assert abs(top - 0.875) < 0.1

    def test_cycle_case_output_law(self):
        rng = np.random.default_rng(9)
        f = find_blocking_f(PauliString.from_label("XYY"))
        n = 2000
        outs = run_Rf_batch([f] * n, [CYCLE_WORD] * n, 4, HonestLogical(rng), rng)
        law = output_distribution(cycle_conjugate(f))
        assert tv(labels(outs), law) < 0.06
        assert f.conjugate_pauli(PauliString.from_label("XYY")).label(False) not in labels(outs)

    def test_protocol_errors(self):
        rng = np.random.default_rng(0)
        dev = HonestLogical(rng)
        with pytest.raises(ProtocolError):
            dev.second_round(0)
        with pytest.raises(ProtocolError):
            dev.rewind()
        batch = gamma(DiagWord.identity(3), [IDENT_WORD], 3, rng)
        dev.first_round(batch)
        with pytest.raises(ProtocolError):
            dev.first_round(batch)
        dev.second_round(0)
        with pytest.raises(ProtocolError):
            dev.second_round(1)
        dev.rewind()
        with pytest.raises(ValueError):
            dev.second_round(5)

    def test_rewind_gives_fresh_measurements_of_same_state(self):
        rng = np.random.default_rng(1)
        dev = HonestLogical(rng)
        batch = gamma(DiagWord.identity(3), [IDENT_WORD] * 200, 3, rng)
        dev.first_round(batch)
        # lines are self-consistent: each line's product sign is fixed
        for li, line in enumerate(pentagram().lines):
            for _ in range(3):
                ans = dev.second_round(li)
                assert (ans.prod(axis=1) == line.product_sign).all()
                dev.rewind()


class TestFaulty:
    def _batch(self, rng, words, n):
        return gamma(DiagWord.identity(3), [words] * n, 4, rng)

    def test_zero_eps_is_transparent(self):
        rng = np.random.default_rng(3)
        batch = self._batch(rng, IDENT_WORD, 50)
        plain = HonestLogical(np.random.default_rng(5))
        wrapped = FaultyOracle(HonestLogical(np.random.default_rng(5)), 0.0, "uniform",
                               rng=np.random.default_rng(6))
        for dev in (plain, wrapped):
            dev.reset()
            dev.first_round(batch)
        for li in range(5):
            assert (plain.second_round(li) == wrapped.second_round(li)).all()
            plain.rewind()
            wrapped.rewind()

    def test_noncontextual_answers_hide_everything(self):
        rng = np.random.default_rng(4)
        dev = FaultyOracle(HonestLogical(rng), 1.0, "uniform", "noncontextual", rng=rng)
        outs = run_Rf_batch([DiagWord.identity(3)] * 40, [IDENT_WORD] * 40, 4, dev, rng)
        assert all(o is None for o in outs)

    @pytest.mark.parametrize("policy", ["uniform", "adversarial-fixed-set"])
    def test_failure_rate_per_query(self, policy):
        rng = np.random.default_rng(5)
        eps, n = 0.1, 4000
        dev = FaultyOracle(HonestLogical(rng), eps, policy, rng=rng, key=99)
        words = [[cnot(int(a), int(b)) for a, b in rng.integers(0, 4, (6, 2)) if a != b] or [cnot(0, 1)]
                 for _ in range(n)]
        words = [(w * 6)[:6] for w in words]
        run_Rf_batch([DiagWord.identity(3)] * n, words, 4, dev, rng)
        fails = np.stack(dev.failures, axis=1)
        assert abs(fails.mean() - eps) < 0.015
        assert abs(fails.any(axis=1).mean() - (1 - (1 - eps) ** 5)) < 0.03

    def test_fixed_set_is_a_function_of_the_input(self):
        rng = np.random.default_rng(6)
        batch = self._batch(rng, IDENT_WORD, 300)
        masks = []
        for _ in range(2):
            dev = FaultyOracle(HonestLogical(rng), 0.2, "adversarial-fixed-set", rng=rng, key=7)
            dev.reset()
            dev.first_round(batch)
            dev.second_round(2)
            masks.append(dev.failures[0])
        assert (masks[0] == masks[1]).all()

    def test_concentrate_hits_only_target_inputs(self):
        rng = np.random.default_rng(7)
        n = 2000
        for word, want in ((IDENT_WORD, 0.0), (CYCLE_WORD, 0.2)):
            dev = FaultyOracle(HonestLogical(rng), 0.1, "concentrate-on-target", rng=rng)
            run_Rf_batch([DiagWord.identity(3)] * n, [word] * n, 4, dev, rng)
            assert abs(np.stack(dev.failures).mean() - want) < 0.02

    def test_bad_arguments(self):
        dev = HonestLogical(np.random.default_rng(0))
        with pytest.raises(ValueError):
            FaultyOracle(dev, 0.1, "sometimes")
        with pytest.raises(ValueError):
            FaultyOracle(dev, 0.1, "uniform", "lie")
        with pytest.raises(ValueError):
            FaultyOracle(dev, 1.5)


class TestRecording:
    def test_jsonl_trail(self):
        rng = np.random.default_rng(0)
        rec = RecordingOracle(HonestLogical(rng))
        run_Rf_batch([DiagWord.identity(3)] * 2, [IDENT_WORD] * 2, 3, rec, rng)
        rows = [json.loads(line) for line in rec.dump_jsonl().splitlines()]
        events = [r["event"] for r in rows]
        assert events == ["reset", "first_round"] + ["second_round", "rewind"] * 5
        assert rows[1]["sessions"] == 2 and rows[1]["length"] == 12
        assert all(len(r["response"]) == 2 for r in rows if r["event"] == "second_round")


class TestPhases:
    def test_phase1_finds_a_heavy_pauli(self):
        rng = np.random.default_rng(10)
        ps = phase1_estimate([IDENT_WORD, CYCLE_WORD], 4, HonestLogical(rng), 48, rng)
        for p in ps:
            assert p.label(False) in exact_DR()

    def test_thresholds(self):
        p = PauliString.from_label("XYY")
        d = 1 / 25
        assert d < phase2_threshold(p, d) < (1 - d) * exact_DR()["XYY"]
        assert phase2_threshold(p, d, "paper") == pytest.approx((d + 1 / 21) / 2)
        with pytest.raises(ValueError):
            phase2_threshold(p, d, "other")

    @pytest.mark.parametrize("contaminate", [False, True])
    def test_phase2_separates_cases(self, contaminate):
        rng = np.random.default_rng(11)
        p = PauliString.from_label("YXY")
        f = find_blocking_f(p)
        fp = f.conjugate_pauli(p).label(False)
        words = [IDENT_WORD] * 10 + [CYCLE_WORD] * 10
        cont = None
        if contaminate:
            # worst case: all error mass lands on the Pauli that would read "identity"
            cont = Contamination(1 / 25, [fp] * len(words))
        got = phase2_distinguish(words, 4, HonestLogical(rng), [f] * 20, [p] * 20, 200, rng,
                                 contamination=cont)
        assert got == [IDENTITY] * 10 + [THREE_CYCLE] * 10


class TestSolver:
    def test_honest_small_instances(self):
        rng = np.random.default_rng(12)
        for _ in range(3):
            dag = random_dag(3, rng)
            rep = solve_dagparity_report(dag, HonestLogical(rng), rng, k=5)
            assert rep.bit == path_parity_bruteforce(dag)
            assert all(v == rep.bit for v in rep.votes if v is not None)

    def test_repetitions(self):
        assert SolverConfig().repetitions(6) == 8
        assert SolverConfig().repetitions(1) == 3

    def test_reduction_words_have_expected_width(self):
        rng = np.random.default_rng(13)
        dag = random_dag(4, rng)
        w = efrak(dfrak(dag, rng))
        assert max(max(g) for g in w) < efrak_wires(4)
        assert solve_dagparity(dag, HonestLogical(rng), rng, k=3) == path_parity_bruteforce(dag)


class TestNC1:
    def test_sample_count(self):
        assert nc1_sigma(0.0) == pytest.approx(1 / 12)
        assert nc1_samples(0.0, c=1) == 144
        with pytest.raises(ValueError):
            nc1_samples(1 / 30)

    @given(st.sampled_from(["X_basis", "Z_basis"]), st.integers(0, 2**32 - 1))
    def test_noiseless_decision(self, basis, seed):
        got, tally = nc1_estimate(ExtractionOracle(basis, 0.0), 20000, np.random.default_rng(seed))
        assert got == basis
        assert tally.total == 20000

    def test_fixed_adversary_is_a_negative_case(self):
        rng = np.random.default_rng(0)
        wins = sum(nc1_estimate(ExtractionOracle("X_basis", 0.02, "fixed", "XI"),
                                nc1_samples(0.02), rng)[0] == "X_basis" for _ in range(10))
        assert wins == 0
