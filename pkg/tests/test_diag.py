"""Diagonal group, CNOT pushing, pentagram constants and packed batches."""

import itertools

import numpy as np
import pytest
from hypothesis import given, strategies as st

from shallowlab.dense import DenseState
from shallowlab.diag import (PRINTED_I2, DiagWord, build_pentagram_constants, bullet, cnot,
                             enumerate_H3, enumerate_H3_even, pentagram, push_diag_through_cnot,
                             sample_uniform_H, sample_uniform_H3_even, steps_circuit, word_matrix)
from shallowlab.kilian import (DiagBatch, gamma, identity_rows, linear_mul_cnot, push_batch,
                               rows_to_matrix)
from shallowlab.parity import dfrak, efrak, efrak_wires, random_dag
from shallowlab.pauli import PauliString, conjugate_pauli_through, gf2_inv

seeds = st.integers(0, 2**32 - 1)


def unitary(n, circuit):
    cols = []
    for j in range(2 ** n):
        v = np.zeros(2 ** n, complex)
        v[j] = 1
        cols.append(DenseState(n, v).apply_circuit(circuit).vec)
    return np.array(cols).T


def diag_unitary(w: DiagWord) -> np.ndarray:
    n = w.m
    return np.diag([1j ** w.phase_exponent([(j >> q) & 1 for q in range(n)]) for j in range(2 ** n)])


def random_cnot(m, rng):
    c, t = rng.choice(m, size=2, replace=False)
    return cnot(int(c), int(t))


class TestDiagWord:
    @given(seeds, st.integers(1, 4))
    def test_gates_realise_phase_form(self, seed, m):
        w = sample_uniform_H(m, np.random.default_rng(seed))
        assert np.allclose(unitary(m, w.gates()), diag_unitary(w))

    @given(seeds, st.integers(2, 4))
    def test_push_through_cnot(self, seed, m):
        rng = np.random.default_rng(seed)
        h = sample_uniform_H(m, rng)
        g = random_cnot(m, rng)
        hp = push_diag_through_cnot(g, h)
        gm = unitary(m, [g.as_clifford()])
        assert np.allclose(diag_unitary(h) @ gm, gm @ diag_unitary(hp))
        assert bullet(g, h) == hp

    @given(seeds, st.integers(2, 4))
    def test_compose_linear(self, seed, m):
        rng = np.random.default_rng(seed)
        h = sample_uniform_H(m, rng)
        word = [random_cnot(m, rng) for _ in range(5)]
        c = unitary(m, steps_circuit([(g, DiagWord.identity(m)) for g in word]))
        hp = h.compose_linear(word_matrix(word, m))
        assert np.allclose(diag_unitary(h) @ c, c @ diag_unitary(hp))

    @given(seeds, st.integers(1, 4))
    def test_conjugate_pauli(self, seed, m):
        rng = np.random.default_rng(seed)
        h = sample_uniform_H(m, rng)
        p = PauliString.from_label("".join(rng.choice(list("IXYZ"), m)))
        assert conjugate_pauli_through(h.gates(), p).key() == h.conjugate_pauli(p).key()

    @given(seeds, st.integers(1, 5))
    def test_group_laws(self, seed, m):
        rng = np.random.default_rng(seed)
        a, b = sample_uniform_H(m, rng), sample_uniform_H(m, rng)
        assert a * a.inverse() == DiagWord.identity(m)
        assert a * b == b * a
        assert (a * b).gate_parity == (a.gate_parity + b.gate_parity) % 2

    @given(seeds)
    def test_parity_invariant_under_wire_permutation(self, seed):
        rng = np.random.default_rng(seed)
        h = sample_uniform_H(4, rng)
        perm = np.eye(4, dtype=np.uint8)[rng.permutation(4)]
        assert h.compose_linear(perm).parity_pair == h.parity_pair

    def test_embed_restrict(self):
        w = DiagWord.from_gates(3, s_gates=[0, 2], cz_gates=[(0, 1)])
        assert w.embed(5).restrict(3) == w
        with pytest.raises(ValueError):
            w.embed(5).__mul__(DiagWord.from_gates(5, s_gates=[4])).restrict(3)


class TestH3:
    def test_sizes_and_closure(self):
        h3, even = enumerate_H3(), enumerate_H3_even()
        assert len(set(h3)) == 512 and len(set(even)) == 128
        es = set(even)
        for a, b in itertools.islice(itertools.product(even, even), 0, None, 7):
            assert a * b in es

    def test_sampler_is_uniform_on_even(self):
        rng = np.random.default_rng(3)
        counts = {}
        for _ in range(25600):
            w = sample_uniform_H3_even(rng)
            assert w.is_even
            counts[w] = counts.get(w, 0) + 1
        assert len(counts) == 128
        c = np.array(list(counts.values()))
        chi2 = ((c - 200.0) ** 2 / 200.0).sum()
        assert chi2 < 200  # 127 dof, p ~ 1e-4 at 180


class TestPentagram:
    def test_repaired_lines(self):
        pc = pentagram()
        assert len(pc.star) == 10
        assert all(len(v) == 2 for v in pc.incidence.values())
        assert sum(ln.product_sign == -1 for ln in pc.lines) % 2 == 1

    def test_printed_lines_rejected(self):
        with pytest.raises(ValueError):
            build_pentagram_constants(PRINTED_I2)

    def test_s_set_closed_under_even_group(self):
        pc = pentagram()
        labels = {p.label(False) for p in pc.s_set}
        for f in enumerate_H3_even()[::9]:
            for p in pc.s_set:
                assert f.conjugate_pauli(p).label(False) in labels
        assert {p.label(False) for p in pc.star} <= labels
        assert all(p.z.any() for p in pc.nonstab)


class TestPackedBatch:
    @pytest.mark.parametrize("backend", ["numpy", "auto"])
    def test_push_matches_reference(self, backend):
        rng = np.random.default_rng(11)
        m, size = 9, 40
        d = DiagBatch.random(size, m, rng)
        ref = [d.word(b) for b in range(size)]
        for _ in range(30):
            pairs = np.array([rng.choice(m, 2, replace=False) for _ in range(size)])
            push_batch(d, pairs[:, 0], pairs[:, 1], backend=backend)
            ref = [push_diag_through_cnot(cnot(int(c), int(t)), w) for (c, t), w in zip(pairs, ref)]
            extra = DiagBatch.random(size, m, rng)
            d.imul(extra)
            ref = [w * extra.word(b) for b, w in enumerate(ref)]
        assert all(d.word(b) == ref[b] for b in range(size))

    @given(seeds)
    def test_word_round_trip(self, seed):
        rng = np.random.default_rng(seed)
        ws = [sample_uniform_H(6, rng) for _ in range(5)]
        b = DiagBatch.from_words(ws, 6)
        assert all(b.word(i) == w for i, w in enumerate(ws))
        assert all((b * b.inverse()).word(i) == DiagWord.identity(6) for i in range(5))

    def test_key3_and_support(self):
        even = enumerate_H3()
        b = DiagBatch.from_words(even, 5)
        assert sorted(b.key3().tolist()) == list(range(512))
        assert b.supported_on(3).all()
        w = DiagWord.from_gates(5, cz_gates=[(1, 4)])
        assert not DiagBatch.from_words([w], 5).supported_on(3)[0]

    @given(seeds)
    def test_linear_rows(self, seed):
        rng = np.random.default_rng(seed)
        m = 7
        word = [random_cnot(m, rng) for _ in range(20)]
        rows = identity_rows(1, m)
        for g in word:
            linear_mul_cnot(rows, np.array([g.control]), np.array([g.target]))
        assert (rows_to_matrix(rows[0], m) == word_matrix(word, m)).all()
        batch = np.concatenate([rows, identity_rows(1, m)])
        mats = rows_to_matrix(batch, m)
        assert (mats[0] == word_matrix(word, m)).all() and (mats[1] == np.eye(m)).all()


class TestGamma:
    def _product(self, steps, m):
        tot = np.eye(2 ** m, dtype=complex)
        for c, d in steps:
            tot = tot @ unitary(m, [c.as_clifford()]) @ diag_unitary(d)
        return tot

    @given(seeds)
    def test_product_is_blinded_f(self, seed):
        rng = np.random.default_rng(seed)
        m = 3
        word = [random_cnot(m, rng) for _ in range(3)]
        f = sample_uniform_H3_even(rng)
        batch = gamma(f, [word], m, rng)
        steps = batch.session_steps(0)
        pi = word_matrix(word, m)
        want_diag = batch.f_prime[0] * f.compose_linear(gf2_inv(pi))
        assert np.allclose(self._product(steps, m), diag_unitary(want_diag))

    @given(seeds)
    def test_product_condition_on_reduction_words(self, seed):
        rng = np.random.default_rng(seed)
        dag = random_dag(3, rng)
        word = efrak(dfrak(dag, rng))
        m = efrak_wires(3)
        f = sample_uniform_H3_even(rng)
        batch = gamma(f, [word], m, rng)
        steps = batch.session_steps(0)
        assert [c for c, _ in steps] == word + word[::-1]
        # (M, D) . (c, d) = (M c, push(c, D) d)
        total = DiagWord.identity(m)
        for c, d in steps:
            total = push_diag_through_cnot(c, total) * d
        pi = word_matrix(word, m)[:3, :3]
        small = total.restrict(3)
        assert small.is_even
        assert small == batch.f_prime[0] * f.compose_linear(gf2_inv(pi))

    def test_steps_marginally_uniform(self):
        rng = np.random.default_rng(5)
        word = [cnot(0, 1), cnot(1, 2), cnot(2, 0)]
        size = 512 * 40
        batch = gamma(DiagWord.from_gates(3, s_gates=[0, 1]), [word] * size, 3, rng)
        for i, st_ in enumerate(batch.steps()):
            if i == batch.length - 1:
                break
            counts = np.bincount(st_.diag.key3(), minlength=512)
            chi2 = ((counts - 40.0) ** 2 / 40.0).sum()
            assert chi2 < 650, (i, chi2)  # 511 dof

    def test_stream_replays(self):
        rng = np.random.default_rng(0)
        word = [cnot(0, 1), cnot(1, 2)]
        batch = gamma(DiagWord.identity(3), [word], 4, rng)
        a = [d.key() for _, d in batch.session_steps(0)]
        b = [d.key() for _, d in batch.session_steps(0)]
        assert a == b
