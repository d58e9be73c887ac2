"""Pauli algebra and the stabilizer tableau, checked against dense matrices."""

import itertools

import numpy as np
import pytest
from hypothesis import given, strategies as st

from shallowlab.dense import DenseState, random_clifford_circuit, random_hermitian_pauli
from shallowlab.lab import tableau_agrees_with_dense
from shallowlab.pauli import (ContradictionError, PauliString, StabilizerTableau, circuit_inverse,
                              conjugate_pauli_through, gate, gf2_det, gf2_inv, gf2_rank)

_P1 = {
    "I": np.eye(2),
    "X": np.array([[0, 1], [1, 0]]),
    "Y": np.array([[0, -1j], [1j, 0]]),
    "Z": np.diag([1, -1]),
}


def full_matrix(p: PauliString) -> np.ndarray:
    # i^phase X^x Z^z
    m = np.array([[1.0 + 0j]])
    for q in reversed(range(p.n)):
        xq = _P1["X"] if p.x[q] else _P1["I"]
        zq = _P1["Z"] if p.z[q] else _P1["I"]
        m = np.kron(m, xq @ zq)
    return (1j ** (p.phase % 4)) * m


def circuit_unitary(n, circuit):
    cols = []
    for j in range(2 ** n):
        v = np.zeros(2 ** n, complex)
        v[j] = 1
        cols.append(DenseState(n, v).apply_circuit(circuit).vec)
    return np.array(cols).T


labels = st.integers(1, 4).flatmap(
    lambda n: st.lists(st.sampled_from("IXYZ"), min_size=n, max_size=n).map("".join))
seeds = st.integers(0, 2**32 - 1)


class TestPauliAlgebra:
    @given(labels, seeds)
    def test_product_matches_matrices(self, lab, seed):
        rng = np.random.default_rng(seed)
        a = PauliString.from_label(lab)
        b = random_hermitian_pauli(a.n, rng)
        assert np.allclose(full_matrix(a * b), full_matrix(a) @ full_matrix(b))

    @given(seeds, st.integers(1, 4))
    def test_commutes_matches_matrices(self, seed, n):
        rng = np.random.default_rng(seed)
        a, b = random_hermitian_pauli(n, rng), random_hermitian_pauli(n, rng)
        ma, mb = full_matrix(a), full_matrix(b)
        assert a.commutes(b) == np.allclose(ma @ mb, mb @ ma)
        assert a.commutes(b) == b.commutes(a)

    @given(seeds, st.integers(1, 4))
    def test_product_is_associative(self, seed, n):
        rng = np.random.default_rng(seed)
        a, b, c = (random_hermitian_pauli(n, rng) for _ in range(3))
        assert ((a * b) * c).key() == (a * (b * c)).key()

    def test_label_round_trip(self):
        for lab in ["XYZ", "-IYI", "+ZZ", "I"]:
            p = PauliString.from_label(lab)
            assert PauliString.from_label(p.label()).key() == p.key()
        assert PauliString.from_label("Y").is_hermitian

    @given(seeds, st.integers(1, 4))
    def test_conjugation_matches_dense(self, seed, n):
        rng = np.random.default_rng(seed)
        circ = random_clifford_circuit(n, 12, rng)
        p = random_hermitian_pauli(n, rng)
        u = circuit_unitary(n, circ)
        want = u @ full_matrix(p) @ u.conj().T
        assert np.allclose(full_matrix(conjugate_pauli_through(circ, p)), want)

    def test_circuit_inverse(self, rng):
        circ = random_clifford_circuit(3, 20, rng)
        u = circuit_unitary(3, circ + circuit_inverse(circ))
        assert np.allclose(u, np.eye(8))


class TestTableau:
    @given(seeds)
    def test_agrees_with_dense_oracle(self, seed):
        rng = np.random.default_rng(seed)
        assert tableau_agrees_with_dense(int(rng.integers(1, 6)), rng)

    @given(seeds)
    def test_invariants_survive_gates_and_measurements(self, seed):
        rng = np.random.default_rng(seed)
        n = int(rng.integers(1, 6))
        tab = StabilizerTableau.zero_state(n).apply_circuit(random_clifford_circuit(n, 25, rng))
        for _ in range(5):
            tab.measure_pauli(random_hermitian_pauli(n, rng), rng=rng)
            tab.check_invariants()

    def test_forced_contradiction(self):
        tab = StabilizerTableau.zero_state(2)
        with pytest.raises(ContradictionError):
            tab.measure_pauli(PauliString.from_label("ZI"), forced=-1)
        assert tab.peek_pauli(PauliString.from_label("ZI")) == 1
        assert tab.peek_pauli(PauliString.from_label("XI")) is None

    def test_second_measurement_repeats(self, rng):
        tab = StabilizerTableau.plus_state(3)
        p = PauliString.from_label("ZZY")
        first, det = tab.measure_pauli(p, rng=rng)
        assert not det
        again, det2 = tab.measure_pauli(p, rng=rng)
        assert det2 and again == first

    def test_snapshot_restore(self, rng):
        tab = StabilizerTableau.plus_state(4).apply_circuit(random_clifford_circuit(4, 20, rng))
        snap = tab.snapshot()
        tab.measure_pauli(PauliString.from_label("ZZXI"), rng=rng)
        assert tab.peek_pauli(PauliString.from_label("ZZXI")) is not None
        back = StabilizerTableau.restore(snap)
        assert back.same_state(StabilizerTableau.restore(snap))
        back.check_invariants()

    @given(seeds)
    def test_rotation_matches_dense(self, seed):
        rng = np.random.default_rng(seed)
        n = 3
        circ = random_clifford_circuit(n, 10, rng)
        q = random_hermitian_pauli(n, rng)
        tab = StabilizerTableau.zero_state(n).apply_circuit(circ).apply_pauli_rotation(q)
        psi = DenseState(n).apply_circuit(circ)
        # exp(-i pi/4 Q) = (I - iQ)/sqrt(2)
        psi = DenseState(n, (psi.vec - 1j * psi.apply_pauli_op(q)) / np.sqrt(2))
        for _ in range(6):
            p = random_hermitian_pauli(n, rng)
            det = tab.peek_pauli(p)
            e = psi.expectation(p)
            assert (det is None and abs(e) < 1e-9) or (det is not None and abs(e - det) < 1e-9)

    def test_apply_linear_and_diagonal(self, rng):
        n = 3
        m = np.array([[1, 1, 0], [0, 1, 0], [0, 1, 1]], np.uint8)
        s = np.array([1, 2, 3])
        cz = np.array([[0, 1, 0], [1, 0, 1], [0, 1, 0]], np.uint8)
        tab = StabilizerTableau.plus_state(n).apply_diagonal(s, cz).apply_linear(m)
        vec = np.zeros(2 ** n, complex)
        for j in range(2 ** n):
            v = np.array([(j >> q) & 1 for q in range(n)])
            ph = (s @ v + v @ cz @ v) % 4
            w = (m.astype(int) @ v) % 2
            vec[int(sum(int(b) << q for q, b in enumerate(w)))] += 1j ** ph
        psi = DenseState(n, vec / np.linalg.norm(vec))
        for x in itertools.product("IXYZ", repeat=n):
            p = PauliString.from_label("".join(x))
            det = tab.peek_pauli(p)
            e = psi.expectation(p)
            assert (det is None and abs(e) < 1e-9) or (det is not None and abs(e - det) < 1e-9)

    def test_permute_qubits(self):
        tab = StabilizerTableau.zero_state(3).apply(gate("H", 0))
        tab.permute_qubits([2, 0, 1])
        assert tab.peek_pauli(PauliString.from_label("IIX")) == 1
        assert tab.peek_pauli(PauliString.from_label("ZII")) == 1


class TestGF2:
    @given(st.integers(1, 5), seeds)
    def test_rank_det_inverse(self, k, seed):
        rng = np.random.default_rng(seed)
        m = rng.integers(0, 2, (k, k)).astype(np.uint8)
        det = gf2_det(m)
        assert det == int(gf2_rank(m) == k)
        assert det == int(round(np.linalg.det(m.astype(float)))) % 2
        if det:
            assert ((gf2_inv(m).astype(int) @ m) % 2 == np.eye(k)).all()
