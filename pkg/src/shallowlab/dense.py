"""Dense state-vector reference simulator (small n only).

Bit q of a basis index is qubit q. Used as an independent oracle for the
tableau code, so it shares nothing with it beyond the gate names.
"""

from __future__ import annotations

from typing import Iterable, Optional

import numpy as np

from .pauli import CliffordGate, PauliString

_H = np.array([[1, 1], [1, -1]]) / np.sqrt(2)
_ONE_QUBIT = {
    "H": _H,
    "S": np.diag([1, 1j]),
    "SDG": np.diag([1, -1j]),
    "X": np.array([[0, 1], [1, 0]]),
    "Y": np.array([[0, -1j], [1j, 0]]),
    "Z": np.diag([1, -1]),
}


class DenseState:
    def __init__(self, n: int, vec: Optional[np.ndarray] = None):
        self.n = n
        if vec is None:
            vec = np.zeros(2 ** n, complex)
            vec[0] = 1
        self.vec = np.asarray(vec, complex)

    @classmethod
    def plus_state(cls, n: int) -> "DenseState":
        return cls(n, np.full(2 ** n, 2 ** (-n / 2), complex))

    def copy(self) -> "DenseState":
        return DenseState(self.n, self.vec.copy())

    def _axis_view(self):
        # reshape so axis (n-1-q) is qubit q
        return self.vec.reshape([2] * self.n)

    def apply(self, g: CliffordGate) -> "DenseState":
        kind, qs = g.kind, g.qubits
        idx = np.arange(2 ** self.n)
        if kind in _ONE_QUBIT:
            t = self._axis_view()
            ax = self.n - 1 - qs[0]
            t = np.moveaxis(np.tensordot(_ONE_QUBIT[kind], t, axes=([1], [ax])), 0, ax)
            self.vec = t.reshape(-1)
        elif kind == "CZ":
            a, b = qs
            both = ((idx >> a) & 1) & ((idx >> b) & 1)
            self.vec = self.vec * np.where(both, -1, 1)
        elif kind == "CNOT":
            c, t = qs
            src = np.where((idx >> c) & 1, idx ^ (1 << t), idx)
            self.vec = self.vec[src]
        else:
            raise ValueError(f"unknown gate {kind}")
        return self

    def apply_circuit(self, circuit: Iterable[CliffordGate]) -> "DenseState":
        for g in circuit:
            self.apply(g)
        return self

    def apply_pauli_op(self, p: PauliString) -> np.ndarray:
        """Return P|psi> (state untouched)."""
        idx = np.arange(2 ** self.n)
        xmask = int(sum(1 << q for q in range(self.n) if p.x[q]))
        zmask = int(sum(1 << q for q in range(self.n) if p.z[q]))
        signs = np.array([(-1) ** bin(j & zmask).count("1") for j in idx])
        out = np.zeros_like(self.vec)
        out[idx ^ xmask] = signs * self.vec
        return (1j ** (p.phase % 4)) * out

    def outcome_probability(self, p: PauliString, outcome: int) -> float:
        proj = (self.vec + outcome * self.apply_pauli_op(p)) / 2
        return float(np.vdot(proj, proj).real)

    def project(self, p: PauliString, outcome: int) -> "DenseState":
        proj = (self.vec + outcome * self.apply_pauli_op(p)) / 2
        norm = np.linalg.norm(proj)
        if norm < 1e-9:
            raise ValueError("projecting onto a zero-probability outcome")
        self.vec = proj / norm
        return self

    def expectation(self, p: PauliString) -> float:
        return float(np.vdot(self.vec, self.apply_pauli_op(p)).real)


def random_clifford_circuit(n: int, length: int, rng: np.random.Generator) -> list:
    from .pauli import gate

    kinds1 = ["H", "S", "SDG", "X", "Y", "Z"]
    out = []
    for _ in range(length):
        if n >= 2 and rng.random() < 0.4:
            a, b = rng.choice(n, size=2, replace=False)
            out.append(gate(("CZ", "CNOT")[int(rng.integers(2))], int(a), int(b)))
        else:
            out.append(gate(kinds1[int(rng.integers(len(kinds1)))], int(rng.integers(n))))
    return out


def random_hermitian_pauli(n: int, rng: np.random.Generator) -> PauliString:
    while True:
        x = rng.integers(0, 2, n).astype(np.uint8)
        z = rng.integers(0, 2, n).astype(np.uint8)
        if x.any() or z.any():
            break
    ys = int(np.count_nonzero(x & z))
    return PauliString(n, x, z, ys + 2 * int(rng.integers(2)))


def circuit_unitary(n: int, circuit) -> np.ndarray:
    """Column j is the circuit applied to basis state j."""
    cols = []
    for j in range(2 ** n):
        v = np.zeros(2 ** n, complex)
        v[j] = 1
        cols.append(DenseState(n, v).apply_circuit(circuit).vec)
    return np.array(cols).T


def diag_unitary(w) -> np.ndarray:
    """Dense diagonal of a phase form ``i^{q(v)}`` (anything with ``phase_exponent``)."""
    n = len(w.s)
    return np.diag([1j ** w.phase_exponent([(j >> q) & 1 for q in range(n)]) for j in range(2 ** n)])
