"""Pauli strings, Clifford gates and a CHP-style stabilizer tableau.

Paulis are stored as ``i**phase * X**x * Z**z`` with ``x``/``z`` as uint8 bit
vectors, so ``Y = i X Z`` carries ``phase = 1``. The tableau keeps the same
convention row by row (phase is the i-exponent, not the CHP sign bit), which
keeps every gate update a handful of column XORs plus a phase increment.
"""

from __future__ import annotations

import os
from dataclasses import dataclass, field
from typing import Iterable, NamedTuple, Optional, Sequence

import numpy as np

DEBUG = bool(os.environ.get("SHALLOWLAB_DEBUG"))

_CHARS = {(0, 0): "I", (1, 0): "X", (0, 1): "Z", (1, 1): "Y"}


class ContradictionError(Exception):
    """A forced measurement outcome has probability zero."""


def _bits(values, n: int) -> np.ndarray:
    arr = np.zeros(n, dtype=np.uint8)
    if values is not None:
        src = np.asarray(values, dtype=np.uint8) & 1
        arr[: len(src)] = src
    return arr


@dataclass(frozen=True, eq=False)
class PauliString:
    n: int
    x: np.ndarray
    z: np.ndarray
    phase: int = 0

    def __post_init__(self):
        if self.x.shape != (self.n,) or self.z.shape != (self.n,):
            raise ValueError("x and z masks must both have length n")
        object.__setattr__(self, "phase", int(self.phase) % 4)

    @classmethod
    def identity(cls, n: int) -> "PauliString":
        return cls(n, np.zeros(n, np.uint8), np.zeros(n, np.uint8), 0)

    @classmethod
    def from_masks(cls, x, z, phase: int = 0) -> "PauliString":
        x = np.asarray(x, dtype=np.uint8) & 1
        z = np.asarray(z, dtype=np.uint8) & 1
        return cls(len(x), x.copy(), z.copy(), phase)

    @classmethod
    def from_label(cls, label: str) -> "PauliString":
        """Parse labels like ``"XIZ"``, ``"-YY"`` or ``"+iZ"``."""
        phase = 0
        body = label
        while body and body[0] in "+-i":
            if body[0] == "-":
                phase += 2
            elif body[0] == "i":
                phase += 1
            body = body[1:]
        n = len(body)
        x = np.zeros(n, np.uint8)
        z = np.zeros(n, np.uint8)
        for j, ch in enumerate(body.upper()):
            if ch in "XY":
                x[j] = 1
            if ch in "ZY":
                z[j] = 1
            if ch == "Y":
                phase += 1
            elif ch not in "IXZ":
                raise ValueError(f"bad Pauli character {ch!r}")
        return cls(n, x, z, phase)

    @classmethod
    def single(cls, n: int, qubit: int, kind: str) -> "PauliString":
        label = ["I"] * n
        label[qubit] = kind
        return cls.from_label("".join(label))

    @property
    def ys(self) -> int:
        return int(np.count_nonzero(self.x & self.z))

    @property
    def sign_phase(self) -> int:
        """Phase relative to the Hermitian +1 representative (0..3)."""
        return (self.phase - self.ys) % 4

    @property
    def is_hermitian(self) -> bool:
        return self.sign_phase % 2 == 0

    @property
    def sign(self) -> int:
        if not self.is_hermitian:
            raise ValueError("non-Hermitian Pauli has no real sign")
        return 1 if self.sign_phase == 0 else -1

    def support(self) -> np.ndarray:
        return np.flatnonzero(self.x | self.z)

    def weight(self) -> int:
        return int(np.count_nonzero(self.x | self.z))

    def is_identity(self) -> bool:
        return not (self.x.any() or self.z.any())

    def key(self) -> tuple:
        """Hashable sign-free identifier."""
        return (self.x.tobytes(), self.z.tobytes())

    def unsigned(self) -> "PauliString":
        return PauliString(self.n, self.x.copy(), self.z.copy(), self.ys)

    def label(self, with_sign: bool = True) -> str:
        body = "".join(_CHARS[(int(a), int(b))] for a, b in zip(self.x, self.z))
        if not with_sign:
            return body
        return {0: "+", 1: "+i", 2: "-", 3: "-i"}[self.sign_phase] + body

    def __repr__(self) -> str:
        return f"PauliString({self.label()!r})"

    def __eq__(self, other) -> bool:
        if not isinstance(other, PauliString):
            return NotImplemented
        return (
            self.n == other.n
            and self.phase == other.phase
            and np.array_equal(self.x, other.x)
            and np.array_equal(self.z, other.z)
        )

    def __hash__(self) -> int:
        return hash((self.key(), self.phase))

    def __mul__(self, other: "PauliString") -> "PauliString":
        if self.n != other.n:
            raise ValueError("qubit count mismatch")
        phase = self.phase + other.phase + 2 * int(np.dot(self.z, other.x) & 1)
        return PauliString(self.n, self.x ^ other.x, self.z ^ other.z, phase)

    def __neg__(self) -> "PauliString":
        return PauliString(self.n, self.x, self.z, self.phase + 2)

    def commutes(self, other: "PauliString") -> bool:
        return (int(np.dot(self.x, other.z)) + int(np.dot(self.z, other.x))) % 2 == 0

    def tensor(self, other: "PauliString") -> "PauliString":
        return PauliString(
            self.n + other.n,
            np.concatenate([self.x, other.x]),
            np.concatenate([self.z, other.z]),
            self.phase + other.phase,
        )


class CliffordGate(NamedTuple):
    kind: str
    qubits: tuple

    def __repr__(self) -> str:
        return f"{self.kind}{self.qubits}"


_ARITY = {"H": 1, "S": 1, "SDG": 1, "X": 1, "Y": 1, "Z": 1, "CZ": 2, "CNOT": 2}


def gate(kind: str, *qubits: int) -> CliffordGate:
    kind = kind.upper()
    if kind == "CX":
        kind = "CNOT"
    if kind not in _ARITY:
        raise ValueError(f"unknown gate {kind}")
    if len(qubits) != _ARITY[kind]:
        raise ValueError(f"{kind} takes {_ARITY[kind]} qubits")
    if len(set(qubits)) != len(qubits):
        raise ValueError("gate qubits must be distinct")
    return CliffordGate(kind, tuple(int(q) for q in qubits))


def _check_indices(g: CliffordGate, n: int) -> None:
    for q in g.qubits:
        if not 0 <= q < n:
            raise IndexError(f"qubit {q} out of range for {n} qubits")


def _apply_cols(x: np.ndarray, z: np.ndarray, ph: np.ndarray, g: CliffordGate) -> None:
    """Conjugate every row of (x, z, ph) by ``g`` in place. Rows on axis 0."""
    k = g.kind
    if k == "H":
        (a,) = g.qubits
        ph += 2 * (x[:, a] & z[:, a])
        tmp = x[:, a].copy()
        x[:, a] = z[:, a]
        z[:, a] = tmp
    elif k == "S":
        (a,) = g.qubits
        ph += x[:, a]
        z[:, a] ^= x[:, a]
    elif k == "SDG":
        (a,) = g.qubits
        z[:, a] ^= x[:, a]
        ph += 3 * x[:, a]
    elif k == "X":
        (a,) = g.qubits
        ph += 2 * z[:, a]
    elif k == "Z":
        (a,) = g.qubits
        ph += 2 * x[:, a]
    elif k == "Y":
        (a,) = g.qubits
        ph += 2 * (x[:, a] ^ z[:, a])
    elif k == "CNOT":
        c, t = g.qubits
        x[:, t] ^= x[:, c]
        z[:, c] ^= z[:, t]
    elif k == "CZ":
        c, t = g.qubits
        ph += 2 * (x[:, c] & x[:, t])
        z[:, t] ^= x[:, c]
        z[:, c] ^= x[:, t]
    else:  # pragma: no cover - guarded by gate()
        raise ValueError(k)
    ph &= 3


def conjugate_pauli_through(circuit: Iterable[CliffordGate], p: PauliString) -> PauliString:
    """Return ``C P C^dagger`` for the circuit applied gate by gate (first gate first)."""
    x = p.x.copy()[None, :]
    z = p.z.copy()[None, :]
    ph = np.array([p.phase], dtype=np.uint8)
    for g in circuit:
        _check_indices(g, p.n)
        _apply_cols(x, z, ph, g)
    return PauliString(p.n, x[0], z[0], int(ph[0]))


def circuit_inverse(circuit: Sequence[CliffordGate]) -> list:
    inv = {"S": "SDG", "SDG": "S"}
    return [CliffordGate(inv.get(g.kind, g.kind), g.qubits) for g in reversed(circuit)]


@dataclass
class Snapshot:
    """Frozen copy of a tableau plus any classical record riding along with it."""

    x: np.ndarray
    z: np.ndarray
    phase: np.ndarray
    record: dict = field(default_factory=dict)


class StabilizerTableau:
    """Destabilizer/stabilizer tableau on ``n`` qubits.

    Rows ``0..n-1`` are destabilizers and rows ``n..2n-1`` stabilizers, as in
    Aaronson-Gottesman, but phases are i-exponents in the ``X^x Z^z`` convention.
    """

    def __init__(self, n: int, x=None, z=None, phase=None):
        self.n = n
        if x is None:
            eye = np.eye(n, dtype=np.uint8)
            zero = np.zeros((n, n), dtype=np.uint8)
            x = np.vstack([eye, zero])
            z = np.vstack([zero, eye])
            phase = np.zeros(2 * n, dtype=np.uint8)
        self.x = x
        self.z = z
        self.phase = phase

    @classmethod
    def zero_state(cls, n: int) -> "StabilizerTableau":
        return cls(n)

    @classmethod
    def plus_state(cls, n: int) -> "StabilizerTableau":
        t = cls(n)
        t.x, t.z = t.z, t.x
        return t

    def copy(self) -> "StabilizerTableau":
        return StabilizerTableau(self.n, self.x.copy(), self.z.copy(), self.phase.copy())

    def stabilizers(self) -> list:
        n = self.n
        return [PauliString(n, self.x[i].copy(), self.z[i].copy(), int(self.phase[i]))
                for i in range(n, 2 * n)]

    def destabilizers(self) -> list:
        n = self.n
        return [PauliString(n, self.x[i].copy(), self.z[i].copy(), int(self.phase[i]))
                for i in range(n)]

    # -- gates -------------------------------------------------------------

    def apply(self, g: CliffordGate) -> "StabilizerTableau":
        _check_indices(g, self.n)
        _apply_cols(self.x, self.z, self.phase, g)
        if DEBUG:
            self.check_invariants()
        return self

    def apply_circuit(self, circuit: Iterable[CliffordGate]) -> "StabilizerTableau":
        for g in circuit:
            self.apply(g)
        return self

    def apply_linear(self, m: np.ndarray) -> "StabilizerTableau":
        """Apply the reversible linear map |v> -> |M v> over F2 (a CNOT circuit).

        X-parts map by M and Z-parts by M^{-T}; no phase changes in this
        convention.
        """
        m = np.asarray(m, dtype=np.uint8)
        minv = gf2_inv(m)
        self.x = (self.x.astype(np.int64) @ m.T.astype(np.int64) & 1).astype(np.uint8)
        self.z = (self.z.astype(np.int64) @ minv.astype(np.int64) & 1).astype(np.uint8)
        return self

    def apply_diagonal(self, s: np.ndarray, cz: np.ndarray) -> "StabilizerTableau":
        """Conjugate by the diagonal Clifford |v> -> i^{q(v)} |v>,
        q(v) = s.v + v^T cz v (mod 4), ``cz`` symmetric with zero diagonal."""
        s = np.asarray(s, dtype=np.int64)
        cz = np.asarray(cz, dtype=np.int64)
        xi = self.x.astype(np.int64)
        xc = xi @ cz
        qa = xi @ s + np.einsum("ij,ij->i", xc, xi)
        self.phase = ((self.phase.astype(np.int64) + qa) & 3).astype(np.uint8)
        self.z ^= ((xc + xi * s[None, :]) & 1).astype(np.uint8)
        return self

    def apply_pauli(self, p: PauliString) -> "StabilizerTableau":
        """Conjugate by a Pauli operator: rows anticommuting with it flip sign."""
        anti = self._anticommuting(p)
        self.phase[anti] = (self.phase[anti] + 2) % 4
        return self

    def apply_pauli_rotation(self, q: PauliString) -> "StabilizerTableau":
        """Conjugate by exp(-i pi/4 Q): rows R anticommuting with Q become i R Q."""
        anti = np.flatnonzero(self._anticommuting(q))
        if len(anti):
            extra = 2 * ((self.z[anti].astype(np.int64) @ q.x.astype(np.int64)) & 1)
            self.phase[anti] = ((self.phase[anti].astype(np.int64) + q.phase + extra + 1)
                                & 3).astype(np.uint8)
            self.x[anti] ^= q.x
            self.z[anti] ^= q.z
        return self

    def permute_qubits(self, dst: Sequence[int]) -> "StabilizerTableau":
        """Relabel qubit q as dst[q]."""
        dst = np.asarray(dst)
        x = np.empty_like(self.x)
        z = np.empty_like(self.z)
        x[:, dst] = self.x
        z[:, dst] = self.z
        self.x, self.z = x, z
        return self

    # -- measurement -------------------------------------------------------

    def _anticommuting(self, p: PauliString) -> np.ndarray:
        return ((self.x.astype(np.int64) @ p.z + self.z.astype(np.int64) @ p.x) & 1).astype(bool)

    def _mul_rows_into(self, targets: np.ndarray, src: int) -> None:
        """row_t <- row_t * row_src for each t in ``targets``."""
        if len(targets) == 0:
            return
        zt = self.z[targets].astype(np.int64)
        extra = 2 * ((zt @ self.x[src].astype(np.int64)) & 1)
        self.phase[targets] = ((self.phase[targets].astype(np.int64)
                                + int(self.phase[src]) + extra) & 3).astype(np.uint8)
        self.x[targets] ^= self.x[src]
        self.z[targets] ^= self.z[src]

    def peek_pauli(self, p: PauliString) -> Optional[int]:
        """Return the determined sign of ``p`` or None if the outcome is random."""
        if p.n != self.n:
            raise ValueError("qubit count mismatch")
        anti = self._anticommuting(p)
        if anti[self.n:].any():
            return None
        acc = PauliString.identity(self.n)
        for i in np.flatnonzero(anti[: self.n]):
            row = self.n + i
            acc = acc * PauliString(self.n, self.x[row], self.z[row], int(self.phase[row]))
        # acc = i^(acc.phase - p.phase) * p  and acc stabilizes the state
        return 1 if (p.phase - acc.phase) % 4 == 0 else -1

    def measure_pauli(self, p: PauliString, forced: Optional[int] = None,
                      rng: Optional[np.random.Generator] = None) -> tuple:
        """Measure Hermitian Pauli ``p``.

        Returns ``(sign, deterministic)``. A forced outcome that contradicts a
        deterministic measurement raises :class:`ContradictionError`.
        """
        if p.is_identity():
            raise ValueError("cannot measure the identity")
        if not p.is_hermitian:
            raise ValueError("measured Pauli must be Hermitian")
        n = self.n
        anti = self._anticommuting(p)
        stab_hits = np.flatnonzero(anti[n:])
        if len(stab_hits) == 0:
            sign = self.peek_pauli(p)
            if forced is not None and forced != sign:
                raise ContradictionError(f"{p.label()} is deterministically {sign:+d}")
            return sign, True
        piv = n + int(stab_hits[0])
        others = np.flatnonzero(anti)
        others = others[others != piv]
        self._mul_rows_into(others, piv)
        d = piv - n
        self.x[d] = self.x[piv]
        self.z[d] = self.z[piv]
        self.phase[d] = self.phase[piv]
        if forced is None:
            if rng is None:
                raise ValueError("random outcome needs an rng or a forced sign")
            forced = 1 if rng.integers(2) == 0 else -1
        if forced not in (1, -1):
            raise ValueError("forced outcome must be +1 or -1")
        self.x[piv] = p.x
        self.z[piv] = p.z
        self.phase[piv] = (p.phase + (0 if forced == 1 else 2)) % 4
        if DEBUG:
            self.check_invariants()
        return forced, False

    # -- rewinding ---------------------------------------------------------

    def snapshot(self, record: Optional[dict] = None) -> Snapshot:
        return Snapshot(self.x.copy(), self.z.copy(), self.phase.copy(), dict(record or {}))

    @classmethod
    def restore(cls, snap: Snapshot) -> "StabilizerTableau":
        n = snap.x.shape[1]
        return cls(n, snap.x.copy(), snap.z.copy(), snap.phase.copy())

    # -- checks ------------------------------------------------------------

    def symplectic_gram(self) -> np.ndarray:
        x = self.x.astype(np.int64)
        z = self.z.astype(np.int64)
        return (x @ z.T + z @ x.T) & 1

    def check_invariants(self) -> None:
        n = self.n
        gram = self.symplectic_gram()
        want = np.zeros((2 * n, 2 * n), dtype=np.int64)
        want[np.arange(n), np.arange(n) + n] = 1
        want[np.arange(n) + n, np.arange(n)] = 1
        if not np.array_equal(gram, want):
            raise AssertionError("tableau lost its symplectic basis structure")
        ys = np.count_nonzero(self.x & self.z, axis=1)
        if np.any((self.phase.astype(np.int64) - ys) % 2):
            raise AssertionError("tableau row is not Hermitian")

    def same_state(self, other: "StabilizerTableau") -> bool:
        """True when both tableaux stabilize the same state (signs included)."""
        if other.n != self.n:
            return False
        return all(other.peek_pauli(p) == 1 for p in self.stabilizers())


def gf2_rank(m: np.ndarray) -> int:
    a = (np.asarray(m, dtype=np.uint8) & 1).copy()
    rows, cols = a.shape
    r = 0
    for c in range(cols):
        piv = np.flatnonzero(a[r:, c])
        if len(piv) == 0:
            continue
        p = r + piv[0]
        a[[r, p]] = a[[p, r]]
        hits = np.flatnonzero(a[:, c])
        hits = hits[hits != r]
        a[hits] ^= a[r]
        r += 1
        if r == rows:
            break
    return r


def gf2_inv(m: np.ndarray) -> np.ndarray:
    a = (np.asarray(m, dtype=np.uint8) & 1).copy()
    n = a.shape[0]
    aug = np.hstack([a, np.eye(n, dtype=np.uint8)])
    for c in range(n):
        piv = np.flatnonzero(aug[c:, c])
        if len(piv) == 0:
            raise np.linalg.LinAlgError("matrix is singular over GF(2)")
        p = c + piv[0]
        aug[[c, p]] = aug[[p, c]]
        hits = np.flatnonzero(aug[:, c])
        hits = hits[hits != c]
        aug[hits] ^= aug[c]
    return aug[:, n:].copy()


def gf2_det(m: np.ndarray) -> int:
    m = np.asarray(m)
    if m.shape[0] == 0:
        return 1
    return int(gf2_rank(m) == m.shape[0])
