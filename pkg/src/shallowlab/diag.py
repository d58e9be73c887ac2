"""The diagonal Clifford group <CZ, S> on m wires, CNOT words, and the pentagram.

An element of the group acts as ``|v> -> i**q(v) |v>`` with
``q(v) = s.v + v^T C v (mod 4)``, ``s`` in Z_4^m and ``C`` a symmetric 0/1
matrix with zero diagonal (``C[j, k] = 1`` means one CZ between j and k). This
exponent form is canonical modulo global phase, so composition is addition.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from itertools import product
from typing import Iterable, NamedTuple, Sequence, Union

import numpy as np

from .pauli import CliffordGate, PauliString, conjugate_pauli_through, gate


class CnotGate(NamedTuple):
    control: int
    target: int

    def matrix(self, m: int) -> np.ndarray:
        """F2 action v -> M v: the transvection I + E[target, control]."""
        mat = np.eye(m, dtype=np.uint8)
        mat[self.target, self.control] = 1
        return mat

    def as_clifford(self) -> CliffordGate:
        return gate("CNOT", self.control, self.target)


def cnot(control: int, target: int) -> CnotGate:
    if control == target:
        raise ValueError("CNOT control and target must differ")
    return CnotGate(int(control), int(target))


def word_matrix(word: Sequence[CnotGate], m: int) -> np.ndarray:
    """F2 matrix of the operator product ``g_1 g_2 ... g_k`` (g_k acts first)."""
    mat = np.eye(m, dtype=np.uint8)
    for g in word:
        # right-multiply by I + E[t, c]: column c += column t
        mat[:, g.control] ^= mat[:, g.target]
    return mat


@dataclass(frozen=True, eq=False)
class DiagWord:
    s: np.ndarray   # int64, values mod 4
    cz: np.ndarray  # uint8, symmetric, zero diagonal

    @property
    def m(self) -> int:
        return len(self.s)

    @classmethod
    def identity(cls, m: int) -> "DiagWord":
        return cls(np.zeros(m, np.int64), np.zeros((m, m), np.uint8))

    @classmethod
    def from_gates(cls, m: int, s_gates: Iterable[int] = (), cz_gates: Iterable[tuple] = ()) -> "DiagWord":
        s = np.zeros(m, np.int64)
        cz = np.zeros((m, m), np.uint8)
        for q in s_gates:
            s[q] += 1
        for a, b in cz_gates:
            if a == b:
                raise ValueError("CZ needs two wires")
            cz[a, b] ^= 1
            cz[b, a] ^= 1
        return cls(s % 4, cz)

    def cz_upper(self) -> np.ndarray:
        return self.cz[np.triu_indices(self.m, 1)]

    @property
    def gate_parity(self) -> int:
        """Total gate count (S exponents plus CZs) mod 2."""
        return int((self.s.sum() + self.cz_upper().sum()) % 2)

    @property
    def parity_pair(self) -> tuple:
        """(S count mod 2, CZ count mod 2); H3_even is the kernel of this map."""
        return int(self.s.sum() % 2), int(self.cz_upper().sum() % 2)

    @property
    def is_even(self) -> bool:
        return self.parity_pair == (0, 0)

    def key(self) -> bytes:
        return self.s.astype(np.uint8).tobytes() + np.packbits(self.cz_upper()).tobytes()

    def __eq__(self, other) -> bool:
        if not isinstance(other, DiagWord):
            return NotImplemented
        return np.array_equal(self.s % 4, other.s % 4) and np.array_equal(self.cz, other.cz)

    def __hash__(self) -> int:
        return hash(self.key())

    def __repr__(self) -> str:
        pairs = [tuple(int(v) for v in p) for p in zip(*np.nonzero(np.triu(self.cz, 1)))]
        return f"DiagWord(s={self.s.tolist()}, cz={pairs})"

    def __mul__(self, other: "DiagWord") -> "DiagWord":
        return DiagWord((self.s + other.s) % 4, self.cz ^ other.cz)

    def inverse(self) -> "DiagWord":
        return DiagWord((-self.s) % 4, self.cz.copy())

    def embed(self, m: int) -> "DiagWord":
        """Extend to ``m`` wires, acting trivially on the new ones."""
        s = np.zeros(m, np.int64)
        cz = np.zeros((m, m), np.uint8)
        s[: self.m] = self.s
        cz[: self.m, : self.m] = self.cz
        return DiagWord(s, cz)

    def restrict(self, k: int) -> "DiagWord":
        if self.s[k:].any() or self.cz[k:, :].any():
            raise ValueError("word acts outside the first k wires")
        return DiagWord(self.s[:k].copy(), self.cz[:k, :k].copy())

    def phase_exponent(self, v) -> int:
        v = np.asarray(v, dtype=np.int64)
        return int((self.s @ v + v @ self.cz.astype(np.int64) @ v) % 4)

    def compose_linear(self, mat: np.ndarray) -> "DiagWord":
        """Form v -> q(M v): the element d' with d . c = c . d' when c|v> = |Mv>."""
        mm = np.asarray(mat, dtype=np.int64)
        cz = self.cz.astype(np.int64)
        mcm = mm.T @ cz @ mm
        s = (mm.T @ self.s + np.diag(mcm)) % 4
        quad = (mcm + mm.T @ (self.s[:, None] * mm)) % 2
        np.fill_diagonal(quad, 0)
        return DiagWord(s.astype(np.int64), quad.astype(np.uint8))

    def gates(self) -> list:
        """A Clifford gate list realising this element (S^k then CZs)."""
        out = []
        for q, e in enumerate(self.s):
            out.extend([gate("S", q)] * int(e % 4))
        for a, b in zip(*np.nonzero(np.triu(self.cz, 1))):
            out.append(gate("CZ", int(a), int(b)))
        return out

    def conjugate_pauli(self, p: PauliString) -> PauliString:
        """``d P d^dagger``: X^a picks up i^{q(a)} Z^{C a + s*a}."""
        a = p.x.astype(np.int64)
        qa = int((self.s @ a + a @ self.cz.astype(np.int64) @ a) % 4)
        zshift = ((self.cz.astype(np.int64) @ a + self.s * a) & 1).astype(np.uint8)
        return PauliString(p.n, p.x.copy(), p.z ^ zshift, p.phase + qa)


def push_diag_through_cnot(g: CnotGate, h: DiagWord) -> DiagWord:
    """Return h' with ``h g = g h'`` as unitaries (h' = g h g)."""
    c, t = g
    s = h.s.copy()
    cz = h.cz.copy()
    old_tc = int(cz[t, c])
    st = int(s[t])
    row = cz[c] ^ cz[t]
    row[t] = old_tc ^ (st & 1)
    row[c] = 0
    cz[c] = row
    cz[:, c] = row
    s[c] = (s[c] + st + 2 * old_tc) % 4
    return DiagWord(s, cz)


def sample_uniform_H(m: int, rng: np.random.Generator) -> DiagWord:
    s = rng.integers(0, 4, size=m).astype(np.int64)
    upper = np.triu(rng.integers(0, 2, size=(m, m), dtype=np.uint8), 1)
    return DiagWord(s, upper | upper.T)


S_FIX = DiagWord.from_gates(3, s_gates=[0])
CZ_FIX = DiagWord.from_gates(3, cz_gates=[(0, 1)])


def sample_uniform_H3_even(rng: np.random.Generator) -> DiagWord:
    """Uniform on H3_even: sample H_3, then shift into the kernel coset."""
    h = sample_uniform_H(3, rng)
    s_par, cz_par = h.parity_pair
    if s_par:
        h = h * S_FIX
    if cz_par:
        h = h * CZ_FIX
    return h


@lru_cache(maxsize=None)
def _enumerate_h3() -> tuple:
    out = []
    for s in product(range(4), repeat=3):
        for c01, c02, c12 in product(range(2), repeat=3):
            out.append(DiagWord.from_gates(
                3, s_gates=[q for q in range(3) for _ in range(s[q])],
                cz_gates=[p for p, bit in zip([(0, 1), (0, 2), (1, 2)], (c01, c02, c12)) if bit]))
    return tuple(out)


def enumerate_H3() -> list:
    """All 512 elements of H_3, fixed order."""
    return list(_enumerate_h3())


def enumerate_H3_even() -> list:
    """All 128 elements with an even number of S gates and of CZ gates.

    Fixed order; it is also the search order for blocking elements.
    """
    return [h for h in _enumerate_h3() if h.is_even]


Unitaryish = Union[DiagWord, CnotGate, Sequence[CliffordGate]]


def bullet(a: Unitaryish, b):
    """``a . b . a^{-1}``.

    ``b`` may be a PauliString (result: Pauli), or a DiagWord when ``a`` is a
    CnotGate (result: DiagWord, the conjugated diagonal element).
    """
    if isinstance(b, PauliString):
        if isinstance(a, DiagWord):
            if a.m != b.n:
                a = a.embed(b.n) if a.m < b.n else a
            return a.conjugate_pauli(b)
        if isinstance(a, CnotGate):
            return conjugate_pauli_through([a.as_clifford()], b)
        return conjugate_pauli_through(list(a), b)
    if isinstance(b, DiagWord):
        if isinstance(a, DiagWord):
            return b
        if isinstance(a, CnotGate):
            # a b a^{-1} = a b a = (b pushed through a)
            return push_diag_through_cnot(a, b)
    raise TypeError(f"unsupported bullet operands {type(a).__name__}, {type(b).__name__}")


# -- magic pentagram ------------------------------------------------------

PRINTED_I2 = (
    ("XXX", "XYY", "YXY", "YYX"),
    ("IYI", "XII", "XYY", "IIY"),
    ("IIY", "YXY", "YII", "IXI"),
    ("XXX", "XII", "IIX", "IXI"),
    ("IYI", "IIX", "YII", "YXY"),
)

# fifth line: YXY -> YYX restores the exactly-twice incidence
REPAIRED_I2 = PRINTED_I2[:4] + (("IYI", "IIX", "YII", "YYX"),)


@dataclass(frozen=True)
class PauliLine:
    paulis: tuple

    def __post_init__(self):
        ps = self.paulis
        if len(ps) != 4:
            raise ValueError("a line has four Paulis")
        for i in range(4):
            for j in range(i + 1, 4):
                if not ps[i].commutes(ps[j]):
                    raise ValueError(f"{ps[i].label()} and {ps[j].label()} anticommute")
        prod = ps[0] * ps[1] * ps[2] * ps[3]
        if not prod.is_identity() or not prod.is_hermitian:
            raise ValueError("line product is not +-III")

    @property
    def product_sign(self) -> int:
        ps = self.paulis
        return (ps[0] * ps[1] * ps[2] * ps[3]).sign

    def labels(self) -> tuple:
        return tuple(p.label(with_sign=False) for p in self.paulis)


@dataclass(frozen=True)
class PentagramConstants:
    lines: tuple          # five PauliLine
    star: tuple           # ten unsigned Paulis, first-appearance order
    s_set: tuple          # H3_even . star up to sign, sorted by label
    nonstab: tuple        # members of s_set that do not stabilize |+++>
    incidence: dict       # star label -> list of (line index, position)

    def star_index(self, p: PauliString) -> int:
        keys = [q.key() for q in self.star]
        return keys.index(p.key())


def stabilizes_plus(p: PauliString) -> bool:
    """Up to sign, P stabilizes |+...+> iff it is X-type."""
    return not p.z.any()


def build_pentagram_constants(lines=REPAIRED_I2) -> PentagramConstants:
    plines = tuple(PauliLine(tuple(PauliString.from_label(s) for s in line)) for line in lines)
    star: list = []
    incidence: dict = {}
    for li, line in enumerate(plines):
        for pos, p in enumerate(line.paulis):
            lab = p.label(with_sign=False)
            if lab not in incidence:
                star.append(p.unsigned())
                incidence[lab] = []
            incidence[lab].append((li, pos))
    if len(star) != 10:
        raise AssertionError(f"expected 10 distinct Paulis, got {len(star)}")
    bad = {k: len(v) for k, v in incidence.items() if len(v) != 2}
    if bad:
        raise AssertionError(f"Paulis not measured exactly twice: {bad}")
    negatives = sum(1 for line in plines if line.product_sign == -1)
    if negatives % 2 != 1:
        raise AssertionError("pentagram needs an odd number of -III lines")
    seen = {}
    for f in enumerate_H3_even():
        for p in star:
            q = f.conjugate_pauli(p).unsigned()
            seen.setdefault(q.label(with_sign=False), q)
    s_set = tuple(seen[k] for k in sorted(seen))
    nonstab = tuple(p for p in s_set if not stabilizes_plus(p))
    return PentagramConstants(plines, tuple(star), s_set, nonstab, incidence)


@lru_cache(maxsize=None)
def pentagram() -> PentagramConstants:
    return build_pentagram_constants()


Step = tuple  # (CnotGate | None, DiagWord): operator c . d, d acting first


def steps_circuit(steps: Sequence[Step]) -> list:
    """Time-ordered gates for the operator product of ``(c_i . d_i)``, first step leftmost."""
    out = []
    for c, d in reversed(list(steps)):
        out.extend(d.gates())
        if c is not None:
            out.append(c.as_clifford())
    return out
