"""Compile Clifford words onto cluster-state patterns measured in X/Y only.

Layout: logical wire r is row r of a grid, time runs along columns. Measuring
column j in basis B teleports the row state to column j+1 as ``X^s H R(B)``,
with R(X) = I and R(Y) = S^dagger. Columns are used in pairs ("ticks"); a
tick applies, per row, ``(H R_b)(H R_a)`` which is I, S^dagger, HS^daggerH or
their product, and vertical rungs in the tick's first column apply CZ between
adjacent rows. The pattern graph is the wire-and-rung subgraph of the grid.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from .diag import steps_circuit
from .graphs import ColoredGraph
from .pauli import (CliffordGate, PauliString, StabilizerTableau, _apply_cols,
                    conjugate_pauli_through, gate)


class PatternTooLarge(ValueError):
    pass


# elementary ops: ("SD", r), ("XSD", r), ("CZ", r) meaning CZ(r, r+1)

def _lower_single(kind: str, r: int) -> list:
    if kind == "SDG":
        return [("SD", r)]
    if kind == "S":
        return [("SD", r)] * 3
    if kind == "Z":
        return [("SD", r)] * 2
    if kind == "H":
        # S^dag (H S^dag H) S^dag is H up to phase
        return [("SD", r), ("XSD", r), ("SD", r)]
    if kind == "X":
        return _lower_single("H", r) + _lower_single("Z", r) + _lower_single("H", r)
    if kind == "Y":
        return _lower_single("Z", r) + _lower_single("X", r)
    raise ValueError(kind)


def _lower_adjacent(kind: str, a: int, b: int) -> list:
    lo = min(a, b)
    if kind == "CZ":
        return [("CZ", lo)]
    if kind == "CNOT":
        return _lower_single("H", b) + [("CZ", lo)] + _lower_single("H", b)
    if kind == "SWAP":
        return (_lower_adjacent("CNOT", a, b) + _lower_adjacent("CNOT", b, a)
                + _lower_adjacent("CNOT", a, b))
    raise ValueError(kind)


def _lower_two(kind: str, a: int, b: int) -> list:
    if abs(a - b) == 1:
        return _lower_adjacent(kind, a, b)
    # walk b next to a with adjacent swaps, act, walk back
    step = 1 if b < a else -1
    swaps = []
    pos = b
    while abs(a - pos) > 1:
        swaps.append((pos, pos + step))
        pos += step
    out = []
    for u, v in swaps:
        out += _lower_adjacent("SWAP", u, v)
    out += _lower_adjacent(kind, a, pos)
    for u, v in reversed(swaps):
        out += _lower_adjacent("SWAP", u, v)
    return out


def lower_circuit(circuit: Sequence[CliffordGate]) -> list:
    ops = []
    for g in circuit:
        if len(g.qubits) == 1:
            ops += _lower_single(g.kind, g.qubits[0])
        else:
            ops += _lower_two(g.kind, *g.qubits)
    return ops


def schedule(ops: Sequence[tuple], m: int):
    """Pack elementary ops into ticks. Returns (a, b, rungs) with a, b of shape
    (T, m) marking S^dag slots and ``rungs`` a (T, m-1) array."""
    a_rows: List[np.ndarray] = []
    b_rows: List[np.ndarray] = []
    r_rows: List[np.ndarray] = []
    tick = [0] * m        # last tick holding an op on this row
    x_used = [False] * m  # whether that tick's b-slot is taken

    def ensure(t):
        while len(a_rows) <= t:
            a_rows.append(np.zeros(m, np.uint8))
            b_rows.append(np.zeros(m, np.uint8))
            r_rows.append(np.zeros(max(m - 1, 0), np.uint8))

    def diag_slot(r):
        return tick[r] + 1 if x_used[r] else tick[r]

    def claim(r, t, x):
        if t > tick[r]:
            tick[r], x_used[r] = t, False
        if x:
            x_used[r] = True

    for kind, r in ops:
        if kind == "SD":
            t = diag_slot(r)
            ensure(t)
            if a_rows[t][r]:
                t += 1
                ensure(t)
            a_rows[t][r] = 1
            claim(r, t, False)
        elif kind == "XSD":
            t = tick[r] + 1 if x_used[r] else tick[r]
            ensure(t)
            b_rows[t][r] = 1
            claim(r, t, True)
        elif kind == "CZ":
            t = max(diag_slot(r), diag_slot(r + 1))
            ensure(t)
            if r_rows[t][r]:
                t += 1
                ensure(t)
            r_rows[t][r] = 1
            claim(r, t, False)
            claim(r + 1, t, False)
        else:
            raise ValueError(kind)
    if not a_rows:
        return (np.zeros((0, m), np.uint8), np.zeros((0, m), np.uint8),
                np.zeros((0, max(m - 1, 0)), np.uint8))
    return np.array(a_rows), np.array(b_rows), np.array(r_rows)


@dataclass(frozen=True, eq=False)
class MbqcPattern:
    m: int
    bases: np.ndarray    # (m, ncols) uint8, 1 = Y; column ncols is the output
    rungs: np.ndarray    # (ncols, m-1) uint8, rung (r, r+1) in column j
    frames_x: np.ndarray  # (m * ncols, m) byproduct contribution per vertex
    frames_z: np.ndarray

    @property
    def ncols(self) -> int:
        return self.bases.shape[1]

    @property
    def num_measured(self) -> int:
        return self.m * self.ncols

    def vertex(self, r: int, j: int) -> int:
        """Index of grid vertex (row r, column j), output column j = ncols."""
        return r * (self.ncols + 1) + j

    def measured_vertices(self) -> List[int]:
        return [self.vertex(r, j) for j in range(self.ncols) for r in range(self.m)]

    def output_vertices(self) -> List[int]:
        return [self.vertex(r, self.ncols) for r in range(self.m)]

    def graph(self) -> ColoredGraph:
        w = self.ncols + 1
        edges = []
        for r in range(self.m):
            for j in range(self.ncols):
                edges.append((self.vertex(r, j), self.vertex(r, j + 1)))
        for j in range(self.ncols):
            for r in range(self.m - 1):
                if self.rungs[j, r]:
                    edges.append((self.vertex(r, j), self.vertex(r + 1, j)))
        coloring = [2 if v % w == self.ncols else 1 for v in range(w * self.m)]
        return ColoredGraph.build(w * self.m, edges, coloring, w, self.m)

    def basis_of(self, r: int, j: int) -> str:
        return "Y" if self.bases[r, j] else "X"

    def column_circuit(self, j: int) -> list:
        """Unitary carried out when column j is measured with outcome +1 everywhere."""
        out = [gate("CZ", r, r + 1) for r in range(self.m - 1) if self.rungs[j, r]]
        for r in range(self.m):
            if self.bases[r, j]:
                out.append(gate("SDG", r))
            out.append(gate("H", r))
        return out

    def logical_circuit(self) -> list:
        out = []
        for j in range(self.ncols):
            out += self.column_circuit(j)
        return out

    def concat(self, other: "MbqcPattern") -> "MbqcPattern":
        """Pattern running ``self`` and then ``other`` with no merging."""
        if other.m != self.m:
            raise ValueError("wire counts differ")
        return _finish(self.m, np.concatenate([self.bases, other.bases], axis=1),
                       np.concatenate([self.rungs, other.rungs], axis=0))


def _finish(m: int, bases: np.ndarray, rungs: np.ndarray) -> MbqcPattern:
    """Attach byproduct frames: an outcome -1 at (r, j) puts X_r on the state
    entering column j+1, which is then conjugated by the remaining columns."""
    ncols = bases.shape[1]
    nv = m * ncols
    x = np.zeros((nv, m), np.uint8)
    z = np.zeros((nv, m), np.uint8)
    ph = np.zeros(nv, np.uint8)
    proto = MbqcPattern(m, bases, rungs, x, z)
    for j in range(ncols):
        # rows for column j-1 vertices enter here; earlier rows keep evolving
        if j > 0:
            for r in range(m):
                x[(j - 1) * m + r, r] = 1
        for g in proto.column_circuit(j):
            _apply_cols(x, z, ph, g)
    if ncols:
        for r in range(m):
            x[(ncols - 1) * m + r, r] = 1
    return MbqcPattern(m, bases, rungs, x, z)


def compile_word_to_mbqc(word, m: int, max_columns: Optional[int] = None) -> MbqcPattern:
    """Pattern whose residual wires hold ``P . U |+^m>``, U the word's operator.

    ``word`` is a sequence of (CnotGate | None, DiagWord) steps (first step
    leftmost in the operator product) or a plain list of Clifford gates in
    time order.
    """
    word = list(word)
    if word and isinstance(word[0], CliffordGate):
        circuit = word
    else:
        circuit = steps_circuit(word)
    for g in circuit:
        if max(g.qubits) >= m:
            raise ValueError(f"gate {g} outside {m} wires")
    a, b, r = schedule(lower_circuit(circuit), m)
    T = a.shape[0]
    if max_columns is not None and 2 * T > max_columns:
        raise PatternTooLarge(f"needs {2 * T} columns, limit {max_columns}")
    bases = np.zeros((m, 2 * T), np.uint8)
    bases[:, 0::2] = a.T
    bases[:, 1::2] = b.T
    rungs = np.zeros((2 * T, max(m - 1, 0)), np.uint8)
    rungs[0::2] = r
    return _finish(m, bases, rungs)


def _outcome_bits(pattern: MbqcPattern, outcomes) -> np.ndarray:
    """Accept a (m, ncols) array of +-1 or bits (bool, or ints with a 0), or a
    dict vertex -> +-1."""
    if isinstance(outcomes, dict):
        bits = np.zeros(pattern.num_measured, np.uint8)
        for j in range(pattern.ncols):
            for r in range(pattern.m):
                v = pattern.vertex(r, j)
                if v not in outcomes:
                    raise KeyError(f"missing outcome for vertex {v}")
                bits[j * pattern.m + r] = outcomes[v] == -1
        return bits
    arr = np.asarray(outcomes)
    if arr.shape != (pattern.m, pattern.ncols):
        raise ValueError(f"outcomes must have shape {(pattern.m, pattern.ncols)}")
    if arr.dtype.kind != "b" and not (arr == 0).any():
        # no zeros: read as +-1 outcomes (an all-ones bit array must be passed as bool)
        arr = (arr == -1)
    elif not np.isin(arr, (0, 1)).all():
        raise ValueError("outcomes must be all +-1 or all bits")
    return arr.T.reshape(-1).astype(np.uint8)


def pauli_byproduct(pattern: MbqcPattern, outcomes) -> PauliString:
    """Residual Pauli frame, sign dropped (it is a global phase on the state)."""
    bits = _outcome_bits(pattern, outcomes).astype(np.int64)
    x = (bits @ pattern.frames_x.astype(np.int64)) & 1
    z = (bits @ pattern.frames_z.astype(np.int64)) & 1
    return PauliString(pattern.m, x.astype(np.uint8), z.astype(np.uint8), 0).unsigned()


def simulate_pattern(pattern: MbqcPattern, rng: Optional[np.random.Generator] = None,
                     forced=None):
    """Measure the round-1 columns one at a time on a two-column window.

    Returns ``(outcomes, residual)`` with outcomes a (m, ncols) array of +-1
    and ``residual`` an m-qubit tableau of the output column.
    """
    m, ncols = pattern.m, pattern.ncols
    tab = StabilizerTableau.plus_state(2 * m)
    outs = np.ones((m, ncols), np.int64)
    cur, nxt = 0, m
    for j in range(ncols):
        for r in range(m - 1):
            if pattern.rungs[j, r]:
                tab.apply(gate("CZ", cur + r, cur + r + 1))
        for r in range(m):
            tab.apply(gate("CZ", cur + r, nxt + r))
        for r in range(m):
            q = cur + r
            kind = pattern.basis_of(r, j)
            f = None if forced is None else int(forced[r, j])
            o, _ = tab.measure_pauli(PauliString.single(2 * m, q, kind), forced=f, rng=rng)
            outs[r, j] = o
            # reset the measured qubit to |+>
            if kind == "Y":
                tab.apply(gate("SDG", q))  # Y-eigenstate -> X-eigenstate, same sign
            if o == -1:
                tab.apply(gate("Z", q))
        cur, nxt = nxt, cur
    return outs, _extract(tab, cur, m)


def _extract(tab: StabilizerTableau, start: int, m: int) -> StabilizerTableau:
    """Restrict a state of the form (block at ``start``) x |+^m> to the block."""
    n = tab.n
    other = [q for q in range(n) if not (start <= q < start + m)]
    keep = list(range(start, start + m))
    stabs = tab.stabilizers()
    rows = []
    for p in stabs:
        if p.x[other].any() or p.z[other].any():
            continue
        rows.append(p)
    # complete with products that cancel the |+> part
    if len(rows) < m:
        # Gaussian elimination on the other-block part to find combinations
        mat = np.array([np.concatenate([p.x[other], p.z[other]]) for p in stabs], np.uint8)
        combos = _null_combinations(mat)
        rows = []
        for c in combos:
            acc = PauliString.identity(n)
            for i in np.nonzero(c)[0]:
                acc = acc * stabs[i]
            rows.append(acc)
    sub = [PauliString(m, p.x[keep], p.z[keep], p.phase) for p in rows]
    return _tableau_from_stabilizers(sub)


def _null_combinations(mat: np.ndarray) -> List[np.ndarray]:
    """Basis of the left null space of ``mat`` over F2."""
    k = mat.shape[0]
    aug = np.concatenate([mat.copy(), np.eye(k, dtype=np.uint8)], axis=1)
    ncols = mat.shape[1]
    row = 0
    for c in range(ncols):
        piv = [i for i in range(row, k) if aug[i, c]]
        if not piv:
            continue
        aug[[row, piv[0]]] = aug[[piv[0], row]]
        for i in range(k):
            if i != row and aug[i, c]:
                aug[i] ^= aug[row]
        row += 1
    return [aug[i, ncols:] for i in range(row, k)]


def _tableau_from_stabilizers(stabs: Sequence[PauliString]) -> StabilizerTableau:
    """Stabilizer state fixed by ``stabs`` (independent, commuting, Hermitian)."""
    m = stabs[0].n
    t = StabilizerTableau.zero_state(m)
    # project |0...0> onto each generator, then correct signs
    rng = np.random.default_rng(0)
    for p in stabs:
        sign, _ = t.measure_pauli(p, rng=rng)
        if sign != 1:
            # flip this generator with a destabilizer-like Pauli: find one anticommuting
            # with p but commuting with the other generators
            fix = _flipper(stabs, p)
            t.apply_pauli(fix)
    return t


def _flipper(stabs: Sequence[PauliString], target: PauliString) -> PauliString:
    m = target.n
    rows = np.array([np.concatenate([s.z, s.x]) for s in stabs], np.uint8)
    want = np.array([0 if s is not target else 1 for s in stabs], np.uint8)
    # solve rows @ (x | z) = want over F2 (symplectic product)
    sol = _solve_gf2(rows, want)
    return PauliString(m, sol[:m], sol[m:], 0)


def _solve_gf2(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    a = a.copy() % 2
    b = b.copy() % 2
    k, n = a.shape
    piv_cols = []
    row = 0
    for c in range(n):
        piv = [i for i in range(row, k) if a[i, c]]
        if not piv:
            continue
        a[[row, piv[0]]] = a[[piv[0], row]]
        b[[row, piv[0]]] = b[[piv[0], row]]
        for i in range(k):
            if i != row and a[i, c]:
                a[i] ^= a[row]
                b[i] ^= b[row]
        piv_cols.append(c)
        row += 1
    if b[row:].any():
        raise ValueError("inconsistent system")
    x = np.zeros(n, np.uint8)
    for i, c in enumerate(piv_cols):
        x[c] = b[i]
    return x


def expected_residual(word, m: int, byproduct: Optional[PauliString] = None) -> StabilizerTableau:
    """Direct simulation: ``P . U |+^m>``."""
    word = list(word)
    circuit = word if word and isinstance(word[0], CliffordGate) else steps_circuit(word)
    t = StabilizerTableau.plus_state(m).apply_circuit(circuit)
    if byproduct is not None:
        t.apply_pauli(byproduct)
    return t
