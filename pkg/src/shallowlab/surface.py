"""Local stochastic noise, rotated surface-code blocks, recovery and decoding.

Block layout: data qubit (i, j) of a d x d patch has index i * d + j. A face
(i, j), i, j in [-1, d-1], covers the data qubits among (i..i+1, j..j+1); it is
an X-check when i + j is even and a Z-check otherwise. Interior faces are all
kept; weight-2 faces survive only on the top/bottom rows (X) and the
left/right columns (Z). That gives d^2 - 1 independent checks.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache
from itertools import product
from typing import Callable, Dict, List, Optional, Sequence, Tuple

import networkx as nx
import numpy as np

from .pauli import PauliString, StabilizerTableau, _apply_cols, gate, gf2_rank

# -- noise ------------------------------------------------------------------

NOISE_KINDS = ("iid_depolarizing", "iid_xz", "adversarial")


@dataclass(frozen=True)
class NoiseSpec:
    rate: float
    kind: str = "iid_depolarizing"
    # adversarial: policy(allowed_mask, rng) -> (x, z) supported inside allowed_mask
    policy: Optional[Callable] = None

    def __post_init__(self):
        if not 0.0 <= self.rate <= 1.0:
            raise ValueError("rate must lie in [0, 1]")
        if self.kind not in NOISE_KINDS:
            raise ValueError(f"unknown noise kind {self.kind!r}")


def sample_noise(spec: NoiseSpec, n: int, rng: np.random.Generator) -> PauliString:
    hit = rng.random(n) < spec.rate
    x = np.zeros(n, np.uint8)
    z = np.zeros(n, np.uint8)
    if spec.kind == "iid_depolarizing":
        kind = rng.integers(0, 3, size=n)  # 0 X, 1 Y, 2 Z
        x[hit & (kind <= 1)] = 1
        z[hit & (kind >= 1)] = 1
    elif spec.kind == "iid_xz":
        kind = rng.integers(0, 2, size=n)
        x[hit & (kind == 0)] = 1
        z[hit & (kind == 1)] = 1
    else:
        if spec.policy is None:
            x[hit] = 1
        else:
            px, pz = spec.policy(hit.copy(), rng)
            px = np.asarray(px, np.uint8)
            pz = np.asarray(pz, np.uint8)
            if ((px | pz) & ~hit.astype(np.uint8)).any():
                raise ValueError("adversary corrupted a qubit outside its allowed set")
            x, z = px, pz
    return PauliString(n, x, z, int(np.count_nonzero(x & z)))


# -- code layout -------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class CodeParams:
    d: int
    checks: Tuple[Tuple[str, Tuple[int, ...]], ...]
    logical_x: Tuple[int, ...]
    logical_z: Tuple[int, ...]
    h_relabel: Tuple[int, ...]  # dst[q] after transversal H

    @property
    def m(self) -> int:
        return self.d * self.d

    @property
    def num_checks(self) -> int:
        return len(self.checks)

    def check_indices(self, kind: str) -> List[int]:
        return [i for i, (k, _) in enumerate(self.checks) if k == kind]

    def check_matrix(self, kind: str) -> np.ndarray:
        rows = [sup for k, sup in self.checks if k == kind]
        mat = np.zeros((len(rows), self.m), np.uint8)
        for r, sup in enumerate(rows):
            mat[r, list(sup)] = 1
        return mat

    def check_pauli(self, idx: int, block: int = 0, n_blocks: int = 1) -> PauliString:
        kind, sup = self.checks[idx]
        n = self.m * n_blocks
        x = np.zeros(n, np.uint8)
        z = np.zeros(n, np.uint8)
        off = block * self.m
        tgt = x if kind == "X" else z
        tgt[[off + q for q in sup]] = 1
        return PauliString(n, x, z, 0)

    def logical(self, kind: str, block: int = 0, n_blocks: int = 1) -> PauliString:
        n = self.m * n_blocks
        x = np.zeros(n, np.uint8)
        z = np.zeros(n, np.uint8)
        sup = self.logical_x if kind == "X" else self.logical_z
        (x if kind == "X" else z)[[block * self.m + q for q in sup]] = 1
        return PauliString(n, x, z, 0)

    def layout_text(self) -> str:
        """Human-readable dump: grid of check ids per face and the logicals."""
        lines = [f"# rotated surface code d={self.d} m={self.m} checks={self.num_checks}"]
        for i, (k, sup) in enumerate(self.checks):
            lines.append(f"check {i} {k} " + " ".join(str(q) for q in sup))
        lines.append("logical X " + " ".join(str(q) for q in self.logical_x))
        lines.append("logical Z " + " ".join(str(q) for q in self.logical_z))
        lines.append("h_relabel " + " ".join(str(q) for q in self.h_relabel))
        return "\n".join(lines) + "\n"


def _dihedral(d: int):
    maps = []
    for rot in range(4):
        for flip in (False, True):
            dst = []
            for q in range(d * d):
                i, j = divmod(q, d)
                if flip:
                    j = d - 1 - j
                for _ in range(rot):
                    i, j = j, d - 1 - i
                dst.append(i * d + j)
            maps.append(tuple(dst))
    return maps


@lru_cache(maxsize=None)
def surface_code(d: int) -> CodeParams:
    if d < 3 or d % 2 == 0:
        raise ValueError("distance must be odd and at least 3")
    checks = []
    for i in range(-1, d):
        for j in range(-1, d):
            sup = tuple(sorted((a * d + b) for a in (i, i + 1) for b in (j, j + 1)
                               if 0 <= a < d and 0 <= b < d))
            kind = "X" if (i + j) % 2 == 0 else "Z"
            interior = 0 <= i < d - 1 and 0 <= j < d - 1
            if interior:
                checks.append((kind, sup))
            elif len(sup) == 2:
                row_edge = i in (-1, d - 1) and 0 <= j < d - 1
                col_edge = j in (-1, d - 1) and 0 <= i < d - 1
                if (row_edge and kind == "X") or (col_edge and kind == "Z"):
                    checks.append((kind, sup))
    # Z-logical along the top row commutes with X-checks (they overlap rows in pairs)
    logical_z = tuple(range(d))
    logical_x = tuple(i * d for i in range(d))
    xs = {sup for k, sup in checks if k == "X"}
    zs = {sup for k, sup in checks if k == "Z"}
    relabel = None
    for dst in _dihedral(d):
        img_x = {tuple(sorted(dst[q] for q in sup)) for sup in xs}
        img_z = {tuple(sorted(dst[q] for q in sup)) for sup in zs}
        if img_x == zs and img_z == xs:
            relabel = dst
            break
    if relabel is None:  # pragma: no cover - layout bug
        raise AssertionError("no lattice symmetry swaps check types")
    code = CodeParams(d, tuple(checks), logical_x, logical_z, relabel)
    _validate(code)
    return code


def _validate(code: CodeParams) -> None:
    hx = code.check_matrix("X")
    hz = code.check_matrix("Z")
    if len(code.checks) != code.m - 1:
        raise AssertionError("wrong number of checks")
    if gf2_rank(np.concatenate([hx, hz])) != code.m - 1:
        raise AssertionError("checks are dependent")
    if ((hx.astype(int) @ hz.T.astype(int)) & 1).any():
        raise AssertionError("X and Z checks do not commute")
    lz = np.zeros(code.m, np.uint8)
    lz[list(code.logical_z)] = 1
    lx = np.zeros(code.m, np.uint8)
    lx[list(code.logical_x)] = 1
    if ((hx.astype(int) @ lz) & 1).any() or ((hz.astype(int) @ lx) & 1).any():
        raise AssertionError("logicals do not commute with checks")
    if int(lx @ lz) % 2 != 1:
        raise AssertionError("logical X and Z must anticommute")


# -- matching decoder --------------------------------------------------------

class Matcher:
    """Minimum-weight correction for one check type (graph-like errors).

    ``kind="Z"`` matches Z-check syndromes with X-errors and vice versa.
    Results are cached by syndrome; ties are broken deterministically by the
    BFS order over sorted neighbours.
    """

    def __init__(self, code: CodeParams, kind: str):
        self.code = code
        self.kind = kind
        self.idx = code.check_indices(kind)
        self.hmat = code.check_matrix(kind)
        nc = len(self.idx)
        self.boundary = nc
        # adjacency check -> (neighbor check or boundary, qubit)
        adj: Dict[int, List[Tuple[int, int]]] = {c: [] for c in range(nc + 1)}
        for q in range(code.m):
            cs = list(np.flatnonzero(self.hmat[:, q]))
            if len(cs) == 2:
                a, b = cs
            elif len(cs) == 1:
                a, b = cs[0], nc
            else:  # pragma: no cover
                raise AssertionError("qubit in more than two checks of one type")
            adj[a].append((b, q))
            adj[b].append((a, q))
        for c in adj:
            adj[c].sort()
        self.dist = np.zeros((nc + 1, nc + 1), np.int64)
        self.paths: Dict[Tuple[int, int], Tuple[int, ...]] = {}
        for src in range(nc + 1):
            parent = {src: None}
            order = [src]
            dist = {src: 0}
            for u in order:
                for v, q in adj[u]:
                    if v not in parent:
                        parent[v] = (u, q)
                        dist[v] = dist[u] + 1
                        order.append(v)
            for dst in range(nc + 1):
                self.dist[src, dst] = dist[dst]
                qs = []
                v = dst
                while parent[v] is not None:
                    u, q = parent[v]
                    qs.append(q)
                    v = u
                self.paths[(src, dst)] = tuple(sorted(qs))
        self._cache: Dict[bytes, np.ndarray] = {}

    def syndrome(self, bits: np.ndarray) -> np.ndarray:
        return ((self.hmat.astype(np.int64) @ bits.astype(np.int64)) & 1).astype(np.uint8)

    def correction(self, syn: np.ndarray) -> np.ndarray:
        syn = np.asarray(syn, np.uint8)
        key = syn.tobytes()
        hit = self._cache.get(key)
        if hit is not None:
            return hit
        flagged = [int(c) for c in np.flatnonzero(syn)]
        corr = np.zeros(self.code.m, np.uint8)
        if flagged:
            g = nx.Graph()
            big = 10 * self.code.m
            for a_pos, a in enumerate(flagged):
                g.add_edge(("f", a), ("b", a), weight=big - int(self.dist[a, self.boundary]))
                for b in flagged[a_pos + 1:]:
                    g.add_edge(("f", a), ("f", b), weight=big - int(self.dist[a, b]))
                    g.add_edge(("b", a), ("b", b), weight=big)
            matching = nx.max_weight_matching(g, maxcardinality=True)
            pairs = sorted(tuple(sorted(e)) for e in matching)
            for u, v in pairs:
                if u[0] == "f" and v[0] == "f":
                    qs = self.paths[(u[1], v[1])]
                elif u[0] == "b" and v[0] == "f" and u[1] == v[1]:
                    qs = self.paths[(v[1], self.boundary)]
                elif u[0] == "f" and v[0] == "b" and u[1] == v[1]:
                    qs = self.paths[(u[1], self.boundary)]
                else:
                    continue
                corr[list(qs)] ^= 1
        if (self.syndrome(corr) != syn).any():  # pragma: no cover
            raise AssertionError("matching produced an inconsistent correction")
        self._cache[key] = corr
        return corr


@lru_cache(maxsize=None)
def matcher(d: int, kind: str) -> Matcher:
    return Matcher(surface_code(d), kind)


def rec(code: CodeParams, s: np.ndarray) -> PauliString:
    """Canonical recovery for per-block syndromes ``s`` (blocks x num_checks, bit 1 = -1)."""
    s = np.atleast_2d(np.asarray(s, np.uint8))
    if s.shape[1] != code.num_checks:
        raise ValueError(f"syndrome rows must have {code.num_checks} bits")
    nb = s.shape[0]
    x = np.zeros(nb * code.m, np.uint8)
    z = np.zeros(nb * code.m, np.uint8)
    mz = matcher(code.d, "Z")
    mx = matcher(code.d, "X")
    zi = code.check_indices("Z")
    xi = code.check_indices("X")
    for b in range(nb):
        sl = slice(b * code.m, (b + 1) * code.m)
        x[sl] = mz.correction(s[b, zi])
        z[sl] = mx.correction(s[b, xi])
    return PauliString(nb * code.m, x, z, int(np.count_nonzero(x & z)))


def dec(code: CodeParams, bits: np.ndarray, frame: Optional[np.ndarray] = None) -> int:
    """Logical Z readout of a Z-basis measured block (bit 1 = outcome -1)."""
    b = np.asarray(bits, np.uint8)
    if b.shape != (code.m,):
        raise ValueError(f"block must have {code.m} bits")
    if frame is not None:
        b = b ^ np.asarray(frame, np.uint8)
    mz = matcher(code.d, "Z")
    c = mz.correction(mz.syndrome(b))
    return int(np.count_nonzero((b ^ c)[list(code.logical_z)]) % 2)


def block_syndrome(code: CodeParams, p: PauliString, block: int) -> np.ndarray:
    """Check outcomes flipped by Pauli ``p`` on ``block`` (1 = anticommutes)."""
    off = block * code.m
    out = np.zeros(code.num_checks, np.uint8)
    for i, (kind, sup) in enumerate(code.checks):
        qs = [off + q for q in sup]
        out[i] = int(np.count_nonzero((p.z if kind == "X" else p.x)[qs]) % 2)
    return out


# -- encoded register --------------------------------------------------------

def _rotate_frame(p: PauliString, q: PauliString) -> PauliString:
    """exp(-i pi/4 Q) P exp(i pi/4 Q)."""
    if p.commutes(q):
        return p
    r = p * q
    return PauliString(r.n, r.x, r.z, r.phase + 1)


def _permute_pauli(p: PauliString, dst: np.ndarray, off: int) -> PauliString:
    x = p.x.copy()
    z = p.z.copy()
    m = len(dst)
    x[off + dst] = p.x[off:off + m]
    z[off + dst] = p.z[off:off + m]
    return PauliString(p.n, x, z, p.phase)


@dataclass
class EncodedRegister:
    """``n_log`` blocks on one tableau, with the classical record of what ran.

    ``ops`` holds the noiseless logical circuit (gates, rotations, relabels,
    syndrome rounds, readouts); ``syndromes`` the check outcomes in order.
    """
    code: CodeParams
    n_log: int
    tableau: StabilizerTableau
    syndromes: List[np.ndarray] = field(default_factory=list)
    ops: List[tuple] = field(default_factory=list)
    readouts: Dict[int, np.ndarray] = field(default_factory=dict)

    @property
    def m(self) -> int:
        return self.code.m

    def _q(self, block: int, q: int) -> int:
        return block * self.code.m + q

    def noise_layer(self, spec: Optional[NoiseSpec], rng: np.random.Generator,
                    blocks: Optional[Sequence[int]] = None) -> PauliString:
        n = self.n_log * self.m
        if spec is None or spec.rate == 0:
            return PauliString.identity(n)
        e = sample_noise(spec, n, rng)
        if blocks is not None:
            mask = np.zeros(n, np.uint8)
            for b in blocks:
                mask[b * self.m:(b + 1) * self.m] = 1
            e = PauliString(n, e.x & mask, e.z & mask, int(np.count_nonzero(e.x & e.z & mask)))
        self.tableau.apply_pauli(e)
        return e

    def measure_checks(self, blocks: Sequence[int], rng: np.random.Generator) -> np.ndarray:
        n_tot = self.n_log * self.m
        out = np.zeros((len(blocks), self.code.num_checks), np.uint8)
        for r, b in enumerate(blocks):
            for i in range(self.code.num_checks):
                p = self.code.check_pauli(i, b, self.n_log)
                sign, _ = self.tableau.measure_pauli(p, rng=rng)
                out[r, i] = sign == -1
        self.syndromes.append(out)
        self.ops.append(("ec", tuple(blocks)))
        return out

    def gate(self, g) -> None:
        self.tableau.apply(g)
        self.ops.append(("gate", g))

    def logical_h(self, b: int) -> None:
        for q in range(self.m):
            self.gate(gate("H", self._q(b, q)))
        dst = np.array(self.code.h_relabel)
        full = np.arange(self.n_log * self.m)
        full[b * self.m:(b + 1) * self.m] = b * self.m + dst
        self.tableau.permute_qubits(full)
        self.ops.append(("perm", b, dst))

    def logical_cnot(self, a: int, b: int) -> None:
        for q in range(self.m):
            self.gate(gate("CNOT", self._q(a, q), self._q(b, q)))

    def logical_cz(self, a: int, b: int) -> None:
        self.logical_h(b)
        self.logical_cnot(a, b)
        self.logical_h(b)

    def rotate(self, q: PauliString) -> None:
        self.tableau.apply_pauli_rotation(q)
        self.ops.append(("rot", q))

    def logical_sdg(self, b: int) -> None:
        # S^dagger = exp(+i pi/4 Z)
        self.rotate(-self.code.logical("Z", b, self.n_log))

    def logical_s(self, b: int) -> None:
        self.rotate(self.code.logical("Z", b, self.n_log))

    def readout(self, blocks: Sequence[int], rng: np.random.Generator) -> Dict[int, np.ndarray]:
        n = self.n_log * self.m
        out = {}
        for b in blocks:
            bits = np.zeros(self.m, np.uint8)
            for q in range(self.m):
                sign, _ = self.tableau.measure_pauli(PauliString.single(n, self._q(b, q), "Z"), rng=rng)
                bits[q] = sign == -1
            out[b] = bits
            self.readouts[b] = bits
        self.ops.append(("measure", tuple(blocks)))
        return out


def prepare_logical_basis(code: CodeParams, states: Sequence[str], noise: Optional[NoiseSpec],
                          rng: np.random.Generator) -> Tuple[EncodedRegister, np.ndarray]:
    """Product physical state, one noise layer, then every check measured.

    ``states`` lists "0" or "+" per block. The recovery is only recorded.
    """
    nb = len(states)
    tab = StabilizerTableau.zero_state(nb * code.m)
    for b, st in enumerate(states):
        if st not in ("0", "+"):
            raise ValueError("basis state must be '0' or '+'")
        if st == "+":
            for q in range(code.m):
                tab.apply(gate("H", b * code.m + q))
    reg = EncodedRegister(code, nb, tab)
    reg.noise_layer(noise, rng)
    s = reg.measure_checks(list(range(nb)), rng)
    return reg, s


@dataclass
class Frame:
    f: Dict[int, np.ndarray]  # X-part per block at its readout
    final: PauliString        # the frame after the whole circuit


def conjugated_frame(code: CodeParams, n_log: int, syndromes: Sequence[np.ndarray],
                     ops: Sequence[tuple]) -> Frame:
    """Push the recoveries through the recorded noiseless circuit.

    Each syndrome round multiplies the frame by ``Rec`` of the outcomes
    relative to what the current frame already predicts.
    """
    n = n_log * code.m
    frame = PauliString.identity(n)
    chunks = iter(syndromes)
    f: Dict[int, np.ndarray] = {}
    for op in ops:
        tag = op[0]
        if tag == "ec":
            s = next(chunks)
            corr_rows = []
            for r, b in enumerate(op[1]):
                corr_rows.append(s[r] ^ block_syndrome(code, frame, b))
            fix = rec(code, np.array(corr_rows))
            x = np.zeros(n, np.uint8)
            z = np.zeros(n, np.uint8)
            for r, b in enumerate(op[1]):
                x[b * code.m:(b + 1) * code.m] = fix.x[r * code.m:(r + 1) * code.m]
                z[b * code.m:(b + 1) * code.m] = fix.z[r * code.m:(r + 1) * code.m]
            frame = frame * PauliString(n, x, z, int(np.count_nonzero(x & z)))
        elif tag == "gate":
            x = frame.x[None, :].copy()
            z = frame.z[None, :].copy()
            ph = np.array([frame.phase], np.uint8)
            _apply_cols(x, z, ph, op[1])
            frame = PauliString(n, x[0], z[0], int(ph[0]))
        elif tag == "rot":
            frame = _rotate_frame(frame, op[1])
        elif tag == "perm":
            frame = _permute_pauli(frame, op[2], op[1] * code.m)
        elif tag == "measure":
            for b in op[1]:
                f[b] = frame.x[b * code.m:(b + 1) * code.m].copy()
        else:
            raise ValueError(f"unknown op {tag!r}")
    return Frame(f, frame)


def decode_blocks(code: CodeParams, readouts: Dict[int, np.ndarray], frame: Frame) -> Dict[int, int]:
    out = {}
    for b, bits in readouts.items():
        if len(bits) != code.m:
            raise ValueError("block-size mismatch")
        out[b] = dec(code, bits, frame.f[b])
    return out


def check_noisy_extended(x, readouts: Dict[int, np.ndarray], syndromes, ops, code: CodeParams,
                         n_log: int, relation: Callable) -> bool:
    """Accept iff ``relation(x, y)`` holds for the frame-corrected decodings y."""
    frame = conjugated_frame(code, n_log, syndromes, ops)
    y = decode_blocks(code, readouts, frame)
    return bool(relation(x, y))
