"""Path-parity instances, the determinant encoding, its randomization, the
layered construction, and the reduction to CNOT words.

Vertices are 1-indexed in every public structure, matching how DAG instances
are usually written down; arrays are 0-indexed internally.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass
from functools import lru_cache
from itertools import product
from typing import Callable, Dict, Iterable, List, Optional, Sequence, Tuple

import numpy as np

from .diag import CnotGate, cnot, word_matrix
from .pauli import gf2_det

SHARES = 2
DAG_FORMAT = "# shallowlab-dag v1"
LAYERED_FORMAT = "# shallowlab-layered v1"


# -- monotone DAGs -------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class MonotoneDag:
    n: int
    adj: np.ndarray  # (n, n) uint8, strictly upper triangular

    def __post_init__(self):
        a = np.asarray(self.adj)
        if a.shape != (self.n, self.n):
            raise ValueError("adjacency shape mismatch")
        if np.tril(a).any():
            raise ValueError("monotone DAG needs a strictly upper-triangular adjacency")

    @classmethod
    def from_edges(cls, n: int, edges: Iterable[Tuple[int, int]]) -> "MonotoneDag":
        a = np.zeros((n, n), np.uint8)
        for u, v in edges:
            a[u - 1, v - 1] = 1
        return cls(n, a)

    def edges(self) -> List[Tuple[int, int]]:
        return [(int(u) + 1, int(v) + 1) for u, v in zip(*np.nonzero(self.adj))]

    def key(self) -> bytes:
        return self.adj.astype(np.uint8).tobytes()

    def __eq__(self, other) -> bool:
        return isinstance(other, MonotoneDag) and self.n == other.n and self.key() == other.key()

    def __hash__(self) -> int:
        return hash((self.n, self.key()))

    def toggled(self, u: int, v: int) -> "MonotoneDag":
        a = self.adj.copy()
        a[u - 1, v - 1] ^= 1
        return MonotoneDag(self.n, a)


def all_dags(n: int):
    slots = [(i, j) for i in range(n) for j in range(i + 1, n)]
    for bits in product((0, 1), repeat=len(slots)):
        a = np.zeros((n, n), np.uint8)
        for (i, j), b in zip(slots, bits):
            a[i, j] = b
        yield MonotoneDag(n, a)


def random_dag(n: int, rng: np.random.Generator) -> MonotoneDag:
    return MonotoneDag(n, np.triu(rng.integers(0, 2, size=(n, n), dtype=np.uint8), 1))


def dump_dag(g: MonotoneDag) -> str:
    lines = [DAG_FORMAT, f"n {g.n}"] + [f"{u} {v}" for u, v in g.edges()]
    return "\n".join(lines) + "\n"


def load_dag(text: str) -> MonotoneDag:
    rows = [ln.strip() for ln in text.splitlines() if ln.strip()]
    if not rows or rows[0] != DAG_FORMAT:
        raise ValueError("missing dag format header")
    tag, n = rows[1].split()
    if tag != "n":
        raise ValueError("second line must be 'n <count>'")
    edges = [tuple(int(t) for t in ln.split()) for ln in rows[2:]]
    return MonotoneDag.from_edges(int(n), edges)


# -- oracle and determinant encoding -------------------------------------------------

def path_parity_bruteforce(g) -> int:
    """Exact path count from source to target (integers), reduced mod 2."""
    if isinstance(g, LayeredDag):
        return g.path_parity()
    if g.n > 20:
        raise ValueError("oracle capped at n = 20")
    count = [0] * g.n
    count[0] = 1
    for v in range(1, g.n):
        count[v] = sum(count[u] for u in range(v) if g.adj[u, v])
    return count[g.n - 1] % 2


def extract_L(g: MonotoneDag) -> np.ndarray:
    """Top-right (n-1)x(n-1) block of A - I over F2 (so the -1s become 1s)."""
    if g.n < 2:
        raise ValueError("need n >= 2")
    a = (g.adj.astype(np.uint8) ^ np.eye(g.n, dtype=np.uint8))
    return a[: g.n - 1, 1:].copy()


def det_encoding(g: MonotoneDag) -> int:
    return gf2_det(extract_L(g))


def check_L_form(mat: np.ndarray) -> None:
    k = mat.shape[0]
    if mat.shape != (k, k):
        raise ValueError("matrix must be square")
    for i in range(1, k):
        if mat[i, i - 1] != 1:
            raise ValueError("second diagonal must be all ones")
    if np.tril(mat, -2).any():
        raise ValueError("entries below the second diagonal must vanish")


# -- randomization ---------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class ShareMatrix:
    """Shares K^(l)_{i,j} for 1 <= i <= j <= n-1, stored as ``shares[i-1, j-1, l]``."""
    size: int              # n - 1
    shares: np.ndarray     # (size, size, SHARES) uint8, zero below the diagonal

    @property
    def n(self) -> int:
        return self.size + 1

    @property
    def num_shares(self) -> int:
        return self.shares.shape[2]

    def k_xor(self) -> np.ndarray:
        k = np.bitwise_xor.reduce(self.shares, axis=2).astype(np.uint8)
        k = np.triu(k)
        for i in range(1, self.size):
            k[i, i - 1] = 1
        return k

    def key(self) -> bytes:
        return self.shares.tobytes()

    def __eq__(self, other) -> bool:
        return isinstance(other, ShareMatrix) and self.key() == other.key() and \
            self.shares.shape == other.shares.shape

    def __hash__(self) -> int:
        return hash(self.key())

    @classmethod
    def from_cells(cls, cells: Dict[Tuple[int, int], Sequence[int]], size: int) -> "ShareMatrix":
        """``cells[(i, j)]`` (1-indexed, i <= j) lists the shares of that cell."""
        width = len(next(iter(cells.values())))
        sh = np.zeros((size, size, width), np.uint8)
        for (i, j), vals in cells.items():
            if not 1 <= i <= j <= size:
                raise ValueError(f"cell {(i, j)} outside the upper triangle")
            sh[i - 1, j - 1] = vals
        return cls(size, sh)


def unit_upper(k: int, bits: Sequence[int]) -> np.ndarray:
    r = np.eye(k, dtype=np.uint8)
    iu = np.triu_indices(k, 1)
    r[iu] = np.asarray(bits, np.uint8)
    return r


def randomize_k(L: np.ndarray, r1: np.ndarray, r2: np.ndarray) -> np.ndarray:
    return ((r1.astype(np.int64) @ L.astype(np.int64) @ r2.astype(np.int64)) & 1).astype(np.uint8)


def split_shares(k: np.ndarray, share_bits: np.ndarray) -> ShareMatrix:
    """Fix all but the last share per cell from ``share_bits``; the last one
    completes the XOR to K⊕."""
    size = k.shape[0]
    sh = np.zeros((size, size, SHARES), np.uint8)
    free = iter(np.asarray(share_bits, np.uint8).reshape(-1))
    for i in range(size):
        for j in range(i, size):
            acc = 0
            for l in range(SHARES - 1):
                b = int(next(free))
                sh[i, j, l] = b
                acc ^= b
            sh[i, j, SHARES - 1] = acc ^ int(k[i, j])
    return ShareMatrix(size, sh)


def randomize_matrix(L: np.ndarray, rng: np.random.Generator) -> ShareMatrix:
    """K⊕ = R1 L R2 with uniform unit-upper-triangular R's, then XOR shares."""
    L = np.asarray(L, np.uint8)
    check_L_form(L)
    k = L.shape[0]
    nfree = k * (k - 1) // 2
    r1 = unit_upper(k, rng.integers(0, 2, nfree))
    r2 = unit_upper(k, rng.integers(0, 2, nfree))
    kx = randomize_k(L, r1, r2)
    ncells = k * (k + 1) // 2
    return split_shares(kx, rng.integers(0, 2, ncells * (SHARES - 1)))


def orbit_counts(L: np.ndarray) -> Counter:
    """How often each K = R1 L R2 occurs over all unit-upper-triangular R1, R2."""
    size = L.shape[0]
    nfree = size * (size - 1) // 2
    out: Counter = Counter()
    for b1 in product((0, 1), repeat=nfree):
        for b2 in product((0, 1), repeat=nfree):
            out[randomize_k(L, unit_upper(size, b1), unit_upper(size, b2)).tobytes()] += 1
    return out


def l_form_matrices(size: int, det: int) -> List[np.ndarray]:
    """Every matrix with ones on the second diagonal, zeros below it, and the given det."""
    out = []
    for bits in product((0, 1), repeat=size * (size + 1) // 2):
        m = np.zeros((size, size), np.uint8)
        m[np.triu_indices(size)] = bits
        for i in range(1, size):
            m[i, i - 1] = 1
        if gf2_det(m) == det:
            out.append(m)
    return out


def orbit_is_uniform(L: np.ndarray) -> bool:
    """K-orbit of L hits each same-determinant matrix of the form equally often."""
    counts = orbit_counts(L)
    want = {m.tobytes() for m in l_form_matrices(L.shape[0], gf2_det(L))}
    return set(counts) == want and len(set(counts.values())) == 1


def randomness_space(size: int):
    """Every (r1, r2, share_bits) for exhaustive audits."""
    nfree = size * (size - 1) // 2
    ncells = size * (size + 1) // 2
    for b1 in product((0, 1), repeat=nfree):
        for b2 in product((0, 1), repeat=nfree):
            for sb in product((0, 1), repeat=ncells * (SHARES - 1)):
                yield unit_upper(size, b1), unit_upper(size, b2), np.array(sb, np.uint8)


def build_B(k: ShareMatrix) -> MonotoneDag:
    """B's strictly-upper part is K⊕ on and above its diagonal: B[i, j+1] = K⊕[i, j]."""
    kx = k.k_xor()
    n = k.n
    b = np.zeros((n, n), np.uint8)
    for i in range(k.size):
        for j in range(i, k.size):
            b[i, j + 1] = kx[i, j]
    return MonotoneDag(n, b)


# -- layered DAGs ---------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class LayeredDag:
    """Layers N1 J1 N2 ... J_{n-1} N_n. Vertex labels: ints 1..n, or
    ("K", i, j, l) for share vertices (1-indexed)."""
    n: int
    num_shares: int
    layers: Tuple[Tuple[str, Tuple], ...]
    edges: Tuple[Tuple[Tuple[int, object], Tuple[int, object]], ...]

    def key(self) -> tuple:
        return (self.n, self.num_shares, self.edges)

    def __eq__(self, other) -> bool:
        return isinstance(other, LayeredDag) and self.key() == other.key()

    def __hash__(self) -> int:
        return hash(self.key())

    def share_edge_present(self, i: int, j: int, l: int) -> bool:
        layer = 2 * (i - 1)
        return ((layer, i), (layer + 1, ("K", i, j, l))) in self._edge_set()

    def _edge_set(self) -> set:
        cached = self.__dict__.get("_es")
        if cached is None:
            cached = set(self.edges)
            object.__setattr__(self, "_es", cached)
        return cached

    def check_layered(self) -> None:
        for (la, _), (lb, _) in self.edges:
            if lb != la + 1:
                raise AssertionError("edge skips a layer")

    def path_parity(self) -> int:
        """Exact path count from 1 in N1 to n in N_n, reduced mod 2."""
        count: Dict[Tuple[int, object], int] = {(0, 1): 1}
        out: Dict[Tuple[int, object], List] = {}
        for u, v in self.edges:
            out.setdefault(u, []).append(v)
        for li in range(len(self.layers) - 1):
            for lab in self.layers[li][1]:
                c = count.get((li, lab), 0)
                if not c:
                    continue
                for v in out.get((li, lab), ()):
                    count[v] = count.get(v, 0) + c
        return count.get((len(self.layers) - 1, self.n), 0) % 2


def _label(v) -> str:
    if isinstance(v, tuple):
        return "K{},{},{}".format(*v[1:])
    return str(v)


def _parse_label(s: str):
    if s.startswith("K"):
        i, j, l = (int(t) for t in s[1:].split(","))
        return ("K", i, j, l)
    return int(s)


def build_layered(k: ShareMatrix) -> LayeredDag:
    n = k.n
    labels = tuple(range(1, n + 1))
    layers = []
    edges = []
    for i in range(1, n):
        shares = tuple(("K", i, j, l) for j in range(i, n) for l in range(1, k.num_shares + 1))
        layers.append((f"N{i}", labels))
        layers.append((f"J{i}", labels + shares))
        ni, ji = 2 * (i - 1), 2 * (i - 1) + 1
        for q in labels:
            edges.append(((ni, q), (ji, q)))
        for (_, _, j, l) in shares:
            if k.shares[i - 1, j - 1, l - 1]:
                edges.append(((ni, i), (ji, ("K", i, j, l))))
        for q in labels:
            edges.append(((ji, q), (ji + 1, q)))
        for (_, _, j, l) in shares:
            edges.append(((ji, ("K", i, j, l)), (ji + 1, j + 1)))
    layers.append((f"N{n}", labels))
    return LayeredDag(n, k.num_shares, tuple(layers), tuple(edges))


def dump_layered(c: LayeredDag) -> str:
    lines = [LAYERED_FORMAT, f"n {c.n} shares {c.num_shares}"]
    for name, verts in c.layers:
        lines.append(f"layer {name}: " + " ".join(_label(v) for v in verts))
    for (la, u), (lb, v) in c.edges:
        lines.append(f"edge {c.layers[la][0]}:{_label(u)} {c.layers[lb][0]}:{_label(v)}")
    return "\n".join(lines) + "\n"


def load_layered(text: str) -> LayeredDag:
    rows = [ln.strip() for ln in text.splitlines() if ln.strip()]
    if not rows or rows[0] != LAYERED_FORMAT:
        raise ValueError("missing layered format header")
    _, n, _, ns = rows[1].split()
    layers = []
    index = {}
    edges = []
    for ln in rows[2:]:
        if ln.startswith("layer"):
            name, rest = ln[len("layer "):].split(":", 1)
            index[name] = len(layers)
            layers.append((name, tuple(_parse_label(t) for t in rest.split())))
        elif ln.startswith("edge"):
            _, a, b = ln.split()
            (la, u), (lb, v) = a.split(":"), b.split(":")
            edges.append(((index[la], _parse_label(u)), (index[lb], _parse_label(v))))
        else:
            raise ValueError(f"unknown line {ln!r}")
    return LayeredDag(int(n), int(ns), tuple(layers), tuple(edges))


def dfrak(g: MonotoneDag, rng: np.random.Generator) -> LayeredDag:
    return build_layered(randomize_matrix(extract_L(g), rng))


# -- reduction to CNOT words ------------------------------------------------------

# special wires 0, 1, 2 carry the 3-cycle; wire 3 is the shared dummy
DUMMY = 3
CYCLE = np.zeros((3, 3), np.uint8)
CYCLE[1, 0] = CYCLE[2, 1] = CYCLE[0, 2] = 1   # e0 -> e1 -> e2 -> e0
# (I + v1 w1^T)(I + v2 w2^T) = CYCLE, with v.w = 0 in each factor
CYCLE_TRANSVECTIONS = (((1, 2), (1, 2)), ((0, 2), (0, 2)))


def efrak_wires(n: int, num_shares: int = SHARES) -> int:
    return 4 + n + n * (n - 1) // 2 * num_shares


def _label_wire(q: int) -> int:
    return 3 + q


def _share_wires(n: int, num_shares: int) -> Dict[Tuple[int, int, int], int]:
    out = {}
    w = 4 + n
    for i in range(1, n):
        for j in range(i, n):
            for l in range(1, num_shares + 1):
                out[(i, j, l)] = w
                w += 1
    return out


def forward_pass(c: LayeredDag) -> List[CnotGate]:
    """Parity propagation: after it, label wire q holds the path parity into q.
    Identity edges share a wire per label, so only share edges emit gates."""
    sw = _share_wires(c.n, c.num_shares)
    word = []
    for i in range(1, c.n):
        for j in range(i, c.n):
            for l in range(1, c.num_shares + 1):
                k = sw[(i, j, l)]
                tgt = k if c.share_edge_present(i, j, l) else DUMMY
                word.append(cnot(_label_wire(i), tgt))
                word.append(cnot(k, _label_wire(j + 1)))
    return word


def _transvection_block(fwd: List[CnotGate], n: int, v: Sequence[int], w: Sequence[int]) -> List[CnotGate]:
    """Word equal to I + p v w^T, p the path parity.

    W = F^-1 R F with R = I + v e_n^T reads the parity functional into v;
    X = I + e_1 w^T; then W X W X collapses to I + p v w^T.
    """
    readout = [cnot(_label_wire(n), a) for a in v]
    probe = [cnot(b, _label_wire(1)) for b in w]
    # a word g1..gk is the operator product with gk acting first: the time-ordered
    # pass F is the word reversed(fwd), and F^-1 is the word fwd
    wblock = fwd + readout + list(reversed(fwd))
    return wblock + probe + wblock + probe


def efrak(c: LayeredDag) -> List[CnotGate]:
    """Fixed-length CNOT word whose product is I (even parity) or CYCLE on wires 0..2."""
    c.check_layered()
    fwd = forward_pass(c)
    word = []
    for v, w in CYCLE_TRANSVECTIONS:
        word += _transvection_block(fwd, c.n, v, w)
    return word


def word_product(word: Sequence[CnotGate], m: int) -> np.ndarray:
    return word_matrix(word, m)


def expected_product(parity: int, m: int) -> np.ndarray:
    out = np.eye(m, dtype=np.uint8)
    if parity:
        out[:3, :3] = CYCLE
    return out


# -- half-randomization audit ----------------------------------------------------

@dataclass
class AuditReport:
    identical_within_class: bool
    disjoint_across: bool
    equal_cardinality: bool
    support_sizes: Dict[int, int]

    @property
    def passed(self) -> bool:
        return self.identical_within_class and self.disjoint_across and self.equal_cardinality


def half_randomization_audit(distribution: Callable, domain: Iterable, classify: Callable) -> AuditReport:
    """``distribution(x)`` returns a Counter over hashable outputs (exact weights).

    Checks: same-class inputs share one normalized distribution, the two
    classes have disjoint supports, and the supports have equal size.
    """
    by_class: Dict[int, Optional[dict]] = {}
    ok_same = True
    for x in domain:
        cls = classify(x)
        dist = distribution(x)
        total = sum(dist.values())
        norm = {k: v / total for k, v in dist.items()}
        ref = by_class.get(cls)
        if ref is None:
            by_class[cls] = norm
        elif ref != norm:
            ok_same = False
    supports = {c: set(d) for c, d in by_class.items()}
    classes = sorted(supports)
    disjoint = all(not (supports[a] & supports[b]) for a in classes for b in classes if a < b)
    sizes = {c: len(s) for c, s in supports.items()}
    equal = len(set(sizes.values())) == 1
    return AuditReport(ok_same, disjoint, equal, sizes)


def dfrak_distribution(g: MonotoneDag) -> Counter:
    """Exact output distribution of dfrak(g) by enumerating its randomness."""
    L = extract_L(g)
    out: Counter = Counter()
    for r1, r2, sb in randomness_space(g.n - 1):
        out[build_layered(split_shares(randomize_k(L, r1, r2), sb))] += 1
    return out
