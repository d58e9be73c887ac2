"""Batched, bit-packed diagonal words and the blinding of CNOT words.

A batch holds ``B`` elements of the diagonal group on ``m <= 63`` wires:
``s`` is ``(B, m)`` int64 mod 4 and ``u`` is ``(B, m)`` uint64 where bit ``k``
of ``u[b, j]`` (only ``k > j`` is stored) is the CZ between wires j and k.
Storing the upper triangle only lets random elements be drawn without a
symmetrisation pass.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from typing import Iterator, List, Optional, Sequence

import numpy as np

from .diag import CnotGate, DiagWord, sample_uniform_H3_even

ONE = np.uint64(1)
MAX_WIRES = 63


@lru_cache(maxsize=None)
def _consts(m: int):
    if m > MAX_WIRES:
        raise ValueError(f"packed words support at most {MAX_WIRES} wires")
    ar = np.arange(m, dtype=np.uint64)
    full = (1 << m) - 1
    upper = np.array([full & ~((1 << (j + 1)) - 1) for j in range(m)], dtype=np.uint64)
    return ar, upper


@dataclass
class DiagBatch:
    s: np.ndarray
    u: np.ndarray

    @property
    def size(self) -> int:
        return self.s.shape[0]

    @property
    def m(self) -> int:
        return self.s.shape[1]

    def copy(self) -> "DiagBatch":
        return DiagBatch(self.s.copy(), self.u.copy())

    @classmethod
    def identity(cls, size: int, m: int) -> "DiagBatch":
        return cls(np.zeros((size, m), np.int64), np.zeros((size, m), np.uint64))

    @classmethod
    def random(cls, size: int, m: int, rng: np.random.Generator) -> "DiagBatch":
        _, upper = _consts(m)
        s = (np.frombuffer(rng.bytes(size * m), np.uint8).reshape(size, m) & 3).astype(np.int64)
        u = np.frombuffer(rng.bytes(size * m * 8), np.uint64).reshape(size, m) & upper
        return cls(s, u)

    @classmethod
    def from_words(cls, words: Sequence[DiagWord], m: int) -> "DiagBatch":
        out = cls.identity(len(words), m)
        for b, w in enumerate(words):
            k = w.m
            out.s[b, :k] = w.s % 4
            for j in range(k):
                row = 0
                for c in range(j + 1, k):
                    if w.cz[j, c]:
                        row |= 1 << c
                out.u[b, j] = row
        return out

    def word(self, b: int) -> DiagWord:
        m = self.m
        cz = np.zeros((m, m), np.uint8)
        for j in range(m):
            row = int(self.u[b, j])
            for k in range(j + 1, m):
                if (row >> k) & 1:
                    cz[j, k] = cz[k, j] = 1
        return DiagWord(self.s[b] % 4, cz)

    def inverse(self) -> "DiagBatch":
        return DiagBatch((-self.s) % 4, self.u.copy())

    def __mul__(self, other: "DiagBatch") -> "DiagBatch":
        return DiagBatch((self.s + other.s) % 4, self.u ^ other.u)

    def imul(self, other: "DiagBatch") -> None:
        self.s += other.s
        self.s &= 3
        self.u ^= other.u

    def supported_on(self, k: int) -> np.ndarray:
        """Mask of elements acting only on wires ``0..k-1``."""
        full_k = np.uint64((1 << k) - 1)
        return (~self.s[:, k:].any(axis=1) & ~self.u[:, k:].any(axis=1)
                & ~(self.u[:, :k] & ~full_k).any(axis=1))

    def key3(self) -> np.ndarray:
        """Index in 0..511 of the restriction to wires 0..2."""
        s = self.s[:, :3]
        u = self.u
        c01 = (u[:, 0] >> ONE) & ONE
        c02 = (u[:, 0] >> np.uint64(2)) & ONE
        c12 = (u[:, 1] >> np.uint64(2)) & ONE
        cz = (c01 + 2 * c02 + 4 * c12).astype(np.int64)
        return s[:, 0] + 4 * s[:, 1] + 16 * s[:, 2] + 64 * cz


def _get_row(u: np.ndarray, c: np.ndarray) -> np.ndarray:
    """Full symmetric row ``c_b`` of every element."""
    ar, _ = _consts(u.shape[1])
    idx = np.arange(u.shape[0])
    lower = (((u >> c[:, None]) & ONE) << ar[None, :]).sum(axis=1, dtype=np.uint64)
    return u[idx, c] | lower


def _set_row(u: np.ndarray, c: np.ndarray, row: np.ndarray) -> None:
    ar, upper = _consts(u.shape[1])
    idx = np.arange(u.shape[0])
    u[idx, c] = row & upper[c]
    low = ar[None, :] < c[:, None]
    cb = ONE << c[:, None]
    bits = (row[:, None] >> ar[None, :]) & ONE
    np.copyto(u, (u & ~cb) | (bits << c[:, None]), where=low)


def _push_numpy(d: DiagBatch, c: np.ndarray, t: np.ndarray) -> None:
    idx = np.arange(d.size)
    c = np.asarray(c, dtype=np.uint64)
    t = np.asarray(t, dtype=np.uint64)
    ci = c.astype(np.int64)
    ti = t.astype(np.int64)
    rc = _get_row(d.u, c)
    rt = _get_row(d.u, t)
    old_tc = (rc >> t) & ONE
    st = d.s[idx, ti]
    row = rc ^ rt
    row = (row & ~(ONE << t)) | ((old_tc ^ (st.astype(np.uint64) & ONE)) << t)
    row &= ~(ONE << c)
    _set_row(d.u, c, row)
    d.s[idx, ci] = (d.s[idx, ci] + st + 2 * old_tc.astype(np.int64)) & 3


def _push_kernel(s, u, c, t):
    one = np.uint64(1)
    for b in range(s.shape[0]):
        cb = c[b]
        tb = t[b]
        sc = np.uint64(cb)
        sh_t = np.uint64(tb)
        rc = u[b, cb]
        rt = u[b, tb]
        for k in range(cb):
            rc |= ((u[b, k] >> sc) & one) << np.uint64(k)
        for k in range(tb):
            rt |= ((u[b, k] >> sh_t) & one) << np.uint64(k)
        old_tc = (rc >> sh_t) & one
        st = s[b, tb]
        row = rc ^ rt
        row = (row & ~(one << sh_t)) | ((old_tc ^ np.uint64(st & 1)) << sh_t)
        row &= ~(one << sc)
        u[b, cb] = row & ~((one << np.uint64(cb + 1)) - one)
        for k in range(cb):
            u[b, k] = (u[b, k] & ~(one << sc)) | (((row >> np.uint64(k)) & one) << sc)
        s[b, cb] = (s[b, cb] + st + 2 * np.int64(old_tc)) & 3


try:
    import numba
    _push_jit = numba.njit(cache=True)(_push_kernel)
except ImportError:  # pragma: no cover
    _push_jit = None


def push_batch(d: DiagBatch, c: np.ndarray, t: np.ndarray, backend: str = "auto") -> None:
    """In place: d <- g d g for CNOT g = (c_b -> t_b), so that d g = g d'."""
    if backend == "numpy" or (_push_jit is None and backend == "auto"):
        _push_numpy(d, c, t)
        return
    _push_jit(d.s, d.u, np.asarray(c, dtype=np.int64), np.asarray(t, dtype=np.int64))


def linear_mul_cnot(rows: np.ndarray, c: np.ndarray, t: np.ndarray) -> None:
    """In place right-multiplication of packed F2 matrices by I + E[t, c]."""
    c = np.asarray(c, dtype=np.uint64)[:, None]
    t = np.asarray(t, dtype=np.uint64)[:, None]
    rows ^= ((rows >> t) & ONE) << c


def identity_rows(size: int, m: int) -> np.ndarray:
    ar, _ = _consts(m)
    return np.broadcast_to(ONE << ar, (size, m)).copy()


def rows_to_matrix(rows: np.ndarray, m: int) -> np.ndarray:
    """Unpack ``(..., m)`` row bitmasks into ``(..., m, m)`` F2 matrices."""
    ar, _ = _consts(m)
    return ((rows[..., :, None] >> ar) & ONE).astype(np.uint8)


# -- blinded words ----------------------------------------------------------

@dataclass
class StepBatch:
    """Step i of every session: operator ``CNOT(ctrl -> tgt) . diag``."""
    ctrl: np.ndarray
    tgt: np.ndarray
    diag: DiagBatch


@dataclass
class BlindedBatch:
    """First-round inputs for ``size`` sessions, streamed step by step.

    ``words`` is ``(size, n, 2)``: the CNOT word of each session. The step
    stream is regenerated from ``seed`` on every call, so it can be replayed.
    ``f_prime`` is verifier-side bookkeeping and never reaches a device.
    """
    m: int
    words: np.ndarray
    f: List[DiagWord]
    f_prime: List[DiagWord]
    seed: int

    @property
    def size(self) -> int:
        return self.words.shape[0]

    @property
    def length(self) -> int:
        return 2 * self.words.shape[1]

    def cnot_sequence(self) -> np.ndarray:
        """(size, 2n, 2): g_1..g_n followed by g_n..g_1."""
        return np.concatenate([self.words, self.words[:, ::-1]], axis=1)

    def steps(self) -> Iterator[StepBatch]:
        rng = np.random.default_rng(self.seed)
        m, size, n = self.m, self.size, self.words.shape[1]
        seq = self.cnot_sequence()
        f_emb = DiagBatch.from_words(self.f, m)
        pre = DiagBatch.from_words(self.f_prime, m)
        for i in range(2 * n):
            c = seq[:, i, 0]
            t = seq[:, i, 1]
            if i == n:
                pre = pre * f_emb
            d = pre
            push_batch(d, c, t)
            if i < 2 * n - 1:
                h = DiagBatch.random(size, m, rng)
                d.imul(h)
                pre = h.inverse()
            yield StepBatch(c, t, d)

    def session_steps(self, b: int) -> List[tuple]:
        """Unpacked (CnotGate, DiagWord) steps of one session."""
        out = []
        for st in self.steps():
            out.append((CnotGate(int(st.ctrl[b]), int(st.tgt[b])), st.diag.word(b)))
        return out


def word_array(words: Sequence[Sequence[CnotGate]]) -> np.ndarray:
    lens = {len(w) for w in words}
    if len(lens) != 1:
        raise ValueError("all words in a batch must have the same length")
    return np.array([[(g.control, g.target) for g in w] for w in words], dtype=np.int64).reshape(
        len(words), lens.pop(), 2)


def gamma(f, words: Sequence[Sequence[CnotGate]], m: int, rng: np.random.Generator,
          f_prime: Optional[Sequence[DiagWord]] = None) -> BlindedBatch:
    """Blind each word ``g_1..g_n`` as ``f'g_1h_1, h_1^-1 g_2 h_2, ..., h_{2n-1}^-1 g_1``.

    The middle element carries ``f`` and the operator product of the output
    is ``f' . pi f pi^-1`` with ``pi = g_1 ... g_n``. ``f`` is one 3-wire
    element or one per word.
    """
    words = list(words)
    fs = list(f) if isinstance(f, (list, tuple)) else [f] * len(words)
    if len(fs) != len(words):
        raise ValueError("need one f per word")
    if f_prime is None:
        f_prime = [sample_uniform_H3_even(rng) for _ in words]
    seed = int(rng.integers(0, 2**63))
    return BlindedBatch(m, word_array(words), fs, list(f_prime), seed)
