"""Rewindable devices and the reductions that use them.

The line problem: round 1 receives a blinded CNOT word, round 2 one of the
five pentagram lines (by index), and the device answers the four signs of the
line's Paulis on wires 0..2. Devices are batched: one object runs ``B``
independent sessions side by side.
"""

from __future__ import annotations

import json
import math
from collections import Counter
from dataclasses import dataclass, field
from functools import lru_cache
from itertools import product
from typing import Dict, List, Optional, Sequence

import numpy as np

from .diag import (CnotGate, DiagWord, enumerate_H3_even, pentagram, word_matrix)
from .kilian import (BlindedBatch, DiagBatch, gamma, identity_rows, linear_mul_cnot,
                     push_batch, rows_to_matrix)
from .mbqc import compile_word_to_mbqc, pauli_byproduct, simulate_pattern
from .parity import CYCLE, dfrak, efrak, efrak_wires
from .pauli import PauliString, StabilizerTableau, gf2_inv

IDENTITY = "identity"
THREE_CYCLE = "three_cycle"
NUM_LINES = 5


class ProtocolError(RuntimeError):
    """Round calls out of order (e.g. a second round without rewinding)."""


# -- pentagram bookkeeping ---------------------------------------------------

def _h3_from_key(key: int) -> DiagWord:
    s = [key % 4, (key // 4) % 4, (key // 16) % 4]
    cz = key // 64
    pairs = [p for bit, p in zip((cz & 1, cz >> 1 & 1, cz >> 2 & 1), [(0, 1), (0, 2), (1, 2)]) if bit]
    return DiagWord.from_gates(3, s_gates=[q for q in range(3) for _ in range(s[q])], cz_gates=pairs)


def h3_key(w: DiagWord) -> int:
    s = [int(v) % 4 for v in w.s[:3]]
    cz = int(w.cz[0, 1]) + 2 * int(w.cz[0, 2]) + 4 * int(w.cz[1, 2])
    return s[0] + 4 * s[1] + 16 * s[2] + 64 * cz


def _embed(p: PauliString, m: int) -> PauliString:
    if p.n == m:
        return p
    x = np.zeros(m, np.uint8)
    z = np.zeros(m, np.uint8)
    x[: p.n] = p.x
    z[: p.n] = p.z
    return PauliString(m, x, z, p.phase)


def line_outcomes(tab: StabilizerTableau, line_index: int) -> List[tuple]:
    """Exact joint distribution of one line measured in order: [(signs, prob)]."""
    pc = pentagram()
    paulis = [_embed(p, tab.n) for p in pc.lines[line_index].paulis]
    out = []

    def rec(t, i, signs, prob):
        if i == len(paulis):
            out.append((tuple(signs), prob))
            return
        d = t.peek_pauli(paulis[i])
        if d is not None:
            rec(t, i + 1, signs + [d], prob)
            return
        for s in (1, -1):
            t2 = t.copy()
            t2.measure_pauli(paulis[i], forced=s)
            rec(t2, i + 1, signs + [s], prob / 2)

    rec(tab.copy(), 0, [], 1.0)
    return out


@lru_cache(maxsize=None)
def line_tables():
    """Per 3-wire diagonal state (key 0..511) and line: padded outcome tables."""
    vals = np.ones((512, NUM_LINES, 8, 4), np.int8)
    cum = np.ones((512, NUM_LINES, 8))
    for key in range(512):
        w = _h3_from_key(key)
        tab = StabilizerTableau.plus_state(3).apply_diagonal(w.s, w.cz)
        for li in range(NUM_LINES):
            outs = line_outcomes(tab, li)
            acc = 0.0
            for j, (signs, pr) in enumerate(outs):
                vals[key, li, j] = signs
                acc += pr
                cum[key, li, j] = acc
            cum[key, li, len(outs) - 1:] = 1.0
    return vals, cum


def _incidence():
    pc = pentagram()
    return [pc.incidence[p.label(with_sign=False)] for p in pc.star]


def first_inconsistent(answers: np.ndarray) -> np.ndarray:
    """``answers`` (..., 5, 4) signs; index in star order of the first Pauli whose
    two readings disagree, or -1."""
    inc = _incidence()
    a = np.asarray(answers)
    bad = np.stack([a[..., l1, p1] != a[..., l2, p2] for (l1, p1), (l2, p2) in inc], axis=-1)
    return np.where(bad.any(axis=-1), bad.argmax(axis=-1), -1)


@lru_cache(maxsize=None)
def _inconsistency_by_key(key: int) -> tuple:
    """Exact law of the first inconsistent star index for state w|+++> (w = key).

    Last entry is the probability that no inconsistency appears.
    """
    vals, cum = line_tables()
    probs = np.diff(np.concatenate([np.zeros((NUM_LINES, 1)), cum[key]], axis=1), axis=1)
    ks = [int(np.count_nonzero(probs[li] > 0)) for li in range(NUM_LINES)]
    grid = np.indices(ks).reshape(NUM_LINES, -1)
    ans = np.stack([vals[key, li, grid[li]] for li in range(NUM_LINES)], axis=1)
    pr = np.prod([probs[li, grid[li]] for li in range(NUM_LINES)], axis=0)
    first = first_inconsistent(ans)
    out = np.zeros(11)
    np.add.at(out, first, pr)  # index -1 lands in the last slot
    return tuple(out)


def inconsistency_distribution(w: DiagWord) -> Dict[str, float]:
    """{star label or 'none': prob} for the honest five-line run on w|+++>."""
    pc = pentagram()
    dist = _inconsistency_by_key(h3_key(w))
    out = {p.label(with_sign=False): dist[i] for i, p in enumerate(pc.star) if dist[i]}
    if dist[10]:
        out["none"] = dist[10]
    return out


@lru_cache(maxsize=None)
def _exact_dr() -> tuple:
    pc = pentagram()
    acc: Counter = Counter()
    elems = enumerate_H3_even()
    for w in elems:
        dist = _inconsistency_by_key(h3_key(w))
        if dist[10]:
            raise AssertionError(f"honest run without inconsistency on {w}")
        winv = w.inverse()
        for i, p in enumerate(pc.star):
            if dist[i]:
                acc[winv.conjugate_pauli(p).label(with_sign=False)] += dist[i] / len(elems)
    return tuple(sorted(acc.items()))


def exact_DR() -> Dict[str, float]:
    """The fixed output law of an errorless run with f = identity (exact)."""
    return dict(_exact_dr())


def output_distribution(u: DiagWord) -> Dict[str, float]:
    """Errorless output law when the blinded product part is ``u`` (= u . D_R)."""
    return {u.conjugate_pauli(PauliString.from_label(k)).label(with_sign=False): v
            for k, v in exact_DR().items()}


def cycle_conjugate(f: DiagWord) -> DiagWord:
    """pi f pi^-1 for pi the three-cycle permutation matrix."""
    return f.compose_linear(gf2_inv(CYCLE))


@lru_cache(maxsize=None)
def _blocking(label: str) -> DiagWord:
    dr = exact_DR()
    if label not in dr:
        raise ValueError(f"{label} is not in the support of the honest law")
    p = PauliString.from_label(label)
    for f in enumerate_H3_even():
        fp = f.conjugate_pauli(p).label(with_sign=False)
        if fp not in output_distribution(cycle_conjugate(f)):
            same = output_distribution(f).get(fp, 0.0)
            if abs(same - dr[label]) > 1e-12:
                raise AssertionError("identity case lost weight under f")
            return f
    raise AssertionError(f"no blocking element for {label}")


def find_blocking_f(p: PauliString) -> DiagWord:
    """First f (fixed order) with f.P outside the three-cycle output law."""
    return _blocking(p.label(with_sign=False))


# -- devices -----------------------------------------------------------------

class RewindableOracle:
    """Round-structured device with snapshot/rewind to the round boundary."""

    def __init__(self):
        self._stage = "idle"
        self.size = 0

    def reset(self) -> None:
        self._stage = "idle"
        self.size = 0

    def first_round(self, batch):
        if self._stage != "idle":
            raise ProtocolError("first round needs a fresh session; call reset()")
        self.size = batch.size
        out = self._first(batch)
        self._stage = "between"
        return out

    def second_round(self, line: int) -> np.ndarray:
        if self._stage != "between":
            raise ProtocolError("second round needs a completed first round and a rewind")
        if not 0 <= line < NUM_LINES:
            raise ValueError(f"line index {line} out of range")
        out = self._second(line)
        self._stage = "after"
        return out

    def rewind(self) -> None:
        if self._stage == "idle":
            raise ProtocolError("nothing to rewind")
        self._stage = "between"

    def _first(self, batch):
        raise NotImplementedError

    def _second(self, line: int) -> np.ndarray:
        raise NotImplementedError


class HonestLogical(RewindableOracle):
    """Applies the round-1 word to |+^m> (tracked as a linear-times-diagonal
    normal form) and measures lines on wires 0..2.

    States that factor as a 3-wire diagonal state times |+>'s are answered
    from exact precomputed line tables; everything else goes through a full
    m-qubit tableau.
    """

    def __init__(self, rng: np.random.Generator, fast: bool = True):
        super().__init__()
        self.rng = rng
        self.fast = fast

    def _first(self, batch):
        m, size = batch.m, batch.size
        diag = DiagBatch.identity(size, m)
        rows = identity_rows(size, m)
        for st in batch.steps():
            push_batch(diag, st.ctrl, st.tgt)
            diag.imul(st.diag)
            linear_mul_cnot(rows, st.ctrl, st.tgt)
        simple = (rows == identity_rows(1, m)).all(axis=1) & diag.supported_on(3)
        if not self.fast:
            simple[:] = False
        self._keys = np.where(simple, diag.key3(), -1)
        self._tabs = {}
        for b in np.flatnonzero(~simple):
            w = diag.word(int(b))
            tab = StabilizerTableau.plus_state(m).apply_diagonal(w.s, w.cz)
            tab.apply_linear(rows_to_matrix(rows[b], m))
            self._tabs[int(b)] = tab
        return None

    def _second(self, line: int) -> np.ndarray:
        out = np.ones((self.size, 4), np.int8)
        simple = self._keys >= 0
        if simple.any():
            vals, cum = line_tables()
            keys = self._keys[simple]
            r = self.rng.random(len(keys))
            idx = (r[:, None] >= cum[keys, line]).sum(axis=1)
            out[simple] = vals[keys, line, idx]
        for b, tab in self._tabs.items():
            t = tab.copy()
            for j, p in enumerate(pentagram().lines[line].paulis):
                out[b, j], _ = t.measure_pauli(_embed(p, t.n), rng=self.rng)
        return out


class HonestMbqc(RewindableOracle):
    """Runs each session's blinded word as a measurement pattern on a grid graph
    state (round 1) and answers lines on the residual output wires, undoing
    the tracked Pauli byproduct. Small sizes only."""

    def __init__(self, rng: np.random.Generator, max_columns: Optional[int] = None):
        super().__init__()
        self.rng = rng
        self.max_columns = max_columns

    def _first(self, batch):
        per = [[] for _ in range(batch.size)]
        for st in batch.steps():
            for b in range(batch.size):
                per[b].append((CnotGate(int(st.ctrl[b]), int(st.tgt[b])), st.diag.word(b)))
        self._state = []
        outs = []
        for steps in per:
            pat = compile_word_to_mbqc(steps, batch.m, self.max_columns)
            o, residual = simulate_pattern(pat, self.rng)
            self._state.append((residual, pauli_byproduct(pat, o)))
            outs.append(o)
        return outs

    def _second(self, line: int) -> np.ndarray:
        out = np.ones((self.size, 4), np.int8)
        for b, (residual, frame) in enumerate(self._state):
            t = residual.copy()
            for j, p in enumerate(pentagram().lines[line].paulis):
                q = _embed(p, t.n)
                sign, _ = t.measure_pauli(q, rng=self.rng)
                out[b, j] = sign if q.commutes(frame) else -sign
        return out


_MIX = np.uint64(0x9E3779B97F4A7C15)


def _splitmix(x: np.ndarray) -> np.ndarray:
    x = x + _MIX
    x = (x ^ (x >> np.uint64(30))) * np.uint64(0xBF58476D1CE4E5B9)
    x = (x ^ (x >> np.uint64(27))) * np.uint64(0x94D049BB133111EB)
    return x ^ (x >> np.uint64(31))


class _Tap:
    """Pass-through view of a first-round input that lets a wrapper watch it."""

    def __init__(self, batch, owner: "FaultyOracle"):
        self.m, self.size, self.length = batch.m, batch.size, batch.length
        self._batch = batch
        self._owner = owner

    def steps(self):
        o = self._owner
        half = self.length // 2
        mult = _splitmix(np.arange(1, self.m + 1, dtype=np.uint64))
        with np.errstate(over="ignore"):
            for i, st in enumerate(self._batch.steps()):
                if i < half:
                    linear_mul_cnot(o._half, st.ctrl, st.tgt)
                fold = np.bitwise_xor.reduce(st.diag.u * mult, axis=1)
                fold ^= (st.diag.s.astype(np.uint64) * mult).sum(axis=1)
                fold ^= st.ctrl.astype(np.uint64) << np.uint64(32) | st.tgt.astype(np.uint64)
                o._fp = _splitmix(o._fp ^ fold)
                yield st


FAIL_POLICIES = ("uniform", "adversarial-fixed-set", "concentrate-on-target")
FAIL_ANSWERS = ("random", "noncontextual", "flip")


class FaultyOracle(RewindableOracle):
    """Wraps a device and corrupts a fraction of its (input, line) queries.

    uniform: each query fails independently with probability eps.
    adversarial-fixed-set: a fixed eps-fraction of inputs (by fingerprint).
    concentrate-on-target: rate min(1, 2 eps) on inputs whose first-half word
    multiplies to the target class (three-cycle if ``target_parity`` is 1),
    and zero elsewhere.
    """

    def __init__(self, inner: RewindableOracle, eps: float, policy: str = "uniform",
                 answer: str = "random", rng: Optional[np.random.Generator] = None,
                 target_parity: int = 1, key: int = 0):
        super().__init__()
        if policy not in FAIL_POLICIES:
            raise ValueError(f"unknown policy {policy!r}")
        if answer not in FAIL_ANSWERS:
            raise ValueError(f"unknown failure answer {answer!r}")
        if not 0 <= eps <= 1:
            raise ValueError("eps must be in [0, 1]")
        self.inner, self.eps, self.policy, self.answer = inner, eps, policy, answer
        self.rng = rng if rng is not None else np.random.default_rng(0)
        self.target_parity = target_parity
        self.key = np.uint64(key)
        self.failures: List[np.ndarray] = []

    def reset(self) -> None:
        super().reset()
        self.inner.reset()
        self.failures = []

    def _first(self, batch):
        self._fp = np.full(batch.size, self.key, np.uint64)
        self._half = identity_rows(batch.size, batch.m)
        out = self.inner.first_round(_Tap(batch, self))
        block = rows_to_matrix(self._half, batch.m)[:, :3, :3]
        self._target = (block == CYCLE).all(axis=(1, 2)) == bool(self.target_parity)
        return out

    def _fail_mask(self, line: int) -> np.ndarray:
        if self.policy == "uniform":
            return self.rng.random(self.size) < self.eps
        if self.policy == "adversarial-fixed-set":
            with np.errstate(over="ignore"):
                h = _splitmix(self._fp ^ (np.uint64(line + 1) * _MIX))
            return h.astype(np.float64) / 2.0**64 < self.eps
        return self._target & (self.rng.random(self.size) < min(1.0, 2 * self.eps))

    def _second(self, line: int) -> np.ndarray:
        honest = self.inner.second_round(line)
        self.inner.rewind()
        fail = self._fail_mask(line)
        self.failures.append(fail)
        out = honest.copy()
        nf = int(fail.sum())
        if nf:
            if self.answer == "random":
                out[fail] = 1 - 2 * self.rng.integers(0, 2, size=(nf, 4)).astype(np.int8)
            elif self.answer == "noncontextual":
                out[fail] = 1
            else:
                out[fail] = -honest[fail]
        return out


class RecordingOracle(RewindableOracle):
    """Keeps a JSON-lines audit trail of queries, responses and rewinds."""

    def __init__(self, inner: RewindableOracle):
        super().__init__()
        self.inner = inner
        self.records: List[dict] = []

    def reset(self) -> None:
        super().reset()
        self.inner.reset()
        self.records.append({"event": "reset"})

    def _first(self, batch):
        self.records.append({"event": "first_round", "sessions": batch.size, "m": batch.m,
                             "length": batch.length})
        return self.inner.first_round(batch)

    def _second(self, line: int) -> np.ndarray:
        out = self.inner.second_round(line)
        self.records.append({"event": "second_round", "line": line,
                             "response": out.astype(int).tolist()})
        return out

    def rewind(self) -> None:
        super().rewind()
        self.inner.rewind()
        self.records.append({"event": "rewind"})

    def dump_jsonl(self) -> str:
        return "".join(json.dumps(r, sort_keys=True) + "\n" for r in self.records)


# -- Algorithm R_f ------------------------------------------------------------

@dataclass
class Contamination:
    """Output-level worst case: each run's output is replaced by ``target[b]``
    with probability ``delta``."""
    delta: float
    target: Sequence[Optional[str]]


def run_Rf_batch(fs, words: Sequence[Sequence[CnotGate]], m: int, oracle: RewindableOracle,
                 rng: np.random.Generator, contamination: Optional[Contamination] = None,
                 answers_out: Optional[list] = None) -> List[Optional[PauliString]]:
    """One blinded run per word; None marks a run with no inconsistent Pauli."""
    batch = gamma(fs, words, m, rng)
    oracle.reset()
    oracle.first_round(batch)
    answers = []
    for li in range(NUM_LINES):
        answers.append(np.asarray(oracle.second_round(li)))
        oracle.rewind()
    ans = np.stack(answers, axis=1)
    if answers_out is not None:
        answers_out.append(ans)
    first = first_inconsistent(ans)
    star = pentagram().star
    out: List[Optional[PauliString]] = []
    for b, idx in enumerate(first):
        if idx < 0:
            out.append(None)
            continue
        out.append(batch.f_prime[b].inverse().conjugate_pauli(star[idx]).unsigned())
    if contamination is not None and contamination.delta > 0:
        hit = rng.random(len(out)) < contamination.delta
        for b in np.flatnonzero(hit):
            tgt = contamination.target[b]
            out[b] = None if tgt is None else PauliString.from_label(tgt)
    return out


def run_Rf(f: DiagWord, word: Sequence[CnotGate], m: int, oracle: RewindableOracle,
           rng: np.random.Generator) -> Optional[PauliString]:
    return run_Rf_batch([f], [word], m, oracle, rng)[0]


@dataclass
class PauliTally:
    counts: Counter = field(default_factory=Counter)
    failures: int = 0

    def add(self, p: Optional[PauliString]) -> None:
        if p is None:
            self.failures += 1
        else:
            self.counts[p.label(with_sign=False)] += 1

    @property
    def total(self) -> int:
        return sum(self.counts.values()) + self.failures

    def frequency(self, label: str) -> float:
        return self.counts.get(label, 0) / self.total if self.total else 0.0

    def argmax(self, order: Sequence[str]) -> Optional[str]:
        if not self.counts:
            return None
        rank = {k: i for i, k in enumerate(order)}
        return min(self.counts, key=lambda k: (-self.counts[k], rank.get(k, len(rank)), k))


def _s_order() -> List[str]:
    return [p.label(with_sign=False) for p in pentagram().s_set]


def _repeat_runs(fs, words, m, oracle, samples, rng, contamination=None) -> List[PauliTally]:
    k = len(words)
    all_words = [w for w in words for _ in range(samples)]
    all_f = [f for f in fs for _ in range(samples)]
    cont = None
    if contamination is not None:
        cont = Contamination(contamination.delta,
                             [t for t in contamination.target for _ in range(samples)])
    outs = run_Rf_batch(all_f, all_words, m, oracle, rng, cont)
    tallies = [PauliTally() for _ in range(k)]
    for i, p in enumerate(outs):
        tallies[i // samples].add(p)
    return tallies


def phase1_estimate(words, m: int, oracle: RewindableOracle, samples: int,
                    rng: np.random.Generator, contamination: Optional[Contamination] = None):
    """Argmax-frequency output of f = identity runs, per word (None if all failed)."""
    single = len(words) and isinstance(words[0], CnotGate)
    ws = [words] if single else list(words)
    ident = DiagWord.identity(3)
    tallies = _repeat_runs([ident] * len(ws), ws, m, oracle, samples, rng, contamination)
    order = _s_order()
    res = []
    for t in tallies:
        lab = t.argmax(order)
        res.append(None if lab is None else PauliString.from_label(lab))
    return res[0] if single else res


def phase2_threshold(p: PauliString, delta_bound: float, mode: str = "exact") -> float:
    """Midpoint between the error mass bound and the identity-case frequency floor.

    ``exact`` uses (1 - delta) D_R(P); ``paper`` uses the 1/21 floor.
    """
    if mode == "paper":
        floor = 1 / 21
    elif mode == "exact":
        floor = (1 - delta_bound) * exact_DR().get(p.label(with_sign=False), 0.0)
    else:
        raise ValueError(f"unknown threshold mode {mode!r}")
    return (delta_bound + floor) / 2


def phase2_distinguish(words, m: int, oracle: RewindableOracle, fs, ps, samples: int,
                       rng: np.random.Generator, delta_bound: float = 1 / 25,
                       mode: str = "exact", contamination: Optional[Contamination] = None):
    """identity iff f.P shows up above the threshold; None if every run failed."""
    single = len(words) and isinstance(words[0], CnotGate)
    ws = [words] if single else list(words)
    fs = [fs] if single else list(fs)
    ps = [ps] if single else list(ps)
    tallies = _repeat_runs(fs, ws, m, oracle, samples, rng, contamination)
    res = []
    for t, f, p in zip(tallies, fs, ps):
        if not t.counts:
            res.append(None)
            continue
        fp = f.conjugate_pauli(p).label(with_sign=False)
        res.append(IDENTITY if t.frequency(fp) > phase2_threshold(p, delta_bound, mode)
                   else THREE_CYCLE)
    return res[0] if single else res


@dataclass
class SolverConfig:
    phase1_samples: int = 24
    phase2_samples: int = 48
    delta_bound: float = 1 / 25
    threshold_mode: str = "exact"
    rep_constant: float = 3.0

    def repetitions(self, n: int) -> int:
        return max(1, math.ceil(self.rep_constant * math.log2(max(n, 2))))


@dataclass
class SolveReport:
    bit: int
    votes: List[Optional[int]]


def solve_dagparity_report(dag, oracle: RewindableOracle, rng: np.random.Generator,
                           k: Optional[int] = None, config: Optional[SolverConfig] = None) -> SolveReport:
    cfg = config or SolverConfig()
    k = cfg.repetitions(dag.n) if k is None else k
    words = [efrak(dfrak(dag, rng)) for _ in range(k)]
    m = efrak_wires(dag.n)
    ps = phase1_estimate(words, m, oracle, cfg.phase1_samples, rng)
    live = [i for i, p in enumerate(ps) if p is not None and p.label(with_sign=False) in exact_DR()]
    votes: List[Optional[int]] = [None] * k
    if live:
        fs = [find_blocking_f(ps[i]) for i in live]
        dec = phase2_distinguish([words[i] for i in live], m, oracle, fs, [ps[i] for i in live],
                                 cfg.phase2_samples, rng, cfg.delta_bound, cfg.threshold_mode)
        for i, d in zip(live, dec):
            if d is not None:
                votes[i] = 0 if d == IDENTITY else 1
    cast = [v for v in votes if v is not None]
    bit = int(sum(cast) * 2 > len(cast))
    return SolveReport(bit, votes)


def solve_dagparity(dag, oracle: RewindableOracle, rng: np.random.Generator,
                    k: Optional[int] = None, config: Optional[SolverConfig] = None) -> int:
    """Parity of source-to-sink paths by majority over k blinded repetitions."""
    return solve_dagparity_report(dag, oracle, rng, k, config).bit


# -- two-qubit estimator ------------------------------------------------------

TWO_QUBIT = tuple(a + b for a, b in product("IXYZ", repeat=2) if a + b != "II")
STABILIZERS = {"X_basis": ("XI", "IX", "XX"), "Z_basis": ("ZI", "IZ", "ZZ")}


@dataclass
class ExtractionOracle:
    """Contract model of the extraction subroutine for C_1...C_n|++>.

    Honest: a uniform nonstabilizer. With probability ``6 eps`` an adversarial
    Pauli: ``blinded`` spreads it over the three stabilizers (the random
    self-reduction hides which one), ``fixed`` puts it all on ``target``.
    """
    basis: str
    eps: float
    adversary: str = "blinded"
    target: Optional[str] = None

    def sample(self, count: int, rng: np.random.Generator) -> np.ndarray:
        stabs = [TWO_QUBIT.index(s) for s in STABILIZERS[self.basis]]
        nonstab = np.array([i for i in range(15) if i not in stabs])
        out = nonstab[rng.integers(0, len(nonstab), size=count)]
        bad = rng.random(count) < 6 * self.eps
        nb = int(bad.sum())
        if nb:
            if self.adversary == "blinded":
                out[bad] = np.array(stabs)[rng.integers(0, 3, size=nb)]
            else:
                out[bad] = TWO_QUBIT.index(self.target or STABILIZERS[self.basis][0])
        return out


def nc1_sigma(eps: float) -> float:
    return (1 - 30 * eps) / 12


def nc1_samples(eps: float, c: float = 8.0) -> int:
    sig = nc1_sigma(eps)
    if sig <= 0:
        raise ValueError("no gap at eps >= 1/30")
    return math.ceil(c / sig ** 2)


def nc1_estimate(oracle: ExtractionOracle, samples: int, rng: np.random.Generator):
    """Returns (decision or None, tally). Paulis below 1/15 count as stabilizers."""
    draws = oracle.sample(samples, rng)
    counts = np.bincount(draws, minlength=15)
    tally = PauliTally(Counter({TWO_QUBIT[i]: int(c) for i, c in enumerate(counts) if c}))
    low = {TWO_QUBIT[i] for i in range(15) if counts[i] / samples < 1 / 15}
    for name, group in STABILIZERS.items():
        if low == set(group):
            return name, tally
    return None, tally
