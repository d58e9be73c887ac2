"""Experiment configs, seeded trial runners and CSV output for the CLI."""

from __future__ import annotations

import csv
import io
import os
import tempfile
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, fields, replace
from fractions import Fraction
from itertools import product
from typing import Callable, Dict, List, Optional, Sequence

import numpy as np

from scipy.stats import chi2_contingency

from .dense import (DenseState, circuit_unitary, diag_unitary, random_clifford_circuit,
                    random_hermitian_pauli)
from .diag import (DiagWord, cnot, enumerate_H3_even, pentagram, sample_uniform_H,
                   sample_uniform_H3_even, steps_circuit, word_matrix)
from .encoded import check_encoded_run, random_basis_chooser, run_encoded_graph_device
from .graphs import GraphProblemInstance, two_round_grid
from .mbqc import compile_word_to_mbqc, expected_residual, pauli_byproduct, simulate_pattern
from .kilian import DiagBatch, gamma, identity_rows, linear_mul_cnot, push_batch
from .parity import (CYCLE, ShareMatrix, all_dags, build_B, build_layered, det_encoding, dfrak,
                     dfrak_distribution, efrak, efrak_wires, expected_product, extract_L,
                     half_randomization_audit, load_dag, orbit_is_uniform, path_parity_bruteforce,
                     random_dag, randomize_matrix)
from .pauli import PauliString, StabilizerTableau, gf2_det, gf2_inv
from .solvers import (FAIL_POLICIES, STABILIZERS, TWO_QUBIT, ExtractionOracle, FaultyOracle,
                      HonestLogical, SolverConfig, exact_DR, find_blocking_f, h3_key, nc1_estimate,
                      nc1_samples, run_Rf_batch, solve_dagparity)
from .surface import NoiseSpec, dec, surface_code

EXPERIMENTS = ("audit", "noise-sweep", "mbqc-check", "half-rand-audit", "pentagram-dist",
               "solve-parityl", "nc1-estimate", "tableau-fuzz")


class ConfigError(ValueError):
    pass


@dataclass(frozen=True)
class ExperimentConfig:
    experiment: str = "audit"
    seed: int = 0
    trials: int = 100
    n: int = 6
    m: int = 3
    d: tuple = (3, 5)
    p: tuple = (1e-3, 3e-3, 1e-2)
    grid_w: int = 2
    grid_h: int = 2
    shares: int = 2
    noise_kind: str = "decoder"
    eps: float = 0.0
    policy: str = "honest"
    answer: str = "random"
    k: int = 15
    word_steps: int = 6
    phase1_samples: int = 24
    phase2_samples: int = 48
    c: float = 8.0
    adversary: str = "blinded"
    basis: str = "alternate"
    max_qubits: int = 5
    draws: int = 10000
    samples: int = 0
    dag_file: str = ""
    out: str = ""

    def validate(self) -> "ExperimentConfig":
        def need(cond, msg):
            if not cond:
                raise ConfigError(msg)
        need(self.experiment in EXPERIMENTS, f"unknown experiment {self.experiment!r}")
        need(self.seed >= 0, "seed must be non-negative")
        need(self.trials >= 1, "trials must be positive")
        need(2 <= self.n <= 7, "n must be in 2..7")
        need(2 <= self.m <= 6, "m must be in 2..6")
        need(all(v in (3, 5, 7) for v in self.d), "d values must be 3, 5 or 7")
        need(all(0 <= v <= 0.5 for v in self.p), "p values must be in [0, 0.5]")
        need(1 <= self.grid_w <= 4 and 1 <= self.grid_h <= 4, "grid dims must be in 1..4")
        need(self.shares == 2, "only two shares per cell are built")
        need(self.noise_kind in ("decoder", "encoded"), "noise_kind is decoder or encoded")
        need(0 <= self.eps <= 1, "eps must be in [0, 1]")
        need(self.policy in ("honest",) + FAIL_POLICIES, f"unknown policy {self.policy!r}")
        need(self.answer in ("random", "noncontextual", "flip"), f"unknown answer {self.answer!r}")
        need(self.k >= 1, "k must be positive")
        need(1 <= self.word_steps <= 50, "word_steps must be in 1..50")
        need(self.phase1_samples >= 1 and self.phase2_samples >= 1, "sample counts must be positive")
        need(self.c > 0, "c must be positive")
        need(self.adversary in ("blinded", "fixed"), "adversary is blinded or fixed")
        need(self.basis in ("alternate", "X_basis", "Z_basis"), f"unknown basis {self.basis!r}")
        need(1 <= self.max_qubits <= 8, "max_qubits must be in 1..8")
        need(self.draws >= 10, "draws must be at least 10")
        need(self.samples >= 0, "samples must be non-negative (0: use c)")
        return self


def _convert(name: str, raw: str, default):
    raw = raw.strip()
    try:
        if isinstance(default, bool):
            return raw.lower() in ("1", "true", "yes")
        if isinstance(default, int):
            return int(raw)
        if isinstance(default, float):
            return float(Fraction(raw)) if "/" in raw else float(raw)
        if isinstance(default, tuple):
            items = [v for v in raw.replace(",", " ").split() if v]
            kind = type(default[0]) if default else float
            return tuple(kind(float(Fraction(v)) if kind is float else int(v)) for v in items)
        return raw
    except ValueError as exc:
        raise ConfigError(f"bad value for {name}: {raw!r}") from exc


def parse_config(text: str, base: Optional[ExperimentConfig] = None) -> ExperimentConfig:
    """``key = value`` lines; ``#`` starts a comment; unknown keys are rejected."""
    base = base or ExperimentConfig()
    defaults = {f.name: getattr(base, f.name) for f in fields(base)}
    updates = {}
    for lineno, line in enumerate(text.splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"line {lineno}: expected key = value")
        key, val = (s.strip() for s in line.split("=", 1))
        if key not in defaults:
            raise ConfigError(f"line {lineno}: unknown key {key!r}")
        updates[key] = _convert(key, val, defaults[key])
    return replace(base, **updates).validate()


def with_overrides(cfg: ExperimentConfig, pairs: Sequence[str]) -> ExperimentConfig:
    return parse_config("\n".join(pairs), cfg)


# -- trial plumbing --------------------------------------------------------------

def trial_rng(seed: int, salt: int, index: int) -> np.random.Generator:
    return np.random.default_rng([seed, salt, index])


def _run_chunk(args):
    fn, cfg, salt, lo, hi, extra = args
    return [fn(cfg, trial_rng(cfg.seed, salt, i), *extra) for i in range(lo, hi)]


def map_trials(fn: Callable, cfg: ExperimentConfig, count: int, salt: int = 0, extra=(),
               jobs: int = 1, chunk: int = 50) -> list:
    """Results of ``fn(cfg, rng_i, *extra)`` for i < count, in index order.

    Chunk boundaries do not depend on ``jobs``, so output never does either.
    """
    tasks = [(fn, cfg, salt, lo, min(lo + chunk, count), tuple(extra))
             for lo in range(0, count, chunk)]
    if jobs <= 1 or len(tasks) == 1:
        parts = [_run_chunk(t) for t in tasks]
    else:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            parts = list(pool.map(_run_chunk, tasks))
    return [r for part in parts for r in part]


def _cell(v):
    if isinstance(v, (float, np.floating)):
        return repr(float(v))
    if isinstance(v, np.integer):
        return int(v)
    return v


def rows_to_csv(rows: List[Dict]) -> str:
    if not rows:
        return ""
    buf = io.StringIO()
    w = csv.DictWriter(buf, fieldnames=list(rows[0]), lineterminator="\n")
    w.writeheader()
    for r in rows:
        w.writerow({k: _cell(v) for k, v in r.items()})
    return buf.getvalue()


def write_atomic(path: str, text: str) -> None:
    d = os.path.dirname(os.path.abspath(path))
    os.makedirs(d, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=d, prefix=".tmp-", suffix=".csv")
    with os.fdopen(fd, "w") as fh:
        fh.write(text)
    os.replace(tmp, path)


# -- experiments -----------------------------------------------------------------

def audit_constants(cfg: ExperimentConfig, jobs: int = 1) -> List[Dict]:
    pc = pentagram()
    rows = []

    def add(check, value, expected, ok=None):
        ok = (value == expected) if ok is None else ok
        rows.append({"check": check, "value": value, "expected": expected,
                     "result": "pass" if ok else "fail"})

    add("S_set size", len(pc.s_set), 24)
    add("nonstabilizers of |+++> in S_set", len(pc.nonstab), 20)
    add("star Paulis measured exactly twice",
        int(all(len(v) == 2 for v in pc.incidence.values())), 1)
    add("lines commute with +-III product", len(pc.lines), 5)
    add("odd number of -III lines", sum(ln.product_sign == -1 for ln in pc.lines) % 2, 1)
    dr = exact_DR()
    add("honest law support equals nonstabilizers", int(set(dr) == {p.label(False) for p in pc.nonstab}), 1)
    top = max(dr.values())
    add("max honest weight >= 1/20", round(top, 6), ">=0.05", ok=top >= 1 / 20)
    blocked = 0
    for k in dr:
        try:
            find_blocking_f(_pauli(k))
            blocked += 1
        except AssertionError:
            pass
    add("blockable nonstabilizers", blocked, len(pc.nonstab))
    agree, total = decoder_invariance(3)
    add("decoder invariance d=3, weight-1 flips", agree, total)
    rng = trial_rng(cfg.seed, 8, 0)
    coset, prod, n = blinding_audit(cfg.draws, rng)
    add(f"blinded steps in their CNOT cosets ({n} draws)", coset, n)
    add(f"blinded product in even group, equals f'.pi f pi^-1 ({n} draws)", prod, n)
    dense_ok, dn = blinding_dense_check(200, rng)
    add(f"dense product equals f'.pi f pi^-1 on 3 wires ({dn} draws)", dense_ok, dn)
    return rows


def decoder_invariance(d: int):
    """Dec(x + v) = Dec(x) for every |v| = 1 and every codeword x (both logical values)."""
    code = surface_code(d)
    hx = code.check_matrix("X")
    lx = np.zeros(code.m, np.uint8)
    lx[list(code.logical_x)] = 1
    agree = total = 0
    for logical in (0, 1):
        for coeff in product((0, 1), repeat=hx.shape[0]):
            x = ((np.array(coeff) @ hx + logical * lx) % 2).astype(np.uint8)
            want = dec(code, x)
            for q in range(code.m):
                v = np.zeros(code.m, np.uint8)
                v[q] = 1
                agree += int(dec(code, x ^ v) == want == logical)
                total += 1
    return agree, total


def blinding_audit(draws: int, rng: np.random.Generator, reps: int = 20):
    """Blind reduction words at n = 3 and check every step and the full product."""
    n_words = max(1, draws // reps)
    m = efrak_wires(3)
    words, parity = [], []
    for _ in range(n_words):
        g = random_dag(3, rng)
        words.append(efrak(dfrak(g, rng)))
        parity.append(path_parity_bruteforce(g))
    words = [w for w in words for _ in range(reps)]
    parity = [p for p in parity for _ in range(reps)]
    fs = [sample_uniform_H3_even(rng) for _ in words]
    batch = gamma(fs, words, m, rng)
    seq = batch.cnot_sequence()
    diag = DiagBatch.identity(batch.size, m)
    rows = identity_rows(batch.size, m)
    coset = np.ones(batch.size, bool)
    for i, st in enumerate(batch.steps()):
        coset &= (st.ctrl == seq[:, i, 0]) & (st.tgt == seq[:, i, 1])
        push_batch(diag, st.ctrl, st.tgt)
        diag.imul(st.diag)
        linear_mul_cnot(rows, st.ctrl, st.tgt)
    lin_ok = (rows == identity_rows(1, m)).all(axis=1) & diag.supported_on(3)
    even_keys = {h3_key(h) for h in enumerate_H3_even()}
    keys = diag.key3()
    inv_pi = {0: np.eye(3, dtype=np.uint8), 1: gf2_inv(CYCLE)}
    prod = 0
    for b in range(batch.size):
        want = h3_key(batch.f_prime[b] * fs[b].compose_linear(inv_pi[parity[b]]))
        prod += int(lin_ok[b] and keys[b] in even_keys and keys[b] == want)
    return int(coset.sum()), prod, batch.size


def blinding_dense_check(draws: int, rng: np.random.Generator):
    """Multiply the blinded steps as dense 8x8 unitaries."""
    ok = 0
    for _ in range(draws):
        word = []
        for _ in range(3):
            c, t = rng.choice(3, size=2, replace=False)
            word.append(cnot(int(c), int(t)))
        f = sample_uniform_H3_even(rng)
        batch = gamma(f, [word], 3, rng)
        u = circuit_unitary(3, steps_circuit(batch.session_steps(0)))
        want = diag_unitary(batch.f_prime[0] * f.compose_linear(gf2_inv(word_matrix(word, 3))))
        ok += int(np.allclose(u, want))
    return ok, draws


def _pauli(label):
    from .pauli import PauliString
    return PauliString.from_label(label)


def _decoder_trial(cfg, rng, d, p):
    code = surface_code(d)
    hx = code.check_matrix("X")
    coeff = rng.integers(0, 2, hx.shape[0])
    bits = (coeff @ hx) % 2
    bits = bits.astype(np.uint8) ^ (rng.random(code.m) < p).astype(np.uint8)
    return int(dec(code, bits) != 0)


def _encoded_trial(cfg, rng, d, p):
    inst = GraphProblemInstance(two_round_grid(cfg.grid_w, cfg.grid_h), 2)
    run = run_encoded_graph_device(inst, surface_code(d), NoiseSpec(p), rng,
                                   random_basis_chooser(inst, rng))
    return int(not check_encoded_run(run))


def noise_sweep(cfg: ExperimentConfig, jobs: int = 1) -> List[Dict]:
    fn = _decoder_trial if cfg.noise_kind == "decoder" else _encoded_trial
    rows = []
    for di, d in enumerate(cfg.d):
        for pi, p in enumerate(cfg.p):
            res = map_trials(fn, cfg, cfg.trials, salt=1000 * di + pi, extra=(d, p), jobs=jobs,
                             chunk=500 if fn is _decoder_trial else 10)
            rows.append({"d": d, "p": p, "trials": cfg.trials, "failures": sum(res),
                         "kind": cfg.noise_kind, "seed": cfg.seed})
    return rows


def random_steps(m: int, count: int, rng: np.random.Generator) -> list:
    out = []
    for _ in range(count):
        c, t = rng.choice(m, size=2, replace=False)
        out.append((cnot(int(c), int(t)), sample_uniform_H(m, rng)))
    return out


def _mbqc_trial(cfg, rng):
    m = int(rng.integers(2, cfg.m + 1))
    word = random_steps(m, cfg.word_steps, rng)
    pat = compile_word_to_mbqc(word, m)
    outs, residual = simulate_pattern(pat, rng)
    want = expected_residual(word, m, pauli_byproduct(pat, outs))
    return int(residual.same_state(want))


def mbqc_check(cfg: ExperimentConfig, jobs: int = 1) -> List[Dict]:
    res = map_trials(_mbqc_trial, cfg, cfg.trials, salt=2, jobs=jobs, chunk=25)
    return [{"max_m": cfg.m, "word_steps": cfg.word_steps, "trials": cfg.trials,
             "successes": sum(res), "seed": cfg.seed}]


def half_rand_audit(cfg: ExperimentConfig, jobs: int = 1) -> List[Dict]:
    """Reduction audit: determinant encoding, randomization, layering, CNOT words."""
    rng = trial_rng(cfg.seed, 9, 0)
    rows = []

    def add(check, n, value, expected):
        rows.append({"check": check, "n": n, "value": int(value), "expected": expected,
                     "result": "pass" if value == expected else "fail"})

    for n in range(2, 6):
        dags = list(all_dags(n))
        add("det encoding equals path parity (all DAGs)", n,
            sum(det_encoding(g) == path_parity_bruteforce(g) for g in dags), len(dags))
    ok = 0
    for _ in range(cfg.draws):
        g = random_dag(int(rng.integers(2, 8)), rng)
        k = randomize_matrix(extract_L(g), rng)
        ok += int(gf2_det(k.k_xor()) == det_encoding(g)
                  and path_parity_bruteforce(build_B(k)) == path_parity_bruteforce(g))
    add(f"randomized det preserved ({cfg.draws} draws)", "2-7", ok, cfg.draws)
    for size in (2, 3):
        ls = {extract_L(g).tobytes(): extract_L(g) for g in all_dags(size + 1)}
        add("K orbit uniform within det class (every L)", size + 1,
            sum(orbit_is_uniform(L) for L in ls.values()), len(ls))
    rep = half_randomization_audit(dfrak_distribution, all_dags(3), path_parity_bruteforce)
    add("D output law identical within parity class", 3, int(rep.identical_within_class), 1)
    add("D supports disjoint across classes", 3, int(rep.disjoint_across), 1)
    add("D supports equal size", 3, rep.support_sizes[0], rep.support_sizes[1])
    ex = ShareMatrix.from_cells({(1, 1): (1, 0), (1, 2): (1, 1), (2, 2): (0, 1)}, 2)
    add("worked layered example path parity", 3, build_layered(ex).path_parity(),
        path_parity_bruteforce(build_B(ex)))
    shares = [ShareMatrix.from_cells({(1, 1): b[0:2], (1, 2): b[2:4], (2, 2): b[4:6]}, 2)
              for b in product((0, 1), repeat=6)]
    add("layered parity preserved (all 2-share inputs)", 3,
        sum(build_layered(k).path_parity() == path_parity_bruteforce(build_B(k)) for k in shares),
        len(shares))
    m3 = efrak_wires(3)
    words = [efrak(build_layered(k)) for k in shares]
    add("CNOT word product is I or the 3-cycle (all inputs)", 3,
        sum((word_matrix(w, m3) == expected_product(path_parity_bruteforce(build_B(k)), m3)).all()
            for w, k in zip(words, shares)), len(shares))
    add("CNOT words distinct (injective)", 3, len({tuple(w) for w in words}), len(shares))
    draws = max(1, cfg.draws // 10)
    ok = 0
    for _ in range(draws):
        n = int(rng.integers(2, 7))
        g = random_dag(n, rng)
        m = efrak_wires(n)
        ok += int((word_matrix(efrak(dfrak(g, rng)), m)
                   == expected_product(path_parity_bruteforce(g), m)).all())
    add(f"CNOT word product on random instances ({draws} draws)", "2-6", ok, draws)
    return rows


# identity-product word on three wires
PENTAGRAM_WORD = [cnot(0, 1), cnot(1, 2), cnot(2, 0), cnot(2, 0), cnot(1, 2), cnot(0, 1)]
PENTAGRAM_F = (0, 37, 101)  # indices into the fixed even-group order


def pentagram_dist(cfg: ExperimentConfig, jobs: int = 1) -> List[Dict]:
    """Honest runs for three blinding elements f, outputs mapped back by f^-1.

    ``homogeneity_p`` is the chi-square test that the three laws agree.
    """
    rng = trial_rng(cfg.seed, 3, 0)
    dr = exact_DR()
    tables = []
    for fi in PENTAGRAM_F:
        f = enumerate_H3_even()[fi]
        outs = run_Rf_batch([f] * cfg.trials, [PENTAGRAM_WORD] * cfg.trials, 3,
                            HonestLogical(rng), rng)
        counts: Dict[str, int] = {}
        finv = f.inverse()
        for o in outs:
            key = "none" if o is None else finv.conjugate_pauli(o).label(with_sign=False)
            counts[key] = counts.get(key, 0) + 1
        tables.append(counts)
    keys = sorted(set(dr).union(*tables))
    mat = np.array([[t.get(k, 0) for k in keys] for t in tables])
    mat = mat[:, mat.sum(axis=0) > 0]
    pval = float(chi2_contingency(mat)[1]) if mat.shape[1] > 1 else 1.0
    return [{"f_index": fi, "pauli": k, "exact": dr.get(k, 0.0), "count": t.get(k, 0),
             "samples": cfg.trials, "homogeneity_p": round(pval, 6), "seed": cfg.seed}
            for fi, t in zip(PENTAGRAM_F, tables) for k in keys]


def make_oracle(cfg: ExperimentConfig, rng: np.random.Generator):
    dev = HonestLogical(rng)
    if cfg.policy == "honest":
        return dev
    return FaultyOracle(dev, cfg.eps, cfg.policy, cfg.answer, rng=rng,
                        key=int(rng.integers(0, 2**63)))


def _solve_trial(cfg, rng, dag_text):
    dag = load_dag(dag_text) if dag_text else random_dag(cfg.n, rng)
    scfg = SolverConfig(phase1_samples=cfg.phase1_samples, phase2_samples=cfg.phase2_samples)
    got = solve_dagparity(dag, make_oracle(cfg, rng), rng, k=cfg.k, config=scfg)
    return int(got == path_parity_bruteforce(dag))


def solve_parityl(cfg: ExperimentConfig, jobs: int = 1) -> List[Dict]:
    dag_text = open(cfg.dag_file).read() if cfg.dag_file else ""
    n = load_dag(dag_text).n if dag_text else cfg.n
    res = map_trials(_solve_trial, cfg, cfg.trials, salt=4, extra=(dag_text,), jobs=jobs, chunk=5)
    return [{"n": n, "instances": cfg.trials, "k": cfg.k, "eps": cfg.eps, "policy": cfg.policy,
             "answer": cfg.answer, "correct": sum(res), "seed": cfg.seed}]


def _nc1_samples(cfg) -> int:
    return cfg.samples if cfg.samples else nc1_samples(cfg.eps, cfg.c)


def _nc1_trial(cfg, rng, index_parity):
    basis = cfg.basis if cfg.basis != "alternate" else ("X_basis", "Z_basis")[index_parity]
    got, tally = nc1_estimate(ExtractionOracle(basis, cfg.eps, cfg.adversary), _nc1_samples(cfg), rng)
    honest = [p for p in TWO_QUBIT if p not in STABILIZERS[basis]]
    dev = max(abs(tally.frequency(p) - 1 / 12) for p in honest)
    return (int(got == basis), int(got is None), dev)


def nc1_experiment(cfg: ExperimentConfig, jobs: int = 1) -> List[Dict]:
    half = (cfg.trials + 1) // 2
    res = (map_trials(_nc1_trial, cfg, half, salt=5, extra=(0,), jobs=jobs)
           + map_trials(_nc1_trial, cfg, cfg.trials - half, salt=6, extra=(1,), jobs=jobs))
    return [{"eps": cfg.eps, "samples": _nc1_samples(cfg), "reps": cfg.trials,
             "adversary": cfg.adversary, "correct": sum(r[0] for r in res),
             "undecided": sum(r[1] for r in res),
             "max_freq_dev": round(max(r[2] for r in res), 6), "seed": cfg.seed}]


def _fuzz_trial(cfg, rng):
    return int(tableau_agrees_with_dense(int(rng.integers(1, cfg.max_qubits + 1)), rng))


def tableau_agrees_with_dense(n: int, rng: np.random.Generator, depth: int = 30,
                              measurements: int = 8) -> bool:
    """Random circuit plus a random Pauli measurement sequence; the tableau's
    (deterministic?, sign) must match the dense outcome probabilities exactly."""
    circ = random_clifford_circuit(n, depth, rng)
    tab = StabilizerTableau.zero_state(n).apply_circuit(circ)
    psi = DenseState(n).apply_circuit(circ)
    for _ in range(measurements):
        p = random_hermitian_pauli(n, rng)
        pr_plus = psi.outcome_probability(p, 1)
        det = tab.peek_pauli(p)
        if det is None:
            if abs(pr_plus - 0.5) > 1e-9:
                return False
            outcome = 1 if rng.random() < 0.5 else -1
            tab.measure_pauli(p, forced=outcome)
        else:
            if abs(pr_plus - (1.0 if det == 1 else 0.0)) > 1e-9:
                return False
            outcome = det
            tab.measure_pauli(p, forced=outcome)
        psi.project(p, outcome)
        if rng.random() < 0.5:
            g = random_clifford_circuit(n, 3, rng)
            tab.apply_circuit(g)
            psi.apply_circuit(g)
    return True


def tableau_fuzz(cfg: ExperimentConfig, jobs: int = 1) -> List[Dict]:
    res = map_trials(_fuzz_trial, cfg, cfg.trials, salt=7, jobs=jobs, chunk=100)
    return [{"trials": cfg.trials, "max_qubits": cfg.max_qubits, "agree": sum(res),
             "seed": cfg.seed}]


RUNNERS = {
    "audit": audit_constants,
    "noise-sweep": noise_sweep,
    "mbqc-check": mbqc_check,
    "half-rand-audit": half_rand_audit,
    "pentagram-dist": pentagram_dist,
    "solve-parityl": solve_parityl,
    "nc1-estimate": nc1_experiment,
    "tableau-fuzz": tableau_fuzz,
}


def run_experiment(cfg: ExperimentConfig, jobs: int = 1) -> List[Dict]:
    cfg.validate()
    return RUNNERS[cfg.experiment](cfg, jobs)
