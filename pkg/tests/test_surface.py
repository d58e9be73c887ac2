import itertools

import numpy as np
import pytest
from hypothesis import given, strategies as st

from shallowlab.pauli import PauliString, conjugate_pauli_through, gate
from shallowlab.surface import (EncodedRegister, NoiseSpec, block_syndrome, conjugated_frame, dec,
                                decode_blocks, prepare_logical_basis, rec, sample_noise,
                                surface_code)

seeds = st.integers(0, 2**32 - 1)


def codewords(code, logical):
    hx = code.check_matrix("X")
    lx = np.zeros(code.m, np.uint8)
    lx[list(code.logical_x)] = logical
    for coeff in itertools.product((0, 1), repeat=hx.shape[0]):
        yield ((np.array(coeff) @ hx + lx) % 2).astype(np.uint8)


class TestCode:
    @pytest.mark.parametrize("d", [3, 5, 7])
    def test_layout(self, d):
        code = surface_code(d)
        assert code.num_checks == d * d - 1
        for i in range(code.num_checks):
            for j in range(code.num_checks):
                assert code.check_pauli(i).commutes(code.check_pauli(j))
        assert not code.logical("X").commutes(code.logical("Z"))

    @pytest.mark.parametrize("d", [2, 4, 1])
    def test_bad_distance(self, d):
        with pytest.raises(ValueError):
            surface_code(d)

    @pytest.mark.parametrize("d", [3, 5])
    def test_h_relabel_swaps_check_types(self, d):
        code = surface_code(d)
        dst = code.h_relabel
        xs = {tuple(sorted(dst[q] for q in sup)) for k, sup in code.checks if k == "X"}
        zs = {tuple(sorted(sup)) for k, sup in code.checks if k == "Z"}
        assert xs == zs


class TestRecDec:
    @given(seeds, st.sampled_from([3, 5]))
    def test_rec_reproduces_syndrome(self, seed, d):
        rng = np.random.default_rng(seed)
        code = surface_code(d)
        s = rng.integers(0, 2, (2, code.num_checks)).astype(np.uint8)
        r = rec(code, s)
        for b in range(2):
            assert (block_syndrome(code, r, b) == s[b]).all()

    def test_rec_is_canonical(self):
        code = surface_code(3)
        s = np.zeros(code.num_checks, np.uint8)
        s[0] = 1
        assert rec(code, s).key() == rec(code, s.copy()).key()
        assert rec(code, np.zeros(code.num_checks, np.uint8)).is_identity()

    @pytest.mark.parametrize("logical", [0, 1])
    def test_dec_reads_codewords(self, logical):
        code = surface_code(3)
        for x in codewords(code, logical):
            assert dec(code, x) == logical

    def test_dec_corrects_weight_two_at_d5(self):
        code = surface_code(5)
        rng = np.random.default_rng(4)
        words = list(itertools.islice(codewords(code, 1), 0, 4096, 97))
        for x in words:
            for _ in range(5):
                v = np.zeros(code.m, np.uint8)
                v[rng.choice(code.m, 2, replace=False)] = 1
                assert dec(code, x ^ v) == 1
                assert dec(code, x ^ v, frame=v) == 1

    def test_block_size_checked(self):
        with pytest.raises(ValueError):
            dec(surface_code(3), np.zeros(8, np.uint8))


class TestNoise:
    def test_rates(self):
        rng = np.random.default_rng(0)
        e = sample_noise(NoiseSpec(0.1), 20000, rng)
        assert abs(e.weight() / 20000 - 0.1) < 0.01
        e = sample_noise(NoiseSpec(0.2, "iid_xz"), 20000, rng)
        assert not (e.x & e.z).any()

    def test_adversary_confined(self):
        rng = np.random.default_rng(0)
        ok = NoiseSpec(0.5, "adversarial", policy=lambda mask, r: (mask, mask))
        e = sample_noise(ok, 50, rng)
        assert (e.x == e.z).all()
        bad = NoiseSpec(0.01, "adversarial", policy=lambda mask, r: (np.ones_like(mask), mask))
        with pytest.raises(ValueError):
            sample_noise(bad, 50, rng)
        with pytest.raises(ValueError):
            NoiseSpec(1.5)
        with pytest.raises(ValueError):
            NoiseSpec(0.1, "bursty")


class TestFrame:
    @given(seeds)
    def test_frame_push_matches_conjugation(self, seed):
        rng = np.random.default_rng(seed)
        code = surface_code(3)
        n = 2 * code.m
        s = rng.integers(0, 2, (2, code.num_checks)).astype(np.uint8)
        gates = []
        for _ in range(15):
            kind = ["H", "S", "CNOT", "CZ"][int(rng.integers(4))]
            if kind in ("CNOT", "CZ"):
                a, b = rng.choice(n, 2, replace=False)
                gates.append(gate(kind, int(a), int(b)))
            else:
                gates.append(gate(kind, int(rng.integers(n))))
        ops = [("ec", (0, 1))] + [("gate", g) for g in gates]
        fr = conjugated_frame(code, 2, [s], ops)
        want = conjugate_pauli_through(gates, rec(code, s))
        assert fr.final.unsigned().key() == want.unsigned().key()

    @given(seeds, st.sampled_from(["0", "+"]))
    def test_single_error_memory(self, seed, state):
        rng = np.random.default_rng(seed)
        code = surface_code(3)
        q = int(rng.integers(code.m))
        kind = "XYZ"[int(rng.integers(3))]

        def one_error(mask, r):
            e = PauliString.single(code.m, q, kind)
            return e.x, e.z

        spec = NoiseSpec(1.0, "adversarial", policy=one_error)
        reg, _ = prepare_logical_basis(code, [state], spec, rng)
        if state == "+":
            reg.logical_h(0)
        reg.readout([0], rng)
        fr = conjugated_frame(code, 1, reg.syndromes, reg.ops)
        assert decode_blocks(code, reg.readouts, fr) == {0: 0}

    def test_register_logical_gates(self, rng):
        code = surface_code(3)
        reg, _ = prepare_logical_basis(code, ["+", "0"], None, rng)
        reg.logical_cnot(0, 1)
        # the prepared state sits in a random syndrome space; the frame undoes it
        frame = conjugated_frame(code, 2, reg.syndromes, reg.ops).final
        zz = code.logical("Z", 0, 2) * code.logical("Z", 1, 2)
        xx = code.logical("X", 0, 2) * code.logical("X", 1, 2)
        for p in (zz, xx):
            sign = reg.tableau.peek_pauli(p)
            assert sign == (1 if p.commutes(frame) else -1)
        assert isinstance(reg, EncodedRegister)
