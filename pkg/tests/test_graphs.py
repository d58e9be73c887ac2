import numpy as np
import pytest
from hypothesis import given, strategies as st

from shallowlab.graphs import (GraphProblemInstance, MalformedTranscript, Transcript, dump_instance,
                               dump_transcript, grid, honest_transcript, load_instance,
                               load_transcript, random_bases, two_round_grid, verify_transcript)

seeds = st.integers(0, 2**32 - 1)


def instance(w=3, h=2):
    return GraphProblemInstance(two_round_grid(w, h), 2)


class TestVerify:
    @given(seeds)
    def test_honest_transcripts_accepted(self, seed):
        rng = np.random.default_rng(seed)
        inst = instance()
        t = honest_transcript(inst, random_bases(inst, rng), rng)
        assert verify_transcript(inst, t)

    @given(seeds)
    def test_order_independent(self, seed):
        rng = np.random.default_rng(seed)
        inst = instance()
        t = honest_transcript(inst, random_bases(inst, rng), rng)
        # flip one outcome so that both orders must agree on rejection too
        if rng.random() < 0.5:
            v = int(rng.choice(sorted(t.outcomes[1])))
            t.outcomes[1][v] *= -1
        perm = lambda i, vs: list(reversed(vs))
        assert verify_transcript(inst, t) == verify_transcript(inst, t, order=perm)

    def test_deterministic_flip_rejected(self):
        # two-vertex graph state: stabilizers XZ, ZX, YY
        inst = GraphProblemInstance(grid(2, 1, lambda c: c + 1), 2)
        rng = np.random.default_rng(0)
        for _ in range(10):
            good = honest_transcript(inst, [{0: "Y"}, {1: "Y"}], rng)
            assert good.outcomes[0][0] * good.outcomes[1][1] == 1
            bad = Transcript(good.bases, [dict(o) for o in good.outcomes])
            bad.outcomes[1][1] *= -1
            assert verify_transcript(inst, good)
            assert not verify_transcript(inst, bad)
        # X then Y: nothing is determined, both signs pass
        for o in (1, -1):
            t = Transcript()
            t.add_round({0: "X"}, {0: 1})
            t.add_round({1: "Y"}, {1: o})
            assert verify_transcript(inst, t)

    def test_malformed(self):
        inst = instance()
        rng = np.random.default_rng(1)
        t = honest_transcript(inst, random_bases(inst, rng), rng)
        broken = Transcript(t.bases[:1], t.outcomes[:1])
        with pytest.raises(MalformedTranscript):
            verify_transcript(inst, broken)
        t.bases[0][0] = "Z"
        with pytest.raises(MalformedTranscript):
            verify_transcript(inst, t)
        t2 = honest_transcript(inst, random_bases(inst, rng), rng)
        t2.outcomes[0][0] = 0
        with pytest.raises(MalformedTranscript):
            verify_transcript(inst, t2)

    def test_degree_bound(self):
        assert grid(4, 4).max_degree == 4
        with pytest.raises(ValueError):
            GraphProblemInstance(grid(2, 2, lambda c: 3), 2)


class TestSerialization:
    @given(st.integers(1, 4), st.integers(1, 4), seeds)
    def test_round_trip(self, w, h, seed):
        rng = np.random.default_rng(seed)
        inst = GraphProblemInstance(grid(w, h, lambda c: 1 + (c % 2)), 2)
        again = load_instance(dump_instance(inst))
        assert dump_instance(again) == dump_instance(inst)
        t = honest_transcript(inst, random_bases(inst, rng), rng)
        assert load_transcript(dump_transcript(t)) == t

    def test_bad_header(self):
        with pytest.raises(ValueError):
            load_instance("nope\n")
        with pytest.raises(ValueError):
            load_transcript("nope\n")
