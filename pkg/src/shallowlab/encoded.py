"""Encoded, noisy execution of the k-round graph-state measurement problem."""

from __future__ import annotations

import copy
from dataclasses import dataclass
from typing import Callable, Dict, List, Optional, Sequence

import numpy as np

from .graphs import GraphProblemInstance, Transcript, verify_transcript
from .surface import (CodeParams, EncodedRegister, NoiseSpec, check_noisy_extended,
                      conjugated_frame, decode_blocks, prepare_logical_basis)


def edge_layers(edges: Sequence[tuple]) -> List[List[tuple]]:
    """Greedy proper edge colouring: each layer is a matching."""
    layers: List[List[tuple]] = []
    busy: List[set] = []
    for u, v in edges:
        for layer, used in zip(layers, busy):
            if u not in used and v not in used:
                layer.append((u, v))
                used.update((u, v))
                break
        else:
            layers.append([(u, v)])
            busy.append({u, v})
    return layers


@dataclass
class EncodedRun:
    inst: GraphProblemInstance
    code: CodeParams
    x: List[Dict[int, str]]
    readouts: Dict[int, np.ndarray]
    syndromes: List[np.ndarray]
    ops: List[tuple]

    @property
    def n_log(self) -> int:
        return self.inst.graph.num_vertices

    def decoded(self) -> Dict[int, int]:
        frame = conjugated_frame(self.code, self.n_log, self.syndromes, self.ops)
        return decode_blocks(self.code, self.readouts, frame)


class EncodedGraphOracle:
    """Rewindable encoded device: ``play_round(bases)`` runs the next colour
    class and returns its physical readouts; ``rewind()`` returns to the state
    before the last round.

    Noise: once after preparation, once per logical gate layer, and twice per
    round (after the basis change, then on the measured blocks).
    """

    def __init__(self, inst: GraphProblemInstance, code: CodeParams,
                 noise: Optional[NoiseSpec], rng: np.random.Generator):
        self.inst, self.code, self.noise, self.rng = inst, code, noise, rng
        self.reg: Optional[EncodedRegister] = None
        self.x: List[Dict[int, str]] = []
        self._saved: List[tuple] = []

    def reset(self) -> None:
        g = self.inst.graph
        reg, _ = prepare_logical_basis(self.code, ["+"] * g.num_vertices, self.noise, self.rng)
        for layer in edge_layers(g.edges):
            for u, v in layer:
                reg.logical_cz(u, v)
            reg.noise_layer(self.noise, self.rng)
        self.reg = reg
        self.x = []
        self._saved = []

    def play_round(self, bases: Dict[int, str]) -> Dict[int, np.ndarray]:
        if self.reg is None:
            self.reset()
        i = len(self.x)
        if i >= self.inst.k:
            raise ValueError("all rounds already played")
        blocks = self.inst.graph.color_class(i + 1)
        if set(bases) != set(blocks):
            raise ValueError(f"round {i + 1} bases must cover exactly colour class {i + 1}")
        self._saved.append((copy.deepcopy(self.reg), list(self.x)))
        reg = self.reg
        self.x.append(dict(bases))
        # syndrome round so the non-transversal S^dagger sees only a known frame
        reg.measure_checks(blocks, self.rng)
        for b in blocks:
            if bases[b] == "Y":
                reg.logical_sdg(b)
            reg.logical_h(b)
        reg.noise_layer(self.noise, self.rng)
        reg.noise_layer(self.noise, self.rng, blocks)
        return reg.readout(blocks, self.rng)

    def first_round(self, bases: Dict[int, str]) -> Dict[int, np.ndarray]:
        self.reset()
        return self.play_round(bases)

    def second_round(self, bases: Dict[int, str]) -> Dict[int, np.ndarray]:
        if len(self.x) != 1:
            raise ValueError("second round needs exactly one completed round; rewind first")
        return self.play_round(bases)

    def rewind(self) -> None:
        if not self._saved:
            raise ValueError("nothing to rewind")
        self.reg, self.x = self._saved.pop()

    def run(self) -> EncodedRun:
        reg = self.reg
        return EncodedRun(self.inst, self.code, [dict(b) for b in self.x], dict(reg.readouts),
                          list(reg.syndromes), list(reg.ops))


def run_encoded_graph_device(inst: GraphProblemInstance, code: CodeParams,
                             noise: Optional[NoiseSpec], rng: np.random.Generator,
                             choose_bases: Callable) -> EncodedRun:
    """Honest encoded device, all rounds in order.

    ``choose_bases(i, readouts_so_far)`` returns the round-i basis map; it may
    depend on earlier physical outputs, as an interactive verifier's would.
    """
    dev = EncodedGraphOracle(inst, code, noise, rng)
    dev.reset()
    for i in range(inst.k):
        dev.play_round(choose_bases(i, dict(dev.reg.readouts)))
    return dev.run()


def graph_relation(inst: GraphProblemInstance) -> Callable:
    """R(x, y) for the graph-state problem with decoded bits y (0 -> +1)."""
    def rel(x, y) -> bool:
        t = Transcript()
        for i, bases in enumerate(x):
            t.add_round(bases, {v: 1 - 2 * int(y[v]) for v in bases})
        return verify_transcript(inst, t)
    return rel


def check_encoded_run(run: EncodedRun) -> bool:
    return check_noisy_extended(run.x, run.readouts, run.syndromes, run.ops, run.code,
                                run.n_log, graph_relation(run.inst))


def random_basis_chooser(inst: GraphProblemInstance, rng: np.random.Generator) -> Callable:
    def choose(i, _readouts):
        return {v: ("X", "Y")[int(rng.integers(2))] for v in inst.graph.color_class(i + 1)}
    return choose
