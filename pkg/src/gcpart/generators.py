"""Seeded benchmark circuit families.

Every generator draws from ``numpy.random.Generator(PCG64(seed))`` so that the
same parameters and seed give the same circuit on any platform.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Any

import numpy as np

from .circuit import CP, HADAMARD, U, Circuit, GateKind, layer_circuit

FAMILIES = ("cp-fraction", "qft", "qv", "qaoa")

# theta kept away from 0 and pi so the rotation is never (anti-)diagonal
_GENERAL_THETA = (0.1, math.pi - 0.1)


def make_rng(seed: int) -> np.random.Generator:
    return np.random.Generator(np.random.PCG64(seed))


def _random_u(rng: np.random.Generator) -> U:
    phi, lam = rng.uniform(0.0, 2 * math.pi, size=2)
    theta = rng.uniform(0.0, math.pi)
    return U(float(phi), float(theta), float(lam))


def _general_u(rng: np.random.Generator) -> U:
    phi, lam = rng.uniform(0.0, 2 * math.pi, size=2)
    return U(float(phi), float(rng.uniform(*_GENERAL_THETA)), float(lam))


def _rz(angle: float) -> U:
    return U(0.0, 0.0, angle)


def gen_cp_fraction(n_q: int, d: int | None = None, p: float = 0.5, seed: int = 0) -> Circuit:
    """Random CP-fraction circuit.

    Each of ``d`` rounds gives every qubit a random ``U`` with probability
    ``1 - p``; the remaining qubits are shuffled and paired into ``CP`` gates.
    With an odd remainder one of them sits the round out.
    """
    if n_q < 2:
        raise ValueError("cp-fraction needs n_q >= 2")
    if not 0.0 <= p <= 1.0:
        raise ValueError(f"fraction p must lie in [0, 1], got {p}")
    d = n_q if d is None else d
    if d < 1:
        raise ValueError("depth must be >= 1")
    rng = make_rng(seed)
    ops: list[tuple[GateKind, tuple[int, ...]]] = []
    for _ in range(d):
        gets_u = rng.random(n_q) < 1.0 - p
        for q in np.flatnonzero(gets_u):
            ops.append((_random_u(rng), (int(q),)))
        rest = rng.permutation(np.flatnonzero(~gets_u))
        for k in range(0, len(rest) - 1, 2):
            a, b = int(rest[k]), int(rest[k + 1])
            ops.append((CP(float(rng.uniform(0.0, 2 * math.pi))), (a, b)))
    return layer_circuit(ops, n_q)


def gen_qft(n_q: int) -> Circuit:
    """QFT without the final swap network; qubit ``i`` leads its CP chain."""
    if n_q < 2:
        raise ValueError("qft needs n_q >= 2")
    ops: list[tuple[GateKind, tuple[int, ...]]] = []
    for i in range(n_q):
        ops.append((HADAMARD, (i,)))
        for k in range(i + 1, n_q):
            ops.append((CP(math.pi / 2 ** (k - i)), (i, k)))
    return layer_circuit(ops, n_q)


def gen_quantum_volume(n_q: int, seed: int = 0, rounds: int | None = None) -> Circuit:
    """Quantum-volume style circuit with KAK-shaped two-qubit blocks.

    Each block is ``U U . CP . U U . CP . U U . CP . U U`` with general ``U``
    gates, so no two CPs on a qubit are ever adjacent in the grouping sense.
    """
    if n_q < 2:
        raise ValueError("quantum volume needs n_q >= 2")
    rounds = n_q if rounds is None else rounds
    rng = make_rng(seed)
    ops: list[tuple[GateKind, tuple[int, ...]]] = []
    for _ in range(rounds):
        perm = rng.permutation(n_q)
        for k in range(0, n_q - 1, 2):
            a, b = int(perm[k]), int(perm[k + 1])
            for step in range(4):
                ops.append((_general_u(rng), (a,)))
                ops.append((_general_u(rng), (b,)))
                if step < 3:
                    ops.append((CP(float(rng.uniform(0.0, 2 * math.pi))), (a, b)))
    return layer_circuit(ops, n_q)


def random_graph_edges(n_q: int, edge_prob: float, rng: np.random.Generator) -> list[tuple[int, int]]:
    """Erdos-Renyi G(n, p) edges in lexicographic order."""
    draws = rng.random(n_q * (n_q - 1) // 2)
    pairs = [(i, j) for i in range(n_q) for j in range(i + 1, n_q)]
    return [e for e, x in zip(pairs, draws) if x < edge_prob]


def gen_qaoa_maxcut(n_q: int, edge_prob: float = 0.5, reps: int = 1, seed: int = 0) -> Circuit:
    """Randomly initialised MaxCut QAOA over a G(n, p) graph.

    The ZZ term of each edge is a CP with diagonal RZ corrections on both ends.
    Edges are emitted grouped by their lower endpoint, so CP chains share a lead.
    """
    if n_q < 2:
        raise ValueError("qaoa needs n_q >= 2")
    if not 0.0 <= edge_prob <= 1.0:
        raise ValueError(f"edge_prob must lie in [0, 1], got {edge_prob}")
    if reps < 1:
        raise ValueError("reps must be >= 1")
    rng = make_rng(seed)
    edges = random_graph_edges(n_q, edge_prob, rng)
    ops: list[tuple[GateKind, tuple[int, ...]]] = [(HADAMARD, (q,)) for q in range(n_q)]
    for _ in range(reps):
        gamma = float(rng.uniform(0.0, 2 * math.pi))
        theta = float(rng.uniform(*_GENERAL_THETA))
        for i, j in edges:
            ops.append((CP(-2.0 * gamma), (i, j)))
            ops.append((_rz(gamma), (i,)))
            ops.append((_rz(gamma), (j,)))
        for q in range(n_q):
            ops.append((U(-math.pi / 2, theta, math.pi / 2), (q,)))
    return layer_circuit(ops, n_q)


@dataclass(frozen=True)
class GeneratorSpec:
    family: str
    n_q: int
    seed: int = 0
    params: dict[str, Any] = field(default_factory=dict)

    def __post_init__(self) -> None:
        if self.family not in FAMILIES:
            raise ValueError(f"unknown family {self.family!r}; choose from {FAMILIES}")
        if self.n_q < 2:
            raise ValueError("n_q must be >= 2")

    def build(self) -> Circuit:
        return generate(self.family, self.n_q, seed=self.seed, **self.params)


def generate(family: str, n_q: int, seed: int = 0, **params: Any) -> Circuit:
    if family == "cp-fraction":
        return gen_cp_fraction(n_q, params.get("d"), params.get("p", 0.5), seed)
    if family == "qft":
        return gen_qft(n_q)
    if family == "qv":
        return gen_quantum_volume(n_q, seed, params.get("rounds"))
    if family == "qaoa":
        return gen_qaoa_maxcut(n_q, params.get("edge_prob", 0.5), params.get("reps", 1), seed)
    raise ValueError(f"unknown family {family!r}; choose from {FAMILIES}")
