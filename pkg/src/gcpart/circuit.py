"""Circuit IR: two gate kinds, ASAP layering, diagonality classes and a line format."""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

DIAGONAL_TOL = 1e-9


class CircuitError(ValueError):
    """Raised for malformed circuits or circuit files."""


class Diagonality(enum.Enum):
    DIAGONAL = "diagonal"
    ANTI_DIAGONAL = "anti-diagonal"
    GENERAL = "general"


@dataclass(frozen=True)
class CP:
    """Controlled-phase gate. Symmetric in its two qubits."""

    angle: float


@dataclass(frozen=True)
class U:
    """General single-qubit rotation U(phi, theta, lambda)."""

    phi: float
    theta: float
    lam: float

    def matrix(self) -> np.ndarray:
        c, s = math.cos(self.theta / 2), math.sin(self.theta / 2)
        return np.array(
            [
                [c, -np.exp(1j * self.lam) * s],
                [np.exp(1j * self.phi) * s, np.exp(1j * (self.phi + self.lam)) * c],
            ]
        )


GateKind = CP | U

HADAMARD = U(0.0, math.pi / 2, math.pi)


@dataclass(frozen=True)
class Gate:
    kind: GateKind
    qubits: tuple[int, ...]
    layer: int = -1

    @property
    def is_two_qubit(self) -> bool:
        return len(self.qubits) == 2


@dataclass(frozen=True)
class Circuit:
    """A layered circuit. ``gates`` keeps program order; every gate has a layer."""

    n_q: int
    gates: tuple[Gate, ...]
    depth: int

    @property
    def two_qubit_gates(self) -> list[Gate]:
        return [g for g in self.gates if g.is_two_qubit]

    @property
    def n_two_qubit(self) -> int:
        return sum(1 for g in self.gates if g.is_two_qubit)

    def layers(self) -> list[list[Gate]]:
        out: list[list[Gate]] = [[] for _ in range(self.depth)]
        for g in self.gates:
            out[g.layer].append(g)
        return out

    def timeline(self, qubit: int) -> list[Gate]:
        """Gates touching ``qubit`` in program order."""
        return [g for g in self.gates if qubit in g.qubits]


def classify_single_qubit(gate: U, tol: float = DIAGONAL_TOL) -> Diagonality:
    m = np.abs(gate.matrix())
    if m[0, 1] <= tol and m[1, 0] <= tol:
        return Diagonality.DIAGONAL
    if m[0, 0] <= tol and m[1, 1] <= tol:
        return Diagonality.ANTI_DIAGONAL
    return Diagonality.GENERAL


def _check_gate(kind: GateKind, qubits: Sequence[int], n_q: int) -> None:
    for q in qubits:
        if not 0 <= q < n_q:
            raise CircuitError(f"qubit index {q} out of range for {n_q} qubits")
    if isinstance(kind, CP):
        if len(qubits) != 2 or qubits[0] == qubits[1]:
            raise CircuitError(f"cp needs two distinct qubits, got {tuple(qubits)}")
        angles: tuple[float, ...] = (kind.angle,)
    elif isinstance(kind, U):
        if len(qubits) != 1:
            raise CircuitError(f"u acts on one qubit, got {tuple(qubits)}")
        angles = (kind.phi, kind.theta, kind.lam)
    else:
        raise CircuitError(f"unsupported gate kind {kind!r}")
    if not all(math.isfinite(a) for a in angles):
        raise CircuitError(f"non-finite angle in {kind!r}")


def layer_circuit(gates: Iterable[tuple[GateKind, Sequence[int]] | Gate], n_q: int) -> Circuit:
    """Place each gate in the earliest layer after every earlier gate on its qubits."""
    if n_q < 0:
        raise CircuitError("negative qubit count")
    frontier = [0] * n_q
    placed: list[Gate] = []
    for item in gates:
        if isinstance(item, Gate):
            kind, qubits = item.kind, item.qubits
        else:
            kind, qubits = item
        qubits = tuple(int(q) for q in qubits)
        _check_gate(kind, qubits, n_q)
        layer = max(frontier[q] for q in qubits)
        for q in qubits:
            frontier[q] = layer + 1
        placed.append(Gate(kind, qubits, layer))
    depth = max(frontier, default=0)
    return Circuit(n_q, tuple(placed), depth)


def serialize_circuit(circuit: Circuit) -> str:
    lines = [f"qubits {circuit.n_q}"]
    for g in circuit.gates:
        if isinstance(g.kind, CP):
            a, b = g.qubits
            lines.append(f"cp {a} {b} {g.kind.angle!r}")
        else:
            k = g.kind
            lines.append(f"u {g.qubits[0]} {k.phi!r} {k.theta!r} {k.lam!r}")
    return "\n".join(lines) + "\n"


def parse_circuit(text: str) -> Circuit:
    n_q: int | None = None
    ops: list[tuple[GateKind, tuple[int, ...]]] = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        tok = line.split()
        try:
            if n_q is None:
                if tok[0] != "qubits" or len(tok) != 2:
                    raise CircuitError("expected 'qubits <n>' header")
                n_q = int(tok[1])
                if n_q < 0:
                    raise CircuitError("qubit count must be nonnegative")
                continue
            if tok[0] == "cp" and len(tok) == 4:
                kind: GateKind = CP(float(tok[3]))
                qubits: tuple[int, ...] = (int(tok[1]), int(tok[2]))
            elif tok[0] == "u" and len(tok) == 5:
                kind = U(float(tok[2]), float(tok[3]), float(tok[4]))
                qubits = (int(tok[1]),)
            elif tok[0] == "qubits":
                raise CircuitError("duplicate 'qubits' header")
            else:
                raise CircuitError(f"unrecognised gate line {line!r}")
            _check_gate(kind, qubits, n_q)
        except (CircuitError, ValueError) as exc:
            raise CircuitError(f"line {lineno}: {exc}") from None
        ops.append((kind, qubits))
    if n_q is None:
        raise CircuitError("line 1: missing 'qubits <n>' header")
    return layer_circuit(ops, n_q)
