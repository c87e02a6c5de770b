"""Gate/circuit intermediate representation with counting, scheduling, and QASM export.

Conventions used throughout the package:
    - Qubits are indexed 0..width-1.
    - Bitstrings are written with qubit 0 as the leftmost character, so the
      statevector amplitude index of a bitstring is ``int(bits, 2)``.
    - ``Ry(theta)`` implements exp(-i*theta*Y/2); ``CRy`` is its controlled form.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum


class GateKind(Enum):
    X = "x"
    H = "h"
    S = "s"
    SDG = "sdg"
    RY = "ry"
    CNOT = "cx"
    CRY = "cry"

    @property
    def n_qubits(self) -> int:
        return 2 if self in (GateKind.CNOT, GateKind.CRY) else 1

    @property
    def has_angle(self) -> bool:
        return self in (GateKind.RY, GateKind.CRY)


class MeasurementBasis(Enum):
    """Single-qubit Pauli basis applied uniformly to all qubits of a circuit."""

    X = "X"
    Y = "Y"
    Z = "Z"


@dataclass(frozen=True)
class Gate:
    kind: GateKind
    qubits: tuple[int, ...]
    theta: float | None = None

    def __post_init__(self) -> None:
        if len(self.qubits) != self.kind.n_qubits:
            raise ValueError(f"{self.kind.name} acts on {self.kind.n_qubits} qubit(s), got {self.qubits}")
        if len(set(self.qubits)) != len(self.qubits):
            raise ValueError(f"duplicate qubit indices in {self.qubits}")
        if any(q < 0 for q in self.qubits):
            raise ValueError(f"negative qubit index in {self.qubits}")
        if self.kind.has_angle:
            if self.theta is None or not math.isfinite(self.theta):
                raise ValueError(f"{self.kind.name} needs a finite angle, got {self.theta}")
        elif self.theta is not None:
            raise ValueError(f"{self.kind.name} takes no angle")


class Circuit:
    """Ordered gate list over a fixed-width qubit register.

    Built once via the append methods, then treated as immutable; every
    operation on circuits in this package is pure.
    """

    def __init__(self, width: int, label: str = ""):
        if width < 1:
            raise ValueError("circuit width must be >= 1")
        self.width = width
        self.label = label
        self.gates: list[Gate] = []

    def add(self, gate: Gate) -> "Circuit":
        if any(q >= self.width for q in gate.qubits):
            raise ValueError(f"gate {gate} out of range for width {self.width}")
        self.gates.append(gate)
        return self

    def x(self, q: int) -> "Circuit":
        return self.add(Gate(GateKind.X, (q,)))

    def h(self, q: int) -> "Circuit":
        return self.add(Gate(GateKind.H, (q,)))

    def s(self, q: int) -> "Circuit":
        return self.add(Gate(GateKind.S, (q,)))

    def sdg(self, q: int) -> "Circuit":
        return self.add(Gate(GateKind.SDG, (q,)))

    def ry(self, q: int, theta: float) -> "Circuit":
        return self.add(Gate(GateKind.RY, (q,), float(theta)))

    def cnot(self, control: int, target: int) -> "Circuit":
        return self.add(Gate(GateKind.CNOT, (control, target)))

    def cry(self, control: int, target: int, theta: float) -> "Circuit":
        return self.add(Gate(GateKind.CRY, (control, target), float(theta)))

    def extend(self, gates) -> "Circuit":
        for g in gates:
            self.add(g)
        return self

    def copy(self, label: str | None = None) -> "Circuit":
        c = Circuit(self.width, self.label if label is None else label)
        c.gates = list(self.gates)
        return c

    def __len__(self) -> int:
        return len(self.gates)

    def __repr__(self) -> str:
        return f"Circuit(width={self.width}, gates={len(self.gates)}, label={self.label!r})"


def cnot_count(circuit: Circuit) -> int:
    """Two-qubit gate cost: CNOTs, plus 2 per undecomposed CRy."""
    n = 0
    for g in circuit.gates:
        if g.kind is GateKind.CNOT:
            n += 1
        elif g.kind is GateKind.CRY:
            n += 2
    return n


def depth(circuit: Circuit) -> int:
    """Number of layers under greedy as-soon-as-possible scheduling.

    A gate enters the earliest layer after all earlier gates that share a
    qubit with it. The empty circuit has depth 0.
    """
    free: dict[int, int] = {}
    d = 0
    for g in circuit.gates:
        layer = 1 + max((free.get(q, 0) for q in g.qubits), default=0)
        for q in g.qubits:
            free[q] = layer
        d = max(d, layer)
    return d


def to_qasm(circuit: Circuit) -> str:
    """Serialize to OpenQASM 2.0. Angles are printed with 17 significant digits."""
    lines = ['OPENQASM 2.0;', 'include "qelib1.inc";', f"qreg q[{circuit.width}];"]
    for g in circuit.gates:
        if g.kind is GateKind.CRY:
            raise ValueError("CRy has no direct QASM form; run decompose_cry first")
        if g.kind is GateKind.RY:
            lines.append(f"ry({g.theta:.17g}) q[{g.qubits[0]}];")
        elif g.kind is GateKind.CNOT:
            lines.append(f"cx q[{g.qubits[0]}],q[{g.qubits[1]}];")
        else:
            lines.append(f"{g.kind.value} q[{g.qubits[0]}];")
    return "\n".join(lines) + "\n"


def decompose_cry(circuit: Circuit) -> Circuit:
    """Rewrite each CRy(theta) as Ry(theta/2) . CX . Ry(-theta/2) . CX on the target."""
    out = Circuit(circuit.width, circuit.label)
    for g in circuit.gates:
        if g.kind is GateKind.CRY:
            c, t = g.qubits
            out.ry(t, g.theta / 2)
            out.cnot(c, t)
            out.ry(t, -g.theta / 2)
            out.cnot(c, t)
        else:
            out.add(g)
    return out
