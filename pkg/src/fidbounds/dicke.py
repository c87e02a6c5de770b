"""Divide-and-conquer Dicke state circuits and the underlying Dicke unitaries.

The Dicke unitary on n qubits maps the unary-encoded Hamming weight l,
written |0^(n-l) 1^l> with qubit 0 leftmost, to the Dicke state D(n, l) for
every l in a contractual range. It is assembled from stages of split-and-shift
gadgets acting on adjacent wires only:

    - a 2-CNOT Givens gadget that splits off amplitude for one weight, and
    - a 5-CNOT context gadget that additionally relays a shifted excitation
      across the stage (its relay branch carries a minus sign, compensated by
      the sign of the corresponding split angle).

Stage m of the cascade realizes, on the first m qubits, the amplitude split
|0^(m-l) 1^l> -> sqrt(l/m) |0^(m-l) 1^l> + sqrt((m-l)/m) |0^(m-l-1) 1^l 0>,
which is exactly the branching of the Dicke recursion on the last qubit.
"""
from __future__ import annotations

from dataclasses import dataclass
from math import acos, comb, pi, sqrt

import numpy as np

from .circuits import Circuit, Gate, GateKind


@dataclass(frozen=True)
class DickeSpec:
    n: int
    k_weight: int

    def __post_init__(self) -> None:
        if self.n < 1:
            raise ValueError("n must be >= 1")
        if not 0 <= self.k_weight <= self.n:
            raise ValueError(f"need 0 <= K <= N, got K={self.k_weight}, N={self.n}")

    @property
    def label(self) -> str:
        return f"D({self.n},{self.k_weight})"


@dataclass(frozen=True)
class UnitaryRange:
    """Input-weight range [k_lo, k_hi] a Dicke unitary must handle."""

    n: int
    k_lo: int
    k_hi: int

    def __post_init__(self) -> None:
        if not 0 <= self.k_lo <= self.k_hi <= self.n:
            raise ValueError(f"invalid unitary range {self}")


@dataclass(frozen=True)
class DistributorStep:
    """One rotation of the weight distributor: theta = 2*acos(sqrt(num/den))."""

    qubit: int
    numerator: int
    denominator: int
    theta: float
    control: int | None = None


def dicke_state_vector(spec: DickeSpec):
    """Equal-amplitude superposition of all weight-K basis strings."""
    from .simulator import StateVector

    n, k = spec.n, spec.k_weight
    amps = np.zeros(2**n, dtype=complex)
    amp = 1.0 / sqrt(comb(n, k))
    for idx in range(2**n):
        if bin(idx).count("1") == k:
            amps[idx] = amp
    return StateVector(n, amps)


def weight_distribution_angles(n1: int, n2: int, k: int) -> list[DistributorStep]:
    """Rotations placing amplitude sqrt(C(n2,K-l)C(n1,l)/C(N,K)) on unary l.

    The unary chain lives on the last K qubits of the first register, head at
    qubit n1-1. The first step is an uncontrolled Ry whose fraction is
    a_0 / S_0; each later step is a CNOT-conjugated half-angle pair whose
    fraction is the suffix-sum ratio S_(j+1) / S_j, where a_l are the
    distribution terms and S_j their suffix sums.
    """
    n = n1 + n2
    if k > n:
        raise ValueError(f"K={k} exceeds N={n}")
    if k == 0:
        return []
    lo = max(0, k - n2)
    hi = min(k, n1)
    terms = {l: comb(n2, k - l) * comb(n1, l) for l in range(lo, hi + 1)}
    a = [terms.get(l, 0) for l in range(0, min(k, n1) + 1)]
    suffix = [sum(a[j:]) for j in range(len(a) + 1)]
    steps = [
        DistributorStep(
            qubit=n1 - 1,
            numerator=a[0],
            denominator=suffix[0],
            theta=2 * acos(sqrt(a[0] / suffix[0])),
        )
    ]
    for j in range(1, min(k, n1)):
        frac = suffix[j + 1] / suffix[j] if suffix[j] else 0.0
        steps.append(
            DistributorStep(
                qubit=n1 - 1 - j,
                numerator=suffix[j + 1],
                denominator=suffix[j],
                theta=2 * acos(sqrt(frac)),
                control=n1 - j,
            )
        )
    return steps


def _clamped_acos(x: float) -> float:
    return acos(min(1.0, max(-1.0, x)))


def _givens_gates(theta: float, b: int, c: int) -> list[Gate]:
    """2-CNOT gadget: (b,c)=(0,1) -> cos|01> + sin|10>, fixing |00> and |11>."""
    return [
        Gate(GateKind.H, (c,)),
        Gate(GateKind.CNOT, (c, b)),
        Gate(GateKind.RY, (b,), theta),
        Gate(GateKind.RY, (c,), theta),
        Gate(GateKind.CNOT, (c, b)),
        Gate(GateKind.H, (c,)),
    ]


def _context_gates(theta: float, a: int, b: int, c: int) -> list[Gate]:
    """5-CNOT gadget: Givens(theta) on (b,c) when a=0; when a=1 it relays
    (1,0,1) -> -(1,1,0) and fixes (1,1,1)."""
    x = (theta - pi / 2) / 2
    y = (theta + pi / 2) / 2
    gates = _givens_gates(x, b, c)
    gates += [
        Gate(GateKind.H, (b,)),
        Gate(GateKind.CNOT, (a, b)),
        Gate(GateKind.H, (b,)),
        Gate(GateKind.S, (a,)),
        Gate(GateKind.S, (a,)),
    ]
    gates += _givens_gates(y, b, c)
    return gates


def _core_gates(n: int, lo: int, hi: int, wires: list[int], mirror: bool = False) -> list[Gate]:
    """Cascade mapping unary weight l (ones at the high-index end of ``wires``,
    or the low end when mirrored) to D(n, l) for lo <= l <= hi."""
    pos = (lambda j: wires[n - 1 - j]) if mirror else (lambda j: wires[j])
    gates: list[Gate] = []
    for m in range(n, 1, -1):
        i_min = max(0, m - hi - 1)
        w_m = max(0, lo - (n - m))
        kinds: dict[int, str] = {}
        for i in range(i_min, m - 1):
            if w_m >= 2 and i >= m - w_m:
                kinds[i] = "relay"
            elif i == 0:
                kinds[i] = "split"
            elif i == i_min:
                kinds[i] = "split"
            else:
                kinds[i] = "context"
        for i in range(i_min, m - 1):
            if kinds[i] == "relay":
                gates += _givens_gates(pi / 2, pos(i), pos(i + 1))
                continue
            # relayed branches pick up one minus sign per context gadget above
            n_neg = sum(1 for j in range(i + 1, m - 1) if kinds[j] == "context")
            sign = -1.0 if n_neg % 2 else 1.0
            ell = m - 1 - i
            theta = sign * _clamped_acos(sqrt(ell / m))
            if kinds[i] == "split":
                gates += _givens_gates(theta, pos(i), pos(i + 1))
            else:
                gates += _context_gates(theta, pos(i - 1), pos(i), pos(i + 1))
    return gates


def build_dicke_unitary(r: UnitaryRange) -> Circuit:
    """Circuit mapping |0^(n-l) 1^l> to D(n, l) for every k_lo <= l <= k_hi.

    All CNOTs act on adjacent wires. The CNOT count never exceeds
    5*C(n-1,2) + 2*(n-1) - 3*C(n-k_hi-1,2) - 5*C(k_lo,2), with equality in
    the k_hi = n case used by the divide-and-conquer builder.
    """
    c = Circuit(r.n, label=f"U{r.n}[{r.k_lo},{r.k_hi}]")
    wires = list(range(r.n))
    if r.k_lo == 0:
        c.extend(_core_gates(r.n, 0, r.k_hi, wires))
        return c
    # Guaranteed input ones are cheapest handled in the complement picture:
    # conjugating by X turns weight l into n-l, so the inner cascade only
    # needs weights up to n-k_lo.
    for q in wires:
        c.x(q)
    c.extend(_core_gates(r.n, r.n - r.k_hi, r.n - r.k_lo, wires, mirror=True))
    for q in wires:
        c.x(q)
    return c


def expected_dicke_cnots(spec: DickeSpec) -> int:
    """Closed-form CNOT count 5K(N-K) - 3(N+K) + 5 of the split circuit."""
    n, k = spec.n, spec.k_weight
    if not 1 <= k <= n // 2:
        raise ValueError(f"count formula holds for 1 <= K <= floor(N/2), got K={k}, N={n}")
    return 5 * k * (n - k) - 3 * (n + k) + 5


def build_dicke_circuit(spec: DickeSpec) -> Circuit:
    """Divide-and-conquer preparation of D(N, K) from |0...0>.

    Pipeline: weight distributor on the first register, 2K-1 entangling
    CNOTs (distributor plus cross-register copies), bit-flip layers, and two
    parallel Dicke unitaries, one per register half. Targets with K > N/2 are
    built as the complement circuit with the trailing X layer omitted.
    """
    n, k = spec.n, spec.k_weight
    c = Circuit(n, label=spec.label)
    if k == 0:
        return c
    if k == n:
        for q in range(n):
            c.x(q)
        return c
    if k > n // 2:
        complement = build_dicke_circuit(DickeSpec(n, n - k))
        c.extend(complement.gates[:-n])
        return c

    n1, n2 = n // 2, n - n // 2
    for step in weight_distribution_angles(n1, n2, k):
        if step.control is None:
            c.ry(step.qubit, step.theta)
        else:
            c.ry(step.qubit, step.theta / 2)
            c.cnot(step.control, step.qubit)
            c.ry(step.qubit, -step.theta / 2)
    # second register: N2-K preset ones, then copies of the unary chain
    for i in range(n2 - k):
        c.x(n1 + i)
    for j in range(1, k + 1):
        c.cnot(n1 - j, n1 + n2 - k - 1 + j)
    # parallel Dicke unitaries; the first register's conjugation X layers
    # cancel against the unary chain orientation and are not emitted
    c.extend(_core_gates(n1, 0, k, list(range(n1))))
    for q in range(n1):
        c.x(q)
    for q in range(n1, n):
        c.x(q)
    c.extend(_core_gates(n2, 0, k, list(range(n1, n))))
    for q in range(n1, n):
        c.x(q)
    for q in range(n):
        c.x(q)
    return c
