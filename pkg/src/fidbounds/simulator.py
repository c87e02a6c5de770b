"""Seeded statevector simulation, shot sampling, depolarizing trajectories,
and an exact density-matrix oracle at small width.

Sampling uses the counter-based Philox generator, so shot sequences are
bitwise reproducible across runs and platforms for a given seed.
"""
from __future__ import annotations

import hashlib
from dataclasses import dataclass
from math import sqrt

import numpy as np

from .circuits import Circuit, Gate, GateKind, MeasurementBasis

STATEVECTOR_MAX_WIDTH = 26
DENSITY_MAX_WIDTH = 8

_H = np.array([[1, 1], [1, -1]], dtype=complex) / sqrt(2)
_X = np.array([[0, 1], [1, 0]], dtype=complex)
_Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
_Z = np.diag([1.0, -1.0]).astype(complex)
_S = np.diag([1.0, 1j])
_SDG = np.diag([1.0, -1j])
_PAULI_1Q = (_X, _Y, _Z)


def _ry(theta: float) -> np.ndarray:
    c, s = np.cos(theta / 2), np.sin(theta / 2)
    return np.array([[c, -s], [s, c]], dtype=complex)


def gate_matrix_1q(gate: Gate) -> np.ndarray:
    if gate.kind is GateKind.X:
        return _X
    if gate.kind is GateKind.H:
        return _H
    if gate.kind is GateKind.S:
        return _S
    if gate.kind is GateKind.SDG:
        return _SDG
    if gate.kind is GateKind.RY:
        return _ry(gate.theta)
    raise ValueError(f"not a single-qubit gate: {gate}")


@dataclass
class StateVector:
    """2**width complex amplitudes; index bit for qubit q is bit (width-1-q)."""

    width: int
    amplitudes: np.ndarray

    @classmethod
    def zero(cls, width: int) -> "StateVector":
        amps = np.zeros(2**width, dtype=complex)
        amps[0] = 1.0
        return cls(width, amps)

    def probabilities(self) -> np.ndarray:
        return np.abs(self.amplitudes) ** 2

    def norm(self) -> float:
        return float(np.linalg.norm(self.amplitudes))


@dataclass(frozen=True)
class NoiseSpec:
    """Depolarizing error probabilities per single- and two-qubit gate.

    The defaults are generic benchmark settings, not calibrated to any
    hardware; use :meth:`noiseless` for exact simulation.
    """

    p1: float = 1e-4
    p2: float = 2e-3

    def __post_init__(self) -> None:
        for p in (self.p1, self.p2):
            if not 0.0 <= p <= 1.0:
                raise ValueError(f"depolarizing probability out of [0,1]: {p}")

    @classmethod
    def noiseless(cls) -> "NoiseSpec":
        return cls(p1=0.0, p2=0.0)

    @property
    def is_noiseless(self) -> bool:
        return self.p1 == 0.0 and self.p2 == 0.0


@dataclass
class ShotTable:
    """Measurement outcomes for one circuit in one basis, with seed provenance."""

    basis: MeasurementBasis
    outcomes: list[str]
    seed: int
    circuit_label: str = ""

    def __post_init__(self) -> None:
        if not self.outcomes:
            return
        n = len(self.outcomes[0])
        if any(len(o) != n for o in self.outcomes):
            raise ValueError("outcome strings have inconsistent length")

    def __len__(self) -> int:
        return len(self.outcomes)


def derive_seed(master: int, *parts) -> int:
    """Stable 64-bit stream seed from a master seed and context labels."""
    text = "|".join([str(int(master))] + [str(p) for p in parts])
    digest = hashlib.sha256(text.encode()).digest()
    return int.from_bytes(digest[:8], "little")


def _rng(seed: int) -> np.random.Generator:
    return np.random.Generator(np.random.Philox(key=seed & (2**64 - 1)))


def _apply_1q(amps: np.ndarray, width: int, q: int, m: np.ndarray) -> np.ndarray:
    # view as (left, 2, right) around the target axis; mutate in place where
    # the gate structure allows, otherwise one contiguous copy
    psi = amps.reshape(2**q, 2, -1)
    p0, p1 = psi[:, 0, :], psi[:, 1, :]
    if m[0, 1] == 0 and m[1, 0] == 0:  # diagonal (S, Sdg)
        if m[0, 0] != 1:
            p0 *= m[0, 0]
        if m[1, 1] != 1:
            p1 *= m[1, 1]
        return amps
    if m[0, 0] == 0 and m[1, 1] == 0:  # antidiagonal (X, Y)
        tmp = p0.copy()
        if m[0, 1] == 1:
            p0[...] = p1
        else:
            np.multiply(p1, m[0, 1], out=p0)
        if m[1, 0] == 1:
            p1[...] = tmp
        else:
            np.multiply(tmp, m[1, 0], out=p1)
        return amps
    out = np.empty_like(psi)
    o0, o1 = out[:, 0, :], out[:, 1, :]
    if m[0, 0] == m[0, 1] == m[1, 0] == -m[1, 1]:  # Hadamard: c*(p0+p1, p0-p1)
        np.add(p0, p1, out=o0)
        o0 *= m[0, 0]
        np.subtract(p0, p1, out=o1)
        o1 *= m[0, 0]
        return out.reshape(-1)
    np.multiply(p0, m[0, 0], out=o0)
    o0 += m[0, 1] * p1
    np.multiply(p0, m[1, 0], out=o1)
    o1 += m[1, 1] * p1
    return out.reshape(-1)


def _controlled_view(amps: np.ndarray, width: int, control: int, target: int):
    """Two views (t=0, t=1) of the control=1 subspace; writable in place."""
    if control < target:
        psi = amps.reshape(2**control, 2, 2 ** (target - control - 1), 2, -1)
        return psi[:, 1, :, 0, :], psi[:, 1, :, 1, :]
    psi = amps.reshape(2**target, 2, 2 ** (control - target - 1), 2, -1)
    return psi[:, 0, :, 1, :], psi[:, 1, :, 1, :]


def _apply_cnot_inplace(amps: np.ndarray, width: int, control: int, target: int) -> np.ndarray:
    t0, t1 = _controlled_view(amps, width, control, target)
    tmp = t0.copy()
    t0[...] = t1
    t1[...] = tmp
    return amps


def _apply_cry_inplace(amps: np.ndarray, width: int, control: int, target: int, theta: float) -> np.ndarray:
    t0, t1 = _controlled_view(amps, width, control, target)
    m = _ry(theta)
    new0 = m[0, 0] * t0 + m[0, 1] * t1
    t1[...] = m[1, 0] * t0 + m[1, 1] * t1
    t0[...] = new0
    return amps


def _apply_gate_mut(amps: np.ndarray, width: int, gate: Gate) -> np.ndarray:
    """Hot-loop variant: two-qubit gates mutate ``amps`` in place."""
    if gate.kind is GateKind.CNOT:
        return _apply_cnot_inplace(amps, width, *gate.qubits)
    if gate.kind is GateKind.CRY:
        return _apply_cry_inplace(amps, width, *gate.qubits, gate.theta)
    return _apply_1q(amps, width, gate.qubits[0], gate_matrix_1q(gate))


def apply_gate(amps: np.ndarray, width: int, gate: Gate) -> np.ndarray:
    """Apply one gate, returning a fresh amplitude array (input untouched)."""
    return _apply_gate_mut(amps.copy(), width, gate)


def run(circuit: Circuit) -> StateVector:
    """Apply the circuit to |0...0>. Norm is preserved to 1e-9."""
    if circuit.width > STATEVECTOR_MAX_WIDTH:
        raise ValueError(f"width {circuit.width} exceeds statevector cap {STATEVECTOR_MAX_WIDTH}")
    sv = StateVector.zero(circuit.width)
    amps = sv.amplitudes
    for g in circuit.gates:
        amps = _apply_gate_mut(amps, circuit.width, g)
    sv.amplitudes = amps
    if abs(np.linalg.norm(amps) - 1.0) > 1e-9:
        raise RuntimeError("statevector norm drifted beyond 1e-9")
    return sv


def rotate_to_basis(circuit: Circuit, basis: MeasurementBasis) -> Circuit:
    """Append the basis change so computational sampling measures sigma_basis.

    Bit 0 then corresponds to eigenvalue +1 and bit 1 to -1 on every qubit.
    """
    if basis is MeasurementBasis.Z:
        return circuit.copy()
    out = circuit.copy()
    for q in range(circuit.width):
        if basis is MeasurementBasis.Y:
            out.sdg(q)
        out.h(q)
    return out


def sample(
    sv: StateVector,
    shots: int,
    seed: int,
    basis: MeasurementBasis = MeasurementBasis.Z,
    circuit_label: str = "",
) -> ShotTable:
    """Draw i.i.d. computational-basis shots from |amplitude|^2."""
    if shots < 1:
        raise ValueError("shots must be >= 1")
    probs = sv.probabilities()
    cum = np.cumsum(probs)
    cum[-1] = max(cum[-1], 1.0)
    u = _rng(seed).random(shots)
    idx = np.searchsorted(cum, u, side="right")
    outcomes = [format(int(i), f"0{sv.width}b") for i in idx]
    return ShotTable(basis=basis, outcomes=outcomes, seed=seed, circuit_label=circuit_label)


def run_trajectory(circuit: Circuit, noise: NoiseSpec, seed: int) -> StateVector:
    """One Monte-Carlo unraveling of the per-gate depolarizing channel.

    After each gate, with probability p1 (p2 for two-qubit gates) a uniformly
    random non-identity Pauli is inserted on the touched qubit(s); averaging
    projector overlaps over trajectories reproduces density_oracle.
    """
    if circuit.width > STATEVECTOR_MAX_WIDTH:
        raise ValueError(f"width {circuit.width} exceeds statevector cap {STATEVECTOR_MAX_WIDTH}")
    rng = _rng(seed)
    amps = StateVector.zero(circuit.width).amplitudes
    for g in circuit.gates:
        amps = _apply_gate_mut(amps, circuit.width, g)
        p = noise.p2 if g.kind.n_qubits == 2 else noise.p1
        if p > 0.0 and rng.random() < p:
            if g.kind.n_qubits == 1:
                pauli = _PAULI_1Q[rng.integers(3)]
                amps = _apply_1q(amps, circuit.width, g.qubits[0], pauli)
            else:
                k = int(rng.integers(15)) + 1  # 1..15 excludes identity-identity
                for q, p_idx in zip(g.qubits, (k // 4, k % 4)):
                    if p_idx:
                        amps = _apply_1q(amps, circuit.width, q, _PAULI_1Q[p_idx - 1])
    return StateVector(circuit.width, amps)


@dataclass
class DensityMatrix:
    width: int
    entries: np.ndarray

    @classmethod
    def pure(cls, sv: StateVector) -> "DensityMatrix":
        return cls(sv.width, np.outer(sv.amplitudes, sv.amplitudes.conj()))

    @classmethod
    def maximally_mixed(cls, width: int) -> "DensityMatrix":
        dim = 2**width
        return cls(width, np.eye(dim, dtype=complex) / dim)

    def validate(self, psd_tol: float = 1e-8) -> None:
        rho = self.entries
        if np.abs(rho - rho.conj().T).max() > 1e-10:
            raise ValueError("density matrix not Hermitian to 1e-10")
        if abs(np.trace(rho).real - 1.0) > 1e-10:
            raise ValueError("density matrix trace != 1")
        if np.linalg.eigvalsh(rho).min() < -psd_tol:
            raise ValueError("density matrix not positive semi-definite")


def _embed(width: int, qubits: tuple[int, ...], m: np.ndarray) -> np.ndarray:
    """Full 2^width matrix for an operator on the given qubits."""
    dim = 2**width
    tensor = np.eye(dim, dtype=complex).reshape([2] * width + [dim])
    if len(qubits) == 1:
        tensor = np.moveaxis(tensor, qubits[0], 0)
        tensor = np.tensordot(m, tensor, axes=(1, 0))
        tensor = np.moveaxis(tensor, 0, qubits[0])
    else:
        tensor = np.moveaxis(tensor, qubits, (0, 1))
        shape = tensor.shape
        tensor = (m @ tensor.reshape(4, -1)).reshape(shape)
        tensor = np.moveaxis(tensor, (0, 1), qubits)
    return tensor.reshape(dim, dim)


def _gate_full_matrix(width: int, gate: Gate) -> np.ndarray:
    if gate.kind is GateKind.CNOT:
        m = np.eye(4, dtype=complex)
        m[2:, 2:] = _X
        return _embed(width, gate.qubits, m)
    if gate.kind is GateKind.CRY:
        m = np.eye(4, dtype=complex)
        m[2:, 2:] = _ry(gate.theta)
        return _embed(width, gate.qubits, m)
    return _embed(width, gate.qubits, gate_matrix_1q(gate))


def _depolarize(rho: np.ndarray, width: int, qubits: tuple[int, ...], p: float) -> np.ndarray:
    """rho -> (1-p) rho + p/(4^k - 1) sum over non-identity Paulis P of P rho P.

    Matches the trajectory unraveling exactly: the Pauli insertion happens with
    probability p and is uniform over the 4^k - 1 non-identity options.
    """
    if p == 0.0:
        return rho
    paulis = [np.eye(2, dtype=complex), _X, _Y, _Z]
    acc = np.zeros_like(rho)
    n_opts = 4 ** len(qubits) - 1
    for k in range(1, n_opts + 1):
        if len(qubits) == 1:
            m = paulis[k]
        else:
            m = np.kron(paulis[k // 4], paulis[k % 4])
        full = _embed(width, qubits, m)
        acc += full @ rho @ full.conj().T
    return (1 - p) * rho + (p / n_opts) * acc


def density_oracle(circuit: Circuit, noise: NoiseSpec) -> DensityMatrix:
    """Exact channel evolution: unitary conjugation per gate, then the
    depolarizing channel on the touched qubits."""
    if circuit.width > DENSITY_MAX_WIDTH:
        raise ValueError(f"width {circuit.width} exceeds density cap {DENSITY_MAX_WIDTH}")
    dim = 2**circuit.width
    rho = np.zeros((dim, dim), dtype=complex)
    rho[0, 0] = 1.0
    for g in circuit.gates:
        u = _gate_full_matrix(circuit.width, g)
        rho = u @ rho @ u.conj().T
        p = noise.p2 if g.kind.n_qubits == 2 else noise.p1
        rho = _depolarize(rho, circuit.width, g.qubits, p)
    return DensityMatrix(circuit.width, rho)


def exact_fidelity(rho: DensityMatrix, target: StateVector) -> float:
    """<psi| rho |psi> for a pure target."""
    if rho.width != target.width:
        raise ValueError("width mismatch between density matrix and target")
    psi = target.amplitudes
    val = np.vdot(psi, rho.entries @ psi)
    if abs(val.imag) > 1e-10:
        raise RuntimeError(f"fidelity has imaginary part {val.imag}")
    return float(val.real)


def exact_msp(rho: DensityMatrix, target: StateVector, amp_tol: float = 1e-12) -> float:
    """Probability mass of rho, in the Z basis, on the target's support."""
    if rho.width != target.width:
        raise ValueError("width mismatch between density matrix and target")
    support = np.abs(target.amplitudes) > amp_tol
    return float(np.real(np.diag(rho.entries))[support].sum())


def state_fidelity(a: StateVector, b: StateVector) -> float:
    """|<a|b>|^2 between pure states."""
    if a.width != b.width:
        raise ValueError("width mismatch")
    return float(abs(np.vdot(a.amplitudes, b.amplitudes)) ** 2)
