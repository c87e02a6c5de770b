"""Fidelity lower bounds and MSP estimators from shot tables, plus the exact
operator-level evaluation used as their brute-force oracle.

Dicke targets use three measurement settings (X, Y, Z): the Z-basis weight
indicator estimates the measurement success probability, and the squared
magnetizations from all three settings estimate the total angular momentum
term. GHZ targets use two settings: global X parity and adjacent ZZ parities.
Every reported quantity is a mean of i.i.d. per-shot values, which makes the
stratified bootstrap in :mod:`fidbounds.stats` applicable as-is.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping

import numpy as np

from .circuits import MeasurementBasis
from .dicke import DickeSpec
from .ghz import GhzSpec, ghz_state_vector
from .simulator import DensityMatrix, ShotTable, exact_msp
from .stats import bootstrap_ci

_X = np.array([[0, 1], [1, 0]], dtype=complex)
_Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
_Z = np.diag([1.0, -1.0]).astype(complex)
_AXES = {"x": _X, "y": _Y, "z": _Z}


@dataclass(frozen=True)
class DickeQuantumNumbers:
    """Angular momentum labels of D(N, K): j = N, jz = N - 2K."""

    n: int
    k: int

    @property
    def j(self) -> int:
        return self.n

    @property
    def jz(self) -> int:
        return self.n - 2 * self.k


@dataclass
class BoundReport:
    """Point estimates and intervals for one prepared state."""

    lower_bound: float
    lb_ci_lo: float
    lb_ci_hi: float
    msp: float
    msp_ci_lo: float
    msp_ci_hi: float
    shots_per_setting: int
    sj2_term: float | None = None
    somma_lower_bound: float | None = None
    somma_ci_lo: float | None = None
    somma_ci_hi: float | None = None
    sgx: float | None = None
    sgz: float | None = None


def sjz_per_shot(outcome: str, k: int) -> float:
    """Weight indicator: 1 when the Z outcome has Hamming weight K, else 0.

    Its mean over Z shots is the measurement success probability estimator.
    """
    return 1.0 if outcome.count("1") == k else 0.0


def somma_sjz_per_shot(outcome: str, k: int, n: int) -> float:
    """Quadratic variant 1 - (m - jz)^2 / 4 with m = N - 2*weight."""
    m = n - 2 * outcome.count("1")
    jz = n - 2 * k
    return 1.0 - (m - jz) ** 2 / 4.0


def jsq_per_shot(outcome: str) -> float:
    """Squared magnetization s^2 with s = (#zeros - #ones)."""
    s = len(outcome) - 2 * outcome.count("1")
    return float(s * s)


def parity_per_shot(outcome: str) -> float:
    """+1 for an even number of ones, -1 for odd."""
    return -1.0 if outcome.count("1") % 2 else 1.0


def zz_sum_per_shot(outcome: str) -> float:
    """Sum over adjacent pairs of +1 (equal bits) / -1 (unequal bits)."""
    return float(sum(1 if outcome[i] == outcome[i + 1] else -1 for i in range(len(outcome) - 1)))


def ghz_support_per_shot(outcome: str) -> float:
    return 1.0 if outcome == "0" * len(outcome) or outcome == "1" * len(outcome) else 0.0


def _require_table(tables: Mapping[MeasurementBasis, ShotTable], basis: MeasurementBasis) -> ShotTable:
    if basis not in tables:
        raise ValueError(f"missing {basis.value}-basis shot table")
    table = tables[basis]
    if len(table) == 0:
        raise ValueError(f"empty {basis.value}-basis shot table")
    return table


def dicke_shot_matrices(
    tables: Mapping[MeasurementBasis, ShotTable], k: int, n: int
) -> dict[str, np.ndarray]:
    """Per-shot value matrices per setting; Z carries [sjz, somma, jsq]."""
    z = _require_table(tables, MeasurementBasis.Z)
    x = _require_table(tables, MeasurementBasis.X)
    y = _require_table(tables, MeasurementBasis.Y)
    z_mat = np.array(
        [[sjz_per_shot(o, k), somma_sjz_per_shot(o, k, n), jsq_per_shot(o)] for o in z.outcomes]
    )
    return {
        "X": np.array([[jsq_per_shot(o)] for o in x.outcomes]),
        "Y": np.array([[jsq_per_shot(o)] for o in y.outcomes]),
        "Z": z_mat,
    }


def dicke_sj2_term(means: dict[str, np.ndarray], n: int) -> np.ndarray:
    jsq_total = means["X"][..., 0] + means["Y"][..., 0] + means["Z"][..., 2]
    return (jsq_total - n * (n + 2)) / (4.0 * n)


def dicke_lower_bound(
    tables: Mapping[MeasurementBasis, ShotTable],
    k: int,
    n: int,
    level: float = 0.68,
    resamples: int = 1000,
    seed: int = 0,
) -> BoundReport:
    """Bound report for D(N, K) from one shot table per X/Y/Z setting."""
    mats = dicke_shot_matrices(tables, k, n)

    def lb(means):
        return means["Z"][..., 0] + dicke_sj2_term(means, n)

    def somma(means):
        return means["Z"][..., 1] + dicke_sj2_term(means, n)

    def msp(means):
        return means["Z"][..., 0]

    means = {name: m.mean(axis=0) for name, m in mats.items()}
    lb_ci = bootstrap_ci(mats, lb, level=level, resamples=resamples, seed=seed)
    somma_ci = bootstrap_ci(mats, somma, level=level, resamples=resamples, seed=seed + 1)
    msp_ci = bootstrap_ci(mats, msp, level=level, resamples=resamples, seed=seed + 2)
    return BoundReport(
        lower_bound=float(lb(means)),
        lb_ci_lo=lb_ci[0],
        lb_ci_hi=lb_ci[1],
        msp=float(msp(means)),
        msp_ci_lo=msp_ci[0],
        msp_ci_hi=msp_ci[1],
        shots_per_setting=min(len(t) for t in tables.values()),
        sj2_term=float(dicke_sj2_term(means, n)),
        somma_lower_bound=float(somma(means)),
        somma_ci_lo=somma_ci[0],
        somma_ci_hi=somma_ci[1],
    )


def ghz_sgx(x_table: ShotTable) -> float:
    """Mean global X parity."""
    if len(x_table) == 0:
        raise ValueError("empty X-basis shot table")
    return float(np.mean([parity_per_shot(o) for o in x_table.outcomes]))


def ghz_sgz(z_table: ShotTable) -> float:
    """Sum of mean adjacent ZZ parities."""
    if len(z_table) == 0:
        raise ValueError("empty Z-basis shot table")
    if len(z_table.outcomes[0]) < 2:
        raise ValueError("ZZ parities need at least 2 qubits")
    return float(np.mean([zz_sum_per_shot(o) for o in z_table.outcomes]))


def ghz_shot_matrices(x_table: ShotTable, z_table: ShotTable) -> dict[str, np.ndarray]:
    return {
        "X": np.array([[parity_per_shot(o)] for o in x_table.outcomes]),
        "Z": np.array([[zz_sum_per_shot(o), ghz_support_per_shot(o)] for o in z_table.outcomes]),
    }


def ghz_lower_bound(
    x_table: ShotTable,
    z_table: ShotTable,
    n: int,
    level: float = 0.68,
    resamples: int = 1000,
    seed: int = 0,
) -> BoundReport:
    """Bound report for GHZ(N) from X- and Z-basis shot tables."""
    if x_table is None or z_table is None:
        raise ValueError("both X and Z shot tables are required")
    if len(x_table) == 0 or len(z_table) == 0:
        raise ValueError("shot tables must be nonempty")
    if n < 2:
        raise ValueError("GHZ bound needs N >= 2")
    mats = ghz_shot_matrices(x_table, z_table)

    def lb(means):
        return 0.5 * (means["X"][..., 0] + means["Z"][..., 0] - (n - 2))

    def msp(means):
        return means["Z"][..., 1]

    means = {name: m.mean(axis=0) for name, m in mats.items()}
    lb_ci = bootstrap_ci(mats, lb, level=level, resamples=resamples, seed=seed)
    msp_ci = bootstrap_ci(mats, msp, level=level, resamples=resamples, seed=seed + 2)
    return BoundReport(
        lower_bound=float(lb(means)),
        lb_ci_lo=lb_ci[0],
        lb_ci_hi=lb_ci[1],
        msp=float(msp(means)),
        msp_ci_lo=msp_ci[0],
        msp_ci_hi=msp_ci[1],
        shots_per_setting=min(len(x_table), len(z_table)),
        sgx=float(means["X"][0]),
        sgz=float(means["Z"][0]),
    )


# ---------------------------------------------------------------------------
# explicit operator matrices (the brute-force oracle, width <= 8)


def pauli_on(n: int, q: int, axis: str) -> np.ndarray:
    m = np.eye(1, dtype=complex)
    for i in range(n):
        m = np.kron(m, _AXES[axis] if i == q else np.eye(2, dtype=complex))
    return m


def j_operator(n: int, axis: str) -> np.ndarray:
    """J_axis = sum_i sigma_axis^(i)."""
    dim = 2**n
    total = np.zeros((dim, dim), dtype=complex)
    for q in range(n):
        total += pauli_on(n, q, axis)
    return total


def j_squared_operator(n: int) -> np.ndarray:
    total = np.zeros((2**n, 2**n), dtype=complex)
    for axis in "xyz":
        jt = j_operator(n, axis)
        total += jt @ jt
    return total


def weight_projector(n: int, k: int) -> np.ndarray:
    """Indicator of Hamming weight K in the computational basis (the sharp
    z-magnetization selector; its trace against rho is the MSP)."""
    diag = np.array([1.0 if bin(i).count("1") == k else 0.0 for i in range(2**n)])
    return np.diag(diag).astype(complex)


def somma_sjz_operator(n: int, k: int) -> np.ndarray:
    jz = j_operator(n, "z")
    shift = DickeQuantumNumbers(n, k).jz * np.eye(2**n)
    return np.eye(2**n) - 0.25 * (jz - shift) @ (jz - shift)


def sj2_operator(n: int) -> np.ndarray:
    return (j_squared_operator(n) - n * (n + 2) * np.eye(2**n)) / (4.0 * n)


def dicke_bound_operator(n: int, k: int) -> np.ndarray:
    return weight_projector(n, k) + sj2_operator(n)


def ghz_sgx_operator(n: int) -> np.ndarray:
    m = np.eye(1, dtype=complex)
    for _ in range(n):
        m = np.kron(m, _X)
    return m


def ghz_sgz_operator(n: int) -> np.ndarray:
    total = np.zeros((2**n, 2**n), dtype=complex)
    for i in range(n - 1):
        total += pauli_on(n, i, "z") @ pauli_on(n, i + 1, "z")
    return total


def ghz_witness_operator(n: int) -> np.ndarray:
    return 0.5 * (ghz_sgx_operator(n) + ghz_sgz_operator(n) - (n - 2) * np.eye(2**n))


def _real_trace(op: np.ndarray, rho: np.ndarray) -> float:
    val = np.trace(op @ rho)
    if abs(val.imag) > 1e-9:
        raise RuntimeError(f"expectation has imaginary part {val.imag}")
    return float(val.real)


def exact_operator_expectations(rho: DensityMatrix, target: DickeSpec | GhzSpec) -> BoundReport:
    """Evaluate every quantity exactly from rho via explicit operator traces.

    Intervals degenerate to the point value; this is the oracle the
    shot-based estimators are tested against.
    """
    n = rho.width
    if isinstance(target, DickeSpec):
        if target.n != n:
            raise ValueError("width mismatch")
        k = target.k_weight
        msp = _real_trace(weight_projector(n, k), rho.entries)
        sj2 = _real_trace(sj2_operator(n), rho.entries)
        somma = _real_trace(somma_sjz_operator(n, k), rho.entries) + sj2
        lb = msp + sj2
        return BoundReport(
            lower_bound=lb,
            lb_ci_lo=lb,
            lb_ci_hi=lb,
            msp=msp,
            msp_ci_lo=msp,
            msp_ci_hi=msp,
            shots_per_setting=0,
            sj2_term=sj2,
            somma_lower_bound=somma,
            somma_ci_lo=somma,
            somma_ci_hi=somma,
        )
    if isinstance(target, GhzSpec):
        if target.n != n:
            raise ValueError("width mismatch")
        sgx = _real_trace(ghz_sgx_operator(n), rho.entries)
        sgz = _real_trace(ghz_sgz_operator(n), rho.entries)
        lb = 0.5 * (sgx + sgz - (n - 2))
        msp = exact_msp(rho, ghz_state_vector(n))
        return BoundReport(
            lower_bound=lb,
            lb_ci_lo=lb,
            lb_ci_hi=lb,
            msp=msp,
            msp_ci_lo=msp,
            msp_ci_hi=msp,
            shots_per_setting=0,
            sgx=sgx,
            sgz=sgz,
        )
    raise TypeError(f"unsupported target spec: {target!r}")
