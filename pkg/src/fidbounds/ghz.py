"""Linear- and logarithmic-depth GHZ preparation circuits."""
from __future__ import annotations

from dataclasses import dataclass
from math import sqrt

import numpy as np

from .circuits import Circuit

LAYOUTS = ("linear", "logarithmic")


@dataclass(frozen=True)
class GhzSpec:
    n: int
    layout: str = "linear"

    def __post_init__(self) -> None:
        if self.n < 1:
            raise ValueError("n must be >= 1")
        if self.layout not in LAYOUTS:
            raise ValueError(f"layout must be one of {LAYOUTS}")

    @property
    def label(self) -> str:
        short = "lin" if self.layout == "linear" else "log"
        return f"GHZ({self.n},{short})"


def ghz_state_vector(n: int):
    """(|0...0> + |1...1>)/sqrt(2)."""
    from .simulator import StateVector

    if n < 1:
        raise ValueError("n must be >= 1")
    amps = np.zeros(2**n, dtype=complex)
    amps[0] = amps[-1] = 1 / sqrt(2)
    return StateVector(n, amps)


def build_ghz(spec: GhzSpec) -> Circuit:
    """H on qubit 0 followed by N-1 CNOTs.

    The linear layout chains CNOT(i, i+1) for depth N; the logarithmic layout
    doubles the prepared block each layer (CNOT(i, i + 2^(t-1)) from every
    already-reached qubit i) for depth 1 + ceil(log2 N).
    """
    c = Circuit(spec.n, label=spec.label)
    c.h(0)
    if spec.layout == "linear":
        for i in range(spec.n - 1):
            c.cnot(i, i + 1)
        return c
    stride = 1
    while stride < spec.n:
        for i in range(stride):
            if i + stride < spec.n:
                c.cnot(i, i + stride)
        stride *= 2
    return c
