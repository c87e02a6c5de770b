"""fidbounds: entangled-state preparation circuits and few-setting fidelity bounds.

Builds Dicke and GHZ preparation circuits, simulates them (noiseless,
depolarizing trajectories, or exact density matrices at small width), and
estimates fidelity lower bounds and measurement-success-probability upper
bounds from sampled shots in at most three measurement settings.
"""

from .circuits import Circuit, Gate, GateKind, MeasurementBasis, cnot_count, decompose_cry, depth, to_qasm
from .dicke import (
    DickeSpec,
    UnitaryRange,
    build_dicke_circuit,
    build_dicke_unitary,
    dicke_state_vector,
    expected_dicke_cnots,
    weight_distribution_angles,
)
from .ghz import GhzSpec, build_ghz, ghz_state_vector
from .simulator import (
    DensityMatrix,
    NoiseSpec,
    ShotTable,
    StateVector,
    density_oracle,
    derive_seed,
    exact_fidelity,
    exact_msp,
    rotate_to_basis,
    run,
    run_trajectory,
    sample,
    state_fidelity,
)
from .bounds import (
    BoundReport,
    DickeQuantumNumbers,
    dicke_lower_bound,
    exact_operator_expectations,
    ghz_lower_bound,
    ghz_sgx,
    ghz_sgz,
    jsq_per_shot,
    sjz_per_shot,
    somma_sjz_per_shot,
)
from .stats import CumulativeSeries, bootstrap_ci, cumulative_series, normal_ci, spearman_perm

__version__ = "0.1.0"
