from itertools import product
from math import comb, sqrt

import numpy as np
import pytest

from fidbounds.bounds import (
    BoundReport,
    DickeQuantumNumbers,
    dicke_bound_operator,
    dicke_lower_bound,
    exact_operator_expectations,
    ghz_lower_bound,
    ghz_sgx,
    ghz_sgz,
    ghz_sgx_operator,
    ghz_sgz_operator,
    ghz_witness_operator,
    j_operator,
    j_squared_operator,
    jsq_per_shot,
    parity_per_shot,
    sjz_per_shot,
    somma_sjz_operator,
    somma_sjz_per_shot,
    weight_projector,
    zz_sum_per_shot,
)
from fidbounds.circuits import MeasurementBasis
from fidbounds.dicke import DickeSpec, build_dicke_circuit, dicke_state_vector
from fidbounds.ghz import GhzSpec, build_ghz, ghz_state_vector
from fidbounds.simulator import (
    DensityMatrix,
    NoiseSpec,
    ShotTable,
    density_oracle,
    exact_fidelity,
    exact_msp,
    rotate_to_basis,
    run,
    sample,
)


def tables_from_state(circuit, bases, shots, seed):
    return {
        b: sample(run(rotate_to_basis(circuit, b)), shots, seed + i, b, circuit.label)
        for i, b in enumerate(bases)
    }


class TestPerShot:
    def test_sjz(self):
        assert sjz_per_shot("0101", 2) == 1.0
        assert sjz_per_shot("1101", 2) == 0.0

    def test_sjz_mean_on_noiseless_dicke(self):
        table = sample(run(build_dicke_circuit(DickeSpec(6, 3))), 500, seed=2)
        assert np.mean([sjz_per_shot(o, 3) for o in table.outcomes]) == 1.0

    def test_somma_values(self):
        assert somma_sjz_per_shot("0110", 2, 4) == 1.0
        assert somma_sjz_per_shot("0111", 2, 4) == 0.0  # weight off by one
        assert somma_sjz_per_shot("11110", 2, 5) == -3.0

    def test_jsq(self):
        assert jsq_per_shot("0000") == 16.0
        assert jsq_per_shot("0101") == 0.0

    def test_jsq_z_on_dicke_eigenstate(self):
        table = sample(run(build_dicke_circuit(DickeSpec(5, 1))), 200, seed=4)
        values = {jsq_per_shot(o) for o in table.outcomes}
        assert values == {float((5 - 2 * 1) ** 2)}

    def test_parity_and_zz(self):
        assert parity_per_shot("0011") == 1.0
        assert parity_per_shot("0111") == -1.0
        assert zz_sum_per_shot("0101") == -3.0
        assert zz_sum_per_shot("0000") == 3.0

    @pytest.mark.parametrize("n", range(1, 9))
    def test_improved_dominates_somma_pointwise(self, n):
        # indicator >= 1 - (Delta^2)/4 for every outcome since Delta is even
        for k in range(n + 1):
            for bits in product("01", repeat=n):
                outcome = "".join(bits)
                assert sjz_per_shot(outcome, k) >= somma_sjz_per_shot(outcome, k, n)


class TestOperators:
    @pytest.mark.parametrize("n,k", [(2, 1), (3, 1), (4, 2), (5, 2), (6, 3)])
    def test_angular_momentum_eigenvalues(self, n, k):
        psi = dicke_state_vector(DickeSpec(n, k)).amplitudes
        j2 = j_squared_operator(n)
        jz = j_operator(n, "z")
        assert np.abs(j2 @ psi - n * (n + 2) * psi).max() < 1e-9
        assert np.abs(jz @ psi - (n - 2 * k) * psi).max() < 1e-9

    def test_quantum_numbers(self):
        q = DickeQuantumNumbers(9, 3)
        assert q.j == 9 and q.jz == 3

    @pytest.mark.parametrize("n", range(2, 7))
    def test_weight_projector_equals_product_formula(self, n):
        # independent oracle: product over jz' != jz of (Jz - jz')/(jz - jz')
        k = n // 2
        jz = n - 2 * k
        jz_op = j_operator(n, "z").real
        prod = np.eye(2**n)
        for kp in range(n + 1):
            jzp = n - 2 * kp
            if jzp == jz:
                continue
            prod = prod @ (jz_op - jzp * np.eye(2**n)) / (jz - jzp)
        assert np.abs(prod - weight_projector(n, k).real).max() < 1e-8

    @pytest.mark.parametrize("n", range(2, 7))
    def test_dicke_bound_spectrum(self, n):
        for k in range(n + 1):
            op = dicke_bound_operator(n, k)
            vals, vecs = np.linalg.eigh(op)
            assert vals.max() <= 1 + 1e-9
            top = np.flatnonzero(vals > 1 - 1e-9)
            assert len(top) == 1
            psi = dicke_state_vector(DickeSpec(n, k)).amplitudes
            assert abs(np.vdot(vecs[:, top[0]], psi)) ** 2 > 1 - 1e-9
            assert vals[vals < 1 - 1e-9].max() <= 1e-9  # everything off-target is <= 0

    @pytest.mark.parametrize("n", range(2, 7))
    def test_ghz_witness_spectrum(self, n):
        op = ghz_witness_operator(n)
        vals, vecs = np.linalg.eigh(op)
        assert vals.max() <= 1 + 1e-9
        top = np.flatnonzero(vals > 1 - 1e-9)
        assert len(top) == 1
        psi = ghz_state_vector(n).amplitudes
        assert abs(np.vdot(vecs[:, top[0]], psi)) ** 2 > 1 - 1e-9
        # remaining stabilizer eigenvalues are <= 0
        assert vals[vals < 1 - 1e-9].max() <= 1e-9


class TestOperatorExpectations:
    def test_noiseless_dicke_is_one(self):
        for n, k in [(3, 1), (4, 2), (5, 2)]:
            rho = density_oracle(build_dicke_circuit(DickeSpec(n, k)), NoiseSpec.noiseless())
            rep = exact_operator_expectations(rho, DickeSpec(n, k))
            assert rep.lower_bound == pytest.approx(1.0, abs=1e-9)
            assert rep.msp == pytest.approx(1.0, abs=1e-9)
            assert rep.somma_lower_bound == pytest.approx(1.0, abs=1e-9)

    def test_maximally_mixed_dicke(self):
        for n, k in [(3, 1), (4, 2), (6, 3), (5, 1)]:
            rep = exact_operator_expectations(DensityMatrix.maximally_mixed(n), DickeSpec(n, k))
            expected = comb(n, k) / 2**n + (1 - n) / 4
            assert rep.lower_bound == pytest.approx(expected, abs=1e-10)

    def test_maximally_mixed_ghz(self):
        for n in (2, 3, 4, 6):
            rep = exact_operator_expectations(DensityMatrix.maximally_mixed(n), GhzSpec(n))
            assert rep.lower_bound == pytest.approx(-(n - 2) / 2, abs=1e-10)
            assert rep.sgx == pytest.approx(0.0, abs=1e-10)
            assert rep.sgz == pytest.approx(0.0, abs=1e-10)

    def test_noiseless_ghz4(self):
        rho = density_oracle(build_ghz(GhzSpec(4, "linear")), NoiseSpec.noiseless())
        rep = exact_operator_expectations(rho, GhzSpec(4))
        assert rep.sgx == pytest.approx(1.0, abs=1e-9)
        assert rep.sgz == pytest.approx(3.0, abs=1e-9)
        assert rep.lower_bound == pytest.approx(1.0, abs=1e-9)

    @pytest.mark.parametrize("p2", [0.0, 0.02, 0.1, 0.2])
    def test_ordering_under_noise(self, p2):
        noise = NoiseSpec(p1=1e-4, p2=p2)
        for spec in [DickeSpec(4, 2), DickeSpec(5, 2), GhzSpec(4), GhzSpec(6)]:
            circuit = (
                build_dicke_circuit(spec) if isinstance(spec, DickeSpec) else build_ghz(spec)
            )
            rho = density_oracle(circuit, noise)
            target = (
                dicke_state_vector(spec) if isinstance(spec, DickeSpec) else ghz_state_vector(spec.n)
            )
            rep = exact_operator_expectations(rho, spec)
            fid = exact_fidelity(rho, target)
            msp = exact_msp(rho, target)
            assert rep.lower_bound <= fid + 1e-10
            assert fid <= msp + 1e-10
            assert rep.msp == pytest.approx(msp, abs=1e-10)


class TestShotEstimators:
    def test_missing_or_empty_tables(self):
        c = build_dicke_circuit(DickeSpec(3, 1))
        tables = tables_from_state(c, [MeasurementBasis.X, MeasurementBasis.Z], 10, 0)
        with pytest.raises(ValueError, match="Y-basis"):
            dicke_lower_bound(tables, 1, 3)
        empty = ShotTable(MeasurementBasis.X, [], 0, "x")
        with pytest.raises(ValueError):
            ghz_sgx(empty)
        with pytest.raises(ValueError):
            ghz_lower_bound(empty, empty, 4)

    def test_ghz_sgz_needs_two_qubits(self):
        table = ShotTable(MeasurementBasis.Z, ["0", "1"], 0, "t")
        with pytest.raises(ValueError):
            ghz_sgz(table)

    def test_noiseless_dicke_shot_report(self):
        spec = DickeSpec(4, 2)
        c = build_dicke_circuit(spec)
        tables = tables_from_state(c, list(MeasurementBasis), 4000, 10)
        rep = dicke_lower_bound(tables, 2, 4, seed=3)
        assert rep.msp == 1.0  # support property, exact
        assert rep.lb_ci_lo <= rep.lower_bound <= rep.lb_ci_hi
        assert abs(rep.lower_bound - 1.0) < 0.05
        assert rep.somma_lower_bound <= rep.lower_bound + 1e-12

    def test_noiseless_ghz_shot_report(self):
        c = build_ghz(GhzSpec(4, "linear"))
        tables = tables_from_state(c, [MeasurementBasis.X, MeasurementBasis.Z], 2000, 11)
        rep = ghz_lower_bound(tables[MeasurementBasis.X], tables[MeasurementBasis.Z], 4, seed=5)
        assert rep.sgx == pytest.approx(1.0)
        assert rep.sgz == pytest.approx(3.0)
        assert rep.lower_bound == pytest.approx(1.0)
        assert rep.msp == pytest.approx(1.0)

    def test_single_shot_values(self):
        x = ShotTable(MeasurementBasis.X, ["0011"], 0, "g")
        z = ShotTable(MeasurementBasis.Z, ["0101"], 0, "g")
        assert ghz_sgx(x) == 1.0
        assert ghz_sgz(z) == -3.0

    def test_msp_equals_sjz_estimator(self):
        spec = DickeSpec(4, 2)
        c = build_dicke_circuit(spec)
        tables = tables_from_state(c, list(MeasurementBasis), 600, 21)
        rep = dicke_lower_bound(tables, 2, 4)
        manual = np.mean([sjz_per_shot(o, 2) for o in tables[MeasurementBasis.Z].outcomes])
        assert rep.msp == pytest.approx(float(manual), abs=1e-15)

    @pytest.mark.parametrize("spec", [DickeSpec(3, 1), DickeSpec(4, 2)])
    def test_shot_lb_consistent_with_oracle(self, spec):
        noise = NoiseSpec(p1=1e-3, p2=0.02)
        c = build_dicke_circuit(spec)
        rho = density_oracle(c, noise)
        exact = exact_operator_expectations(rho, spec)
        # sample directly from the exact mixed state in each rotated basis
        tables = {}
        rng = np.random.default_rng(17)
        shots = 20000
        for basis in MeasurementBasis:
            rot = rotate_to_basis(c, basis)
            rho_rot = density_oracle(rot, noise)
            probs = np.real(np.diag(rho_rot.entries))
            probs = np.clip(probs, 0, None)
            probs /= probs.sum()
            draws = rng.choice(len(probs), size=shots, p=probs)
            outcomes = [format(i, f"0{spec.n}b") for i in draws]
            tables[basis] = ShotTable(basis, outcomes, 17, c.label)
        rep = dicke_lower_bound(tables, spec.k_weight, spec.n, seed=23)
        sigma = max((rep.lb_ci_hi - rep.lb_ci_lo) / 2, 1e-6)
        assert abs(rep.lower_bound - exact.lower_bound) < 5 * sigma

    def test_improved_vs_somma_on_shared_shots(self):
        noise = NoiseSpec(p1=1e-3, p2=0.05)
        for spec in [DickeSpec(4, 1), DickeSpec(5, 2), DickeSpec(6, 3)]:
            c = build_dicke_circuit(spec)
            tables = {}
            for i, basis in enumerate(MeasurementBasis):
                rot = rotate_to_basis(c, basis)
                from fidbounds.simulator import run_trajectory, derive_seed

                outcomes = []
                for shot in range(300):
                    sv = run_trajectory(rot, noise, derive_seed(5, spec.label, basis.value, shot))
                    outcomes.append(
                        sample(sv, 1, derive_seed(5, spec.label, basis.value, shot, "m")).outcomes[0]
                    )
                tables[basis] = ShotTable(basis, outcomes, 5, c.label)
            rep = dicke_lower_bound(tables, spec.k_weight, spec.n)
            assert rep.lower_bound >= rep.somma_lower_bound - 1e-12
