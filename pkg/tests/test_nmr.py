"""Pulse-level simulation: Hamiltonian, pulses, compiler, tomography."""
import math

import numpy as np
import pytest

from qsuperpose.datasets import TABLE1, dataset
from qsuperpose.direct import (
    SuperpositionSpec,
    ancilla_hadamard,
    encode_two_qubit,
    phase_gate,
    run_direct,
)
from qsuperpose.errors import ArgumentError, DegenerateInputError
from qsuperpose.linalg import DensityMatrix, QubitParams, fidelity, pure_density
from qsuperpose.nmr import (
    PulseEvent,
    PulseSequence,
    SpinSystem,
    compile_sequence,
    evolve_free,
    gradient_crush,
    hamiltonian,
    initial_state,
    partial_tomography,
    pulse_unitary,
    reconstruct_two_spin,
    rf_pulse,
    rotation_matrix,
    run_sequence,
    sequence_unitary,
    subspace_readout,
    tomography_observables,
)

SYS = SpinSystem()
INV_SQRT2 = 1.0 / math.sqrt(2.0)


def ground() -> DensityMatrix:
    mat = np.zeros((4, 4), dtype=complex)
    mat[0, 0] = 1.0
    return DensityMatrix((2, 2), mat)


def random_density(rng) -> DensityMatrix:
    a = rng.normal(size=(4, 4)) + 1j * rng.normal(size=(4, 4))
    mat = a @ a.conj().T
    return DensityMatrix((2, 2), mat / np.trace(mat).real)


def assert_equal_up_to_phase(u, v, atol=1e-12):
    k = np.unravel_index(np.argmax(np.abs(v)), v.shape)
    phase = v[k] / u[k]
    assert abs(abs(phase) - 1.0) <= atol
    np.testing.assert_allclose(u * phase, v, atol=atol)


class TestHamiltonian:
    def test_pure_coupling(self):
        h = hamiltonian(SpinSystem(0.0, 0.0, 4.0))
        np.testing.assert_allclose(h, np.diag([1.0, -1.0, -1.0, 1.0]), atol=1e-15)

    def test_diagonal_for_any_parameters(self):
        h = hamiltonian(SpinSystem(11.0, -3.0, 5.0))
        np.testing.assert_allclose(h, np.diag(np.diag(h)), atol=1e-15)

    def test_ground_state_energy(self):
        sys = SpinSystem(2.0, 3.0, 4.0)
        assert hamiltonian(sys)[0, 0] == pytest.approx(-2.0 / 2 - 3.0 / 2 + 4.0 / 4)

    def test_zero_coupling_rejected(self):
        with pytest.raises(ArgumentError):
            SpinSystem(0.0, 0.0, 0.0)


class TestEvolveFree:
    def test_zero_time_identity(self, rng):
        rho = random_density(rng)
        np.testing.assert_array_equal(evolve_free(rho, SYS, 0.0).mat, rho.mat)

    def test_zz_quarter_turn(self):
        # |0>|+> evolved for t = pi/J: the 00-01 coherence picks up -i.
        plus = np.array([1.0, 1.0]) * INV_SQRT2
        amps = np.kron([1.0, 0.0], plus)
        rho = DensityMatrix((2, 2), np.outer(amps, amps.conj()))
        out = evolve_free(rho, SpinSystem(0.0, 0.0, SYS.j_coupling), math.pi / SYS.j_coupling)
        assert out.mat[0, 1] == pytest.approx(0.5 * np.exp(-1j * math.pi / 2), abs=1e-12)

    def test_purity_conserved(self, rng):
        rho = random_density(rng)
        out = evolve_free(rho, SYS, 1.7e-3)
        assert out.purity() == pytest.approx(rho.purity(), abs=1e-12)
        assert out.trace == pytest.approx(rho.trace, abs=1e-12)

    def test_negative_time_rejected(self, rng):
        with pytest.raises(ArgumentError):
            evolve_free(random_density(rng), SYS, -1e-6)


class TestRfPulse:
    def test_pi_about_x_flips(self):
        out = rf_pulse(ground(), "A", math.pi, 0.0)
        np.testing.assert_allclose(np.diag(out.mat).real, [0, 0, 1, 0], atol=1e-14)

    def test_two_delta_population_split(self):
        delta = 0.61
        out = rf_pulse(ground(), "A", 2 * delta, math.pi / 2)
        pops = np.diag(out.mat).real
        assert pops[0] == pytest.approx(math.cos(delta) ** 2, abs=1e-12)
        assert pops[2] == pytest.approx(math.sin(delta) ** 2, abs=1e-12)

    def test_two_half_pi_pulses_compose(self, rng):
        rho = random_density(rng)
        once = rf_pulse(rf_pulse(rho, "X", math.pi / 2, 0.7), "X", math.pi / 2, 0.7)
        direct = rf_pulse(rho, "X", math.pi, 0.7)
        np.testing.assert_allclose(once.mat, direct.mat, atol=1e-13)

    def test_both_addresses_both_spins(self):
        u = pulse_unitary("both", math.pi / 2, 0.0)
        expected = np.kron(
            rotation_matrix(math.pi / 2, 0.0), rotation_matrix(math.pi / 2, 0.0)
        )
        np.testing.assert_allclose(u, expected, atol=1e-15)


class TestGradientCrush:
    def test_diagonal_unchanged(self):
        rho = DensityMatrix((2, 2), np.diag([0.4, 0.3, 0.2, 0.1]))
        np.testing.assert_array_equal(gradient_crush(rho).mat, rho.mat)

    def test_single_quantum_killed(self):
        plus = np.array([1.0, 1.0]) * INV_SQRT2
        amps = np.kron(plus, [1.0, 0.0])
        rho = DensityMatrix((2, 2), np.outer(amps, amps))
        out = gradient_crush(rho)
        expected = np.kron(np.eye(2) / 2.0, np.diag([1.0, 0.0]))
        np.testing.assert_allclose(out.mat, expected, atol=1e-14)

    def test_zero_quantum_survives(self):
        # (|01> + |10>)/sqrt(2) has a zero-quantum coherence.
        amps = np.zeros(4)
        amps[1] = amps[2] = INV_SQRT2
        rho = DensityMatrix((2, 2), np.outer(amps, amps))
        out = gradient_crush(rho)
        assert out.mat[1, 2] == pytest.approx(0.5, abs=1e-14)

    def test_purity_never_increases(self, rng):
        for _ in range(20):
            rho = random_density(rng)
            out = gradient_crush(rho)
            assert out.purity() <= rho.purity() + 1e-12
            assert out.trace == pytest.approx(rho.trace, abs=1e-14)


class TestCompileSequence:
    def gate_level_encoding(self, spec):
        """|0><0| x R(psi1) + |1><1| x R(psi2), the compile target."""
        u = np.zeros((4, 4), dtype=complex)
        u[:2, :2] = rotation_matrix(spec.psi1.theta, spec.psi1.phi + math.pi / 2)
        u[2:, 2:] = rotation_matrix(spec.psi2.theta, spec.psi2.phi + math.pi / 2)
        return u

    def encoding_block(self, seq):
        events = seq.events[seq.checkpoints["i"] : seq.checkpoints["ii"]]
        return PulseSequence(events, {})

    @pytest.mark.parametrize("dataset_id", [1, 3, 5, 7, 9, 11])
    def test_encoding_block_matches_gate_level(self, dataset_id):
        ds = dataset(dataset_id)
        spec = ds.spec()
        seq = compile_sequence(spec, SYS)
        net = sequence_unitary(self.encoding_block(seq), SYS)
        assert_equal_up_to_phase(net, self.gate_level_encoding(spec))

    def test_single_weight_empty_initial_block(self):
        spec = SuperpositionSpec(1.0, 0.0, QubitParams(0, 0), QubitParams(1.0, 0.0))
        seq = compile_sequence(spec, SYS)
        assert seq.checkpoints["i"] == 0
        state = run_sequence(seq, SYS)["i"]
        np.testing.assert_allclose(state.mat, ground().mat, atol=1e-14)

    def test_dataset9_carries_branch_phase(self):
        seq = compile_sequence(dataset(9).spec(), SYS)
        rho = run_sequence(seq, SYS)["ii"]
        encoded = encode_two_qubit(dataset(9).spec())
        assert fidelity(rho, pure_density(encoded)) >= 1.0 - 1e-9
        # The coherence between the branches shows the e^{i gamma2} factor.
        plain = pure_density(encode_two_qubit(dataset(5).spec()))
        assert fidelity(rho, plain) < 1.0 - 1e-3

    def test_checkpoints_cover_all_labels(self):
        seq = compile_sequence(dataset(2).spec(), SYS)
        assert list(seq.checkpoints) == ["i", "ii", "iii", "iv", "v"]
        assert seq.checkpoints["v"] == len(seq.events)


class TestRunSequence:
    @pytest.mark.parametrize("dataset_id", [1, 4, 6, 9])
    def test_checkpoint_ii_matches_encoded_state(self, dataset_id):
        spec = dataset(dataset_id).spec()
        rho = run_sequence(compile_sequence(spec, SYS), SYS)["ii"]
        assert fidelity(rho, pure_density(encode_two_qubit(spec))) >= 1.0 - 1e-9

    @pytest.mark.parametrize("dataset_id", [1, 4, 6, 9])
    def test_checkpoint_iv_matches_preselection_state(self, dataset_id):
        spec = dataset(dataset_id).spec()
        rho = run_sequence(compile_sequence(spec, SYS), SYS)["iv"]
        gate = ancilla_hadamard(
            phase_gate(encode_two_qubit(spec), spec.psi1.gamma, spec.psi2.gamma)
        )
        assert fidelity(rho, pure_density(gate)) >= 1.0 - 1e-9

    def test_no_pulses_keeps_ground_state(self):
        # No rf events: every checkpoint stays |00><00| (delays act trivially).
        for events in ([], [PulseEvent("delay", duration=1e-3)]):
            seq = PulseSequence(
                tuple(events), {label: len(events) for label in ("i", "ii", "iii", "iv", "v")}
            )
            states = run_sequence(seq, SYS)
            for label in ("i", "ii", "iii", "iv", "v"):
                np.testing.assert_allclose(states[label].mat, ground().mat, atol=1e-14)

    def test_checkpoint_v_is_crushed_iv(self):
        seq = compile_sequence(dataset(3).spec(), SYS)
        states = run_sequence(seq, SYS)
        np.testing.assert_allclose(
            states["v"].mat, gradient_crush(states["iv"]).mat, atol=1e-14
        )

    def test_mixed_start_blends_linearly(self):
        seq = compile_sequence(dataset(5).spec(), SYS)
        eps = 0.9
        mixed = run_sequence(seq, SYS, epsilon=eps)
        pure = run_sequence(seq, SYS, epsilon=1.0)
        for label in ("ii", "iv"):
            blended = eps * pure[label].mat + (1 - eps) * np.eye(4) / 4.0
            np.testing.assert_allclose(mixed[label].mat, blended, atol=1e-12)

    def test_epsilon_out_of_range(self):
        with pytest.raises(ArgumentError):
            initial_state(1.5)


class TestPartialTomography:
    def test_ground_state(self):
        qubit, norm = partial_tomography(ground())
        assert norm == pytest.approx(1.0, abs=1e-14)
        np.testing.assert_allclose(qubit.mat, [[1, 0], [0, 0]], atol=1e-14)

    def test_dataset1_checkpoint_iv(self):
        spec = dataset(1).spec()
        rho = run_sequence(compile_sequence(spec, SYS), SYS)["iv"]
        qubit, norm = partial_tomography(rho)
        assert norm == pytest.approx(0.8535533905932738, abs=1e-9)
        target = pure_density(run_direct(spec).target_state)
        assert fidelity(qubit, target) >= 1.0 - 1e-9

    def test_dataset11_small_overlap(self):
        spec = dataset(11).spec()
        rho = run_sequence(compile_sequence(spec, SYS), SYS)["iv"]
        qubit, _ = partial_tomography(rho)
        target = pure_density(run_direct(spec).target_state)
        assert fidelity(qubit, target) >= 1.0 - 1e-9

    def test_empty_block_rejected(self):
        mat = np.zeros((4, 4))
        mat[2, 2] = 1.0
        with pytest.raises(DegenerateInputError):
            partial_tomography(DensityMatrix((2, 2), mat))


class TestGatePulseEquivalence:
    @pytest.mark.parametrize("ds", TABLE1, ids=lambda d: f"dataset{d.dataset_id}")
    def test_all_datasets(self, ds):
        gate = run_direct(ds.spec())
        rho = run_sequence(compile_sequence(ds.spec(), SYS), SYS)["iv"]
        qubit, norm = partial_tomography(rho)
        assert fidelity(qubit, pure_density(gate.final_state)) >= 1.0 - 1e-6
        assert abs(norm - gate.success_prob) <= 1e-6


class TestPulseIdentities:
    def test_pseudo_hadamard_compensation(self):
        # R_z(pi) . R_{-y}(pi/2) equals the Hadamard up to a global phase.
        h = rotation_matrix(math.pi / 2, 3 * math.pi / 2)
        rz = np.diag([np.exp(-1j * math.pi / 2), np.exp(1j * math.pi / 2)])
        hadamard = np.array([[1, 1], [1, -1]]) / math.sqrt(2)
        assert_equal_up_to_phase(rz @ h, hadamard.astype(complex))

    def test_delay_is_conditional_z(self):
        # 1/(2J) of free evolution = |0><0| R_z(pi/2) + |1><1| R_z(-pi/2).
        tau = 1.0 / (2.0 * SYS.j_hz)
        u = np.diag(np.exp(-1j * np.diag(hamiltonian(SYS)).real * tau))
        cond = np.zeros((4, 4), dtype=complex)
        cond[:2, :2] = np.diag([np.exp(-1j * math.pi / 4), np.exp(1j * math.pi / 4)])
        cond[2:, 2:] = np.diag([np.exp(1j * math.pi / 4), np.exp(-1j * math.pi / 4)])
        np.testing.assert_allclose(u, cond, atol=1e-12)

    def test_unitary_events_preserve_trace_and_purity(self, rng):
        rho = random_density(rng)
        seq = compile_sequence(dataset(6).spec(), SYS)
        for event in seq.events:
            if event.kind == "gradient":
                continue
            out = (
                rf_pulse(rho, event.spin, event.flip_angle, event.axis_phase)
                if event.kind == "rf"
                else evolve_free(rho, SYS, event.duration)
            )
            assert out.trace == pytest.approx(rho.trace, abs=1e-12)
            assert out.purity() == pytest.approx(rho.purity(), abs=1e-12)


class TestTomographyReconstruction:
    def test_round_trip_random(self, rng):
        for _ in range(10):
            rho = random_density(rng)
            rebuilt = reconstruct_two_spin(tomography_observables(rho), rho.trace)
            np.testing.assert_allclose(rebuilt.mat, rho.mat, atol=1e-9)

    def test_round_trip_checkpoints(self):
        states = run_sequence(compile_sequence(dataset(3).spec(), SYS), SYS)
        for label in ("ii", "iv"):
            rho = states[label]
            rebuilt = reconstruct_two_spin(tomography_observables(rho), rho.trace)
            np.testing.assert_allclose(rebuilt.mat, rho.mat, atol=1e-9)

    def test_subspace_readout_matches_block(self, rng):
        for _ in range(10):
            rho = random_density(rng)
            expected_state, expected_norm = partial_tomography(rho)
            state, norm = subspace_readout(rho)
            assert norm == pytest.approx(expected_norm, abs=1e-12)
            np.testing.assert_allclose(state.mat, expected_state.mat, atol=1e-12)

    def test_missing_experiment(self):
        with pytest.raises(ArgumentError):
            reconstruct_two_spin({"II": (0j, 0j, 0j, 0j)})


class TestEventValidation:
    def test_zero_flip_angle(self):
        with pytest.raises(ArgumentError):
            PulseEvent("rf", spin="A", flip_angle=0.0, axis_phase=0.0)

    def test_flip_angle_above_two_pi(self):
        with pytest.raises(ArgumentError):
            PulseEvent("rf", spin="A", flip_angle=7.0, axis_phase=0.0)

    def test_bad_spin(self):
        with pytest.raises(ArgumentError):
            PulseEvent("rf", spin="B", flip_angle=1.0, axis_phase=0.0)

    def test_negative_delay(self):
        with pytest.raises(ArgumentError):
            PulseEvent("delay", duration=-1.0)

    def test_unknown_kind(self):
        with pytest.raises(ArgumentError):
            PulseEvent("laser")

    def test_checkpoint_out_of_range(self):
        with pytest.raises(ArgumentError):
            PulseSequence((), {"i": 1})

    def test_checkpoint_decreasing(self):
        events = (PulseEvent("gradient"), PulseEvent("gradient"))
        with pytest.raises(ArgumentError):
            PulseSequence(events, {"i": 2, "ii": 1})

    def test_unknown_label(self):
        with pytest.raises(ArgumentError):
            PulseSequence((), {"vi": 0})

    def test_json_round_trip(self):
        seq = compile_sequence(dataset(9).spec(), SYS)
        back = PulseSequence.from_json(seq.to_json())
        assert back.checkpoints == seq.checkpoints
        assert len(back.events) == len(seq.events)
        for e1, e2 in zip(back.events, seq.events):
            assert e1 == e2
