"""Pulse-level simulation of the two-spin superposition sequence.

Two J-coupled spins (ancilla A, system X) evolve under

    H = -Omega_A A_z x I - Omega_X I x X_z + J A_z x X_z

with everything in angular units (hbar = 1). Pulses are hard
(instantaneous, J off while they run) rotations
R_n(theta) = exp(-i theta n.sigma / 2) about an axis in the xy plane;
``axis_phase`` is measured from +x. z-rotations are compiled as x-y-x
composites. The sequence has three blocks (initial, encoding,
superposition) followed by the readout gradient, with checkpoints
(i)-(v) recorded as cut positions between events.

The compiled encoding uses the half-angle / 1/(2J) delay / conjugate-axis
half-angle construction plus a spin-echo refocusing block, so each
controlled rotation nets the exact gate-level operation up to a global
phase. On-resonance operation (Omega_A = Omega_X = 0) is assumed by the
compiler, matching the experiment.
"""
from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .direct import SuperpositionSpec
from .errors import ArgumentError, DegenerateInputError
from .linalg import DensityMatrix

SIGMA_X = np.array([[0.0, 1.0], [1.0, 0.0]], dtype=complex)
SIGMA_Y = np.array([[0.0, -1.0j], [1.0j, 0.0]], dtype=complex)
SIGMA_Z = np.array([[1.0, 0.0], [0.0, -1.0]], dtype=complex)
EYE2 = np.eye(2, dtype=complex)

CHECKPOINT_LABELS = ("i", "ii", "iii", "iv", "v")

# Rotation angles below this compile to no pulse at all.
_ANGLE_TOL = 1e-12

# Total magnetic quantum number (units of 1/2) per basis state |00>..|11>.
_COHERENCE_M = np.array([1, 0, 0, -1])


@dataclass(frozen=True)
class SpinSystem:
    """Two-spin parameters, angular frequencies in rad/s."""

    omega_a: float = 0.0
    omega_x: float = 0.0
    j_coupling: float = 2.0 * math.pi * 215.0

    def __post_init__(self):
        if self.j_coupling == 0.0:
            raise ArgumentError("the scalar coupling J must be nonzero")

    @property
    def j_hz(self) -> float:
        return self.j_coupling / (2.0 * math.pi)


@dataclass(frozen=True)
class PulseEvent:
    """One sequence event: an rf pulse, a free-evolution delay, or a gradient."""

    kind: str
    spin: Optional[str] = None
    flip_angle: Optional[float] = None
    axis_phase: Optional[float] = None
    duration: Optional[float] = None

    def __post_init__(self):
        if self.kind == "rf":
            if self.spin not in ("A", "X", "both"):
                raise ArgumentError(f"rf spin must be A, X or both, got {self.spin}")
            if self.flip_angle is None or not 0.0 < self.flip_angle <= 2.0 * math.pi:
                raise ArgumentError("rf flip angle must lie in (0, 2pi]")
            if self.axis_phase is None:
                raise ArgumentError("rf pulses need an axis phase")
        elif self.kind == "delay":
            if self.duration is None or self.duration < 0.0:
                raise ArgumentError("delay duration must be nonnegative")
        elif self.kind == "gradient":
            pass
        else:
            raise ArgumentError(f"unknown event kind {self.kind!r}")

    def to_json(self) -> dict:
        out = {"kind": self.kind}
        if self.kind == "rf":
            out.update(
                spin=self.spin, flip_angle=self.flip_angle, axis_phase=self.axis_phase
            )
        elif self.kind == "delay":
            out.update(duration=self.duration)
        return out

    @staticmethod
    def from_json(obj: dict) -> "PulseEvent":
        try:
            return PulseEvent(
                kind=obj["kind"],
                spin=obj.get("spin"),
                flip_angle=obj.get("flip_angle"),
                axis_phase=obj.get("axis_phase"),
                duration=obj.get("duration"),
            )
        except (KeyError, TypeError) as exc:
            raise ArgumentError(f"malformed pulse event JSON: {exc}") from exc


@dataclass(frozen=True, eq=False)
class PulseSequence:
    """Ordered events plus checkpoint cut positions (events applied so far)."""

    events: tuple[PulseEvent, ...]
    checkpoints: dict[str, int]

    def __post_init__(self):
        object.__setattr__(self, "events", tuple(self.events))
        object.__setattr__(self, "checkpoints", dict(self.checkpoints))
        last = 0
        for label in CHECKPOINT_LABELS:
            if label not in self.checkpoints:
                continue
            cut = self.checkpoints[label]
            if not 0 <= cut <= len(self.events):
                raise ArgumentError(f"checkpoint {label} cut {cut} out of range")
            if cut < last:
                raise ArgumentError("checkpoint cuts must be non-decreasing")
            last = cut
        unknown = set(self.checkpoints) - set(CHECKPOINT_LABELS)
        if unknown:
            raise ArgumentError(f"unknown checkpoint labels {sorted(unknown)}")

    def to_json(self) -> dict:
        return {
            "events": [e.to_json() for e in self.events],
            "checkpoints": dict(self.checkpoints),
        }

    @staticmethod
    def from_json(obj: dict) -> "PulseSequence":
        try:
            events = tuple(PulseEvent.from_json(e) for e in obj["events"])
            checkpoints = {str(k): int(v) for k, v in obj["checkpoints"].items()}
        except (KeyError, TypeError, ValueError) as exc:
            raise ArgumentError(f"malformed pulse sequence JSON: {exc}") from exc
        return PulseSequence(events, checkpoints)


def hamiltonian(sys: SpinSystem) -> np.ndarray:
    """Diagonal two-spin Hamiltonian in the computational basis."""
    az = np.diag([0.5, -0.5])
    h = (
        -sys.omega_a * np.kron(az, np.eye(2))
        - sys.omega_x * np.kron(np.eye(2), az)
        + sys.j_coupling * np.kron(az, az)
    )
    return h.astype(complex)


def _require_two_spin(rho: DensityMatrix) -> None:
    if rho.dims != (2, 2):
        raise ArgumentError(f"expected a two-spin density matrix, got dims {rho.dims}")


def evolve_free(rho: DensityMatrix, sys: SpinSystem, t: float) -> DensityMatrix:
    """Conjugation by exp(-i H t); H is diagonal so this is a phase mask."""
    _require_two_spin(rho)
    if t < 0.0:
        raise ArgumentError("evolution time must be nonnegative")
    phases = np.exp(-1j * np.diag(hamiltonian(sys)).real * t)
    return DensityMatrix((2, 2), phases[:, None] * rho.mat * phases.conj()[None, :])


def rotation_matrix(flip_angle: float, axis_phase: float) -> np.ndarray:
    """exp(-i flip_angle (cos(axis) sigma_x + sin(axis) sigma_y) / 2)."""
    n = math.cos(axis_phase) * SIGMA_X + math.sin(axis_phase) * SIGMA_Y
    return math.cos(flip_angle / 2.0) * EYE2 - 1j * math.sin(flip_angle / 2.0) * n


def pulse_unitary(spin: str, flip_angle: float, axis_phase: float) -> np.ndarray:
    r = rotation_matrix(flip_angle, axis_phase)
    if spin == "A":
        return np.kron(r, EYE2)
    if spin == "X":
        return np.kron(EYE2, r)
    if spin == "both":
        return np.kron(r, r)
    raise ArgumentError(f"rf spin must be A, X or both, got {spin}")


def rf_pulse(
    rho: DensityMatrix, spin: str, flip_angle: float, axis_phase: float
) -> DensityMatrix:
    """Instantaneous rotation of the addressed spin(s)."""
    _require_two_spin(rho)
    u = pulse_unitary(spin, flip_angle, axis_phase)
    return DensityMatrix((2, 2), u @ rho.mat @ u.conj().T)


def gradient_crush(rho: DensityMatrix) -> DensityMatrix:
    """Zero every element whose total coherence order is nonzero."""
    _require_two_spin(rho)
    mask = _COHERENCE_M[:, None] == _COHERENCE_M[None, :]
    return DensityMatrix((2, 2), np.where(mask, rho.mat, 0.0))


def _composite_z(events: list[PulseEvent], spin: str, angle: float) -> None:
    """R_z(angle) as the x-y-x composite R_x(pi/2) R_y(angle) R_x(-pi/2)."""
    angle = math.remainder(angle, 2.0 * math.pi)
    if abs(angle) < _ANGLE_TOL:
        return
    events.append(PulseEvent("rf", spin=spin, flip_angle=math.pi / 2, axis_phase=math.pi))
    y_axis = math.pi / 2 if angle > 0 else 3 * math.pi / 2
    events.append(PulseEvent("rf", spin=spin, flip_angle=abs(angle), axis_phase=y_axis))
    events.append(PulseEvent("rf", spin=spin, flip_angle=math.pi / 2, axis_phase=0.0))


def _norm_axis(axis: float) -> float:
    return axis % (2.0 * math.pi)


def _controlled_rotation(
    events: list[PulseEvent], theta: float, axis: float, control: int, tau: float
) -> None:
    """Rotate the system qubit by theta iff the ancilla is |control>.

    Half-angle pulse, 1/(2J) delay, conjugate-axis half-angle (axes
    pi/2 apart as in the sequence diagram), then a spin-echo refocusing
    block that cancels the leftover conditional z-rotation.
    """
    if abs(theta) < _ANGLE_TOL:
        return
    conj_axis = axis + (math.pi / 2 if control == 0 else -math.pi / 2)
    events.append(
        PulseEvent("rf", spin="X", flip_angle=theta / 2, axis_phase=_norm_axis(axis))
    )
    events.append(PulseEvent("delay", duration=tau))
    events.append(
        PulseEvent(
            "rf", spin="X", flip_angle=theta / 2, axis_phase=_norm_axis(conj_axis)
        )
    )
    events.append(PulseEvent("rf", spin="A", flip_angle=math.pi, axis_phase=0.0))
    events.append(PulseEvent("delay", duration=tau))
    events.append(PulseEvent("rf", spin="A", flip_angle=math.pi, axis_phase=0.0))


def compile_sequence(spec: SuperpositionSpec, sys: SpinSystem) -> PulseSequence:
    """Emit the initial / encoding / superposition blocks for one instance.

    Complex weight phases fold into the effective encoded phases, so the
    pulse program always prepares (cos d)|0> + e^{i(g2-g1)}(sin d)|1> on
    the ancilla and corrects the relative phase in the superposition
    block, exactly as the gate-level pipeline does.
    """
    mag_a, mag_b = abs(spec.weight_a), abs(spec.weight_b)
    delta = math.atan2(mag_b, mag_a)
    g1 = spec.psi1.gamma + (cmath.phase(spec.weight_a) if mag_a > 0 else 0.0)
    g2 = spec.psi2.gamma + (cmath.phase(spec.weight_b) if mag_b > 0 else 0.0)
    rel = g2 - g1
    tau = 1.0 / (2.0 * sys.j_hz)

    events: list[PulseEvent] = []
    checkpoints: dict[str, int] = {}

    # Initial block: 2 delta rotation, axis offset by the relative phase.
    if abs(delta) >= _ANGLE_TOL:
        events.append(
            PulseEvent(
                "rf",
                spin="A",
                flip_angle=2.0 * delta,
                axis_phase=_norm_axis(math.pi / 2 + rel),
            )
        )
    checkpoints["i"] = len(events)

    # Encoding block: one controlled rotation per input state.
    _controlled_rotation(
        events, spec.psi1.theta, spec.psi1.phi + math.pi / 2, control=0, tau=tau
    )
    _controlled_rotation(
        events, spec.psi2.theta, spec.psi2.phi + math.pi / 2, control=1, tau=tau
    )
    checkpoints["ii"] = len(events)

    # Superposition block: phase correction, pseudo-Hadamard, compensation.
    # Only the declared gammas are removed; weight phases stay in the target.
    _composite_z(events, "A", spec.psi1.gamma - spec.psi2.gamma)
    checkpoints["iii"] = len(events)
    events.append(
        PulseEvent("rf", spin="A", flip_angle=math.pi / 2, axis_phase=3 * math.pi / 2)
    )
    _composite_z(events, "A", math.pi)
    checkpoints["iv"] = len(events)

    # Readout gradient for the normalization measurement.
    events.append(PulseEvent("gradient"))
    checkpoints["v"] = len(events)
    return PulseSequence(tuple(events), checkpoints)


def apply_event(rho: DensityMatrix, event: PulseEvent, sys: SpinSystem) -> DensityMatrix:
    if event.kind == "rf":
        return rf_pulse(rho, event.spin, event.flip_angle, event.axis_phase)
    if event.kind == "delay":
        return evolve_free(rho, sys, event.duration)
    return gradient_crush(rho)


def initial_state(epsilon: float = 1.0) -> DensityMatrix:
    """Pseudo-pure |00><00| blended with identity: (1-eps) I/4 + eps |00><00|."""
    if not 0.0 <= epsilon <= 1.0:
        raise ArgumentError(f"purity epsilon must lie in [0, 1], got {epsilon}")
    mat = (1.0 - epsilon) * np.eye(4) / 4.0
    mat[0, 0] += epsilon
    return DensityMatrix((2, 2), mat)


def run_sequence(
    seq: PulseSequence, sys: SpinSystem, epsilon: float = 1.0
) -> dict[str, DensityMatrix]:
    """Apply the sequence to the pseudo-pure start, recording checkpoint states."""
    rho = initial_state(epsilon)
    recorded: dict[str, DensityMatrix] = {}
    cuts: dict[int, list[str]] = {}
    for label, cut in seq.checkpoints.items():
        cuts.setdefault(cut, []).append(label)
    for label in cuts.get(0, []):
        recorded[label] = rho
    for idx, event in enumerate(seq.events):
        rho = apply_event(rho, event, sys)
        for label in cuts.get(idx + 1, []):
            recorded[label] = rho
    return recorded


def sequence_unitary(seq: PulseSequence, sys: SpinSystem) -> np.ndarray:
    """Net unitary of a gradient-free sequence (for equivalence checks)."""
    u = np.eye(4, dtype=complex)
    for event in seq.events:
        if event.kind == "rf":
            u = pulse_unitary(event.spin, event.flip_angle, event.axis_phase) @ u
        elif event.kind == "delay":
            u = np.diag(
                np.exp(-1j * np.diag(hamiltonian(sys)).real * event.duration)
            ) @ u
        else:
            raise ArgumentError("gradients have no unitary representation")
    return u


def partial_tomography(rho: DensityMatrix) -> tuple[DensityMatrix, float]:
    """Extract the {|00>, |01>} block; its trace is the success probability."""
    _require_two_spin(rho)
    block = rho.mat[:2, :2]
    norm = float(np.trace(block).real)
    if norm < 1e-12:
        raise DegenerateInputError("the ancilla-|0> block has vanishing population")
    return DensityMatrix((2,), block / norm), norm


# --- Tomography modelling -------------------------------------------------
#
# The full two-spin state is reconstructed from four experiments
# {II, IX, IY, XX} (spin-selective pi/2 pulses), observing the four
# single-quantum coherences after each. The identity component is not
# observable; the unit-trace constraint completes the linear system.

TOMOGRAPHY_EXPERIMENTS: dict[str, tuple[tuple[str, float], ...]] = {
    "II": (),
    "IX": (("X", 0.0),),
    "IY": (("X", math.pi / 2),),
    "XX": (("A", 0.0), ("X", 0.0)),
}

_SQ_ELEMENTS = ((0, 1), (2, 3), (0, 2), (1, 3))

_PAULI_BASIS = [
    np.kron(p, q)
    for p in (EYE2, SIGMA_X, SIGMA_Y, SIGMA_Z)
    for q in (EYE2, SIGMA_X, SIGMA_Y, SIGMA_Z)
]


def _experiment_unitary(pulses: tuple[tuple[str, float], ...]) -> np.ndarray:
    u = np.eye(4, dtype=complex)
    for spin, axis in pulses:
        u = pulse_unitary(spin, math.pi / 2, axis) @ u
    return u


def tomography_observables(rho: DensityMatrix) -> dict[str, tuple[complex, ...]]:
    """Single-quantum coherences observed after each tomography experiment."""
    _require_two_spin(rho)
    out = {}
    for name, pulses in TOMOGRAPHY_EXPERIMENTS.items():
        u = _experiment_unitary(pulses)
        r = u @ rho.mat @ u.conj().T
        out[name] = tuple(complex(r[i, j]) for i, j in _SQ_ELEMENTS)
    return out


def _tomography_design() -> np.ndarray:
    rows = []
    for pulses in TOMOGRAPHY_EXPERIMENTS.values():
        u = _experiment_unitary(pulses)
        for i, j in _SQ_ELEMENTS:
            rows.append([(u @ basis @ u.conj().T)[i, j] for basis in _PAULI_BASIS])
    m = np.array(rows)
    trace_row = np.array([np.trace(b) for b in _PAULI_BASIS])
    return np.vstack([m.real, m.imag, trace_row.real[None, :]])


_TOMOGRAPHY_DESIGN = _tomography_design()


def reconstruct_two_spin(
    observables: dict[str, tuple[complex, ...]], trace: float = 1.0
) -> DensityMatrix:
    """Least-squares inversion of the tomography observables."""
    try:
        obs = np.array(
            [v for name in TOMOGRAPHY_EXPERIMENTS for v in observables[name]]
        )
    except KeyError as exc:
        raise ArgumentError(f"missing tomography experiment {exc}") from exc
    rhs = np.concatenate([obs.real, obs.imag, [trace]])
    coef, *_ = np.linalg.lstsq(_TOMOGRAPHY_DESIGN, rhs, rcond=None)
    mat = sum(c * basis for c, basis in zip(coef, _PAULI_BASIS))
    return DensityMatrix((2, 2), mat)


def subspace_readout(rho: DensityMatrix) -> tuple[DensityMatrix, float]:
    """The experimental partial readout: {I, G_z Y} plus the normalization scan.

    Direct readout supplies the |00>-|01> coherence; a gradient followed
    by a system-selective pi/2 y-pulse supplies the population
    difference; a gradient followed by an ancilla-selective pi/2 y-pulse
    supplies the subspace normalization. Equals ``partial_tomography``
    exactly for ideal simulated data.
    """
    _require_two_spin(rho)
    coherence = complex(rho.mat[0, 1])
    crushed = gradient_crush(rho)
    pop_x = rf_pulse(crushed, "X", math.pi / 2, math.pi / 2)
    pop_diff = 2.0 * float(pop_x.mat[0, 1].real)
    pop_a = rf_pulse(crushed, "A", math.pi / 2, math.pi / 2)
    anc_diff = 2.0 * float((pop_a.mat[0, 2] + pop_a.mat[1, 3]).real)
    normalization = 0.5 * (rho.trace + anc_diff)
    if normalization < 1e-12:
        raise DegenerateInputError("the ancilla-|0> block has vanishing population")
    p00 = (normalization + pop_diff) / 2.0
    p01 = (normalization - pop_diff) / 2.0
    block = np.array([[p00, coherence], [coherence.conjugate(), p01]])
    return DensityMatrix((2,), block / normalization), normalization
