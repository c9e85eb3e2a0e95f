"""Gate-level two-qubit superposition protocol.

Pipeline: encode the pair on an ancilla-system register, cancel the
declared overall phases with an ancilla z-rotation, apply a Hadamard on
the ancilla and post-select outcome |0>. The surviving branch is
proportional to a|psi1> + b|psi2>; outcome |1> carries the difference.
"""
from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .errors import ArgumentError
from .linalg import (
    ATOL,
    QubitParams,
    StateVector,
    fidelity,
    make_qubit,
    overlap_decompose,
    pure_density,
    tensor,
)

HADAMARD = np.array([[1.0, 1.0], [1.0, -1.0]], dtype=complex) / math.sqrt(2.0)

# Branch norms below this leave the difference branch undefined.
BRANCH_NORM_FLOOR = 1e-12


@dataclass(frozen=True)
class SuperpositionSpec:
    """A full problem instance: weights, inputs with assumed phases, reference."""

    weight_a: complex
    weight_b: complex
    psi1: QubitParams
    psi2: QubitParams
    chi: QubitParams = QubitParams(0.0, 0.0, 0.0)

    def __post_init__(self):
        a2 = abs(self.weight_a) ** 2
        b2 = abs(self.weight_b) ** 2
        if abs(a2 + b2 - 1.0) > ATOL:
            raise ArgumentError(
                f"weights must satisfy |a|^2 + |b|^2 = 1, got {a2 + b2}"
            )
        chi = make_qubit(self.chi)
        # Raises ZeroOverlapError when a prior overlap vanishes.
        overlap_decompose(make_qubit(self.psi1), chi)
        overlap_decompose(make_qubit(self.psi2), chi)


@dataclass(frozen=True, eq=False)
class ProtocolResult:
    """Final state plus the probability bookkeeping of one protocol run."""

    final_state: StateVector
    branch_unnormalized: StateVector
    success_prob: float
    norm_sq: float
    target_state: StateVector
    fidelity_to_target: float
    difference_branch: Optional[StateVector] = None

    def __post_init__(self):
        if abs(self.success_prob - self.branch_unnormalized.norm_sq) > ATOL:
            raise ArgumentError("success_prob must equal the projected branch norm")
        if not -ATOL <= self.fidelity_to_target <= 1.0 + ATOL:
            raise ArgumentError("fidelity out of range")

    def to_json(self) -> dict:
        return {
            "final_state": self.final_state.to_json(),
            "success_prob": self.success_prob,
            "norm_sq": self.norm_sq,
            "fidelity": self.fidelity_to_target,
        }


def _require_two_qubit(state: StateVector) -> None:
    if state.dims != (2, 2):
        raise ArgumentError(f"expected a two-qubit state, got dims {state.dims}")


def encode_two_qubit(spec: SuperpositionSpec) -> StateVector:
    """a |0>(e^{i gamma1} psi1) + b |1>(e^{i gamma2} psi2)."""
    zero = StateVector((2,), [1.0, 0.0], normalized=True)
    one = StateVector((2,), [0.0, 1.0], normalized=True)
    amps = (
        spec.weight_a * tensor(zero, make_qubit(spec.psi1)).amps
        + spec.weight_b * tensor(one, make_qubit(spec.psi2)).amps
    )
    return StateVector((2, 2), amps, normalized=True)


def phase_gate(state: StateVector, gamma1: float, gamma2: float) -> StateVector:
    """Ancilla z-rotation that turns the branch phases into a global one.

    Multiplies the ancilla-|0> branch by e^{-i theta_z} and the |1>
    branch by e^{+i theta_z}, theta_z = (gamma1 - gamma2)/2.  Acting on
    the encoded state this leaves e^{i(gamma1+gamma2)/2} (a|0>psi1 + b|1>psi2).
    """
    _require_two_qubit(state)
    theta_z = (gamma1 - gamma2) / 2.0
    amps = state.amps.copy()
    amps[:2] *= cmath.exp(-1j * theta_z)
    amps[2:] *= cmath.exp(1j * theta_z)
    return StateVector(state.dims, amps, normalized=state.normalized)


def ancilla_hadamard(state: StateVector) -> StateVector:
    _require_two_qubit(state)
    m = HADAMARD @ state.amps.reshape(2, 2)
    return StateVector(state.dims, m.reshape(-1), normalized=state.normalized)


def measure_ancilla(state: StateVector, outcome: int) -> tuple[StateVector, float]:
    """Unnormalized system branch for the given ancilla outcome, with its probability."""
    _require_two_qubit(state)
    if outcome not in (0, 1):
        raise ArgumentError(f"ancilla outcome must be 0 or 1, got {outcome}")
    branch = state.amps.reshape(2, 2)[outcome]
    sv = StateVector((2,), branch, normalized=False)
    return sv, sv.norm_sq


def run_direct(spec: SuperpositionSpec) -> ProtocolResult:
    """Encode, phase-correct, Hadamard, post-select ancilla |0>."""
    state = encode_two_qubit(spec)
    state = phase_gate(state, spec.psi1.gamma, spec.psi2.gamma)
    state = ancilla_hadamard(state)
    branch0, prob0 = measure_ancilla(state, 0)
    branch1, _ = measure_ancilla(state, 1)

    psi1 = make_qubit(spec.psi1.stripped())
    psi2 = make_qubit(spec.psi2.stripped())
    weighted = spec.weight_a * psi1.amps + spec.weight_b * psi2.amps
    target = StateVector((2,), weighted).normalize()

    final = branch0.normalize()
    diff = None
    if math.sqrt(branch1.norm_sq) >= BRANCH_NORM_FLOOR:
        diff = branch1.normalize()
    return ProtocolResult(
        final_state=final,
        branch_unnormalized=branch0,
        success_prob=prob0,
        norm_sq=float(np.vdot(weighted, weighted).real),
        target_state=target,
        fidelity_to_target=fidelity(pure_density(final), pure_density(target)),
        difference_branch=diff,
    )
