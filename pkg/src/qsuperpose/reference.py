"""Reference-state protocols built on the controlled-SWAP cascade.

Two pipelines produce the same superposed state but with different
success probabilities:

* ``run_three_qubit``: the prior three-qubit scheme — plain weights on
  the ancilla, controlled-SWAP, projection of the auxiliary onto the
  reference |chi>, then projection of the ancilla onto
  mu = (sqrt(c1)|0> + sqrt(c2)|1>)/sqrt(c1+c2).
* ``run_two_qubit_reduced``: the reduced scheme — primed weights absorb
  the overlap magnitudes into the ancilla preparation, a single
  chi-projection supplies the kappa phases, and a Hadamard plus
  ancilla-|0> projection harvests the sum branch.

Intermediate states stay unnormalized so projection probabilities
accumulate multiplicatively without renormalization error.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import reduce
from typing import Optional, Sequence

import numpy as np

from .direct import HADAMARD, BRANCH_NORM_FLOOR, ProtocolResult
from .errors import ArgumentError, ZeroOverlapError
from .linalg import (
    ATOL,
    EPS_OVERLAP,
    OverlapInfo,
    StateVector,
    fidelity,
    overlap_decompose,
    pure_density,
    tensor,
)

# Dense pipelines build n * d^n amplitudes; cap keeps them desk-sized.
MAX_PIPELINE_DIM = 4096


@dataclass(frozen=True, eq=False)
class ReferenceSpec:
    """n states of a d-level system, weights, and the referential state."""

    n: int
    d: int
    weights: tuple[complex, ...]
    states: tuple[StateVector, ...]
    chi: StateVector
    primed_weights: tuple[complex, ...] = field(init=False)
    norm_N: float = field(init=False)

    def __post_init__(self):
        object.__setattr__(self, "weights", tuple(complex(w) for w in self.weights))
        object.__setattr__(self, "states", tuple(self.states))
        if self.n < 1 or self.d < 1:
            raise ArgumentError("n and d must be positive")
        if self.n * self.d**self.n > MAX_PIPELINE_DIM:
            raise ArgumentError(
                f"n*d^n = {self.n * self.d ** self.n} exceeds the dense-pipeline cap "
                f"{MAX_PIPELINE_DIM}"
            )
        if len(self.weights) != self.n or len(self.states) != self.n:
            raise ArgumentError("need exactly n weights and n states")
        if any(s.dims != (self.d,) for s in self.states) or self.chi.dims != (self.d,):
            raise ArgumentError(f"all states must be single {self.d}-level systems")
        for s in (*self.states, self.chi):
            if abs(s.norm_sq - 1.0) > ATOL:
                raise ArgumentError("input and reference states must be normalized")
        total = sum(abs(w) ** 2 for w in self.weights)
        if abs(total - 1.0) > ATOL:
            raise ArgumentError(f"weights must satisfy sum |a_k|^2 = 1, got {total}")
        overlaps = [overlap_decompose(s, self.chi) for s in self.states]
        primed, norm_n = primed_weights(self.weights, overlaps)
        object.__setattr__(self, "primed_weights", tuple(primed))
        object.__setattr__(self, "norm_N", norm_n)

    def overlaps(self) -> list[OverlapInfo]:
        return [overlap_decompose(s, self.chi) for s in self.states]


def primed_weights(
    weights: Sequence[complex], overlaps: Sequence[OverlapInfo]
) -> tuple[list[complex], float]:
    """a_k' = a_k / sqrt(prod_{j != k} c_j) and N = sqrt(sum |a_k'|^2)."""
    cs = [o.c for o in overlaps]
    if any(c < EPS_OVERLAP for c in cs):
        raise ZeroOverlapError("an overlap magnitude is below the zero threshold")
    if len(weights) != len(cs):
        raise ArgumentError("need one overlap per weight")
    primed = []
    for k, a in enumerate(weights):
        others = math.prod(c for j, c in enumerate(cs) if j != k)
        primed.append(complex(a) / math.sqrt(others))
    norm_n = math.sqrt(sum(abs(p) ** 2 for p in primed))
    return primed, norm_n


def build_initial(spec: ReferenceSpec) -> StateVector:
    """(1/N) sum_k a_k' |k>_n  tensored with Psi_1 ... Psi_n."""
    anc = StateVector(
        (spec.n,), np.array(spec.primed_weights) / spec.norm_N, normalized=True
    )
    return reduce(tensor, spec.states, anc)


def _require_cascade_dims(state: StateVector, n: int, d: int) -> None:
    if state.dims != (n,) + (d,) * n:
        raise ArgumentError(
            f"expected dims {(n,) + (d,) * n} for the cascade, got {state.dims}"
        )


def controlled_swap_cascade(state: StateVector, n: int, d: int) -> StateVector:
    """Swap qudit 1 with qudit k+1 on the ancilla-|k> branch (k >= 1)."""
    _require_cascade_dims(state, n, d)
    a = state.amps.reshape((n,) + (d,) * n)
    out = np.empty_like(a)
    for k in range(n):
        out[k] = a[k] if k == 0 else np.swapaxes(a[k], 0, k)
    return StateVector(state.dims, out.reshape(-1), normalized=state.normalized)


def project_onto_reference(
    state: StateVector, chi: StateVector, n: int, d: int
) -> tuple[StateVector, float]:
    """Apply I_n x I_d x |chi><chi|^(n-1); returns the projected state and its norm^2."""
    _require_cascade_dims(state, n, d)
    if chi.dims != (d,):
        raise ArgumentError(f"reference state must have dimension {d}")
    if n == 1:
        return state, state.norm_sq
    aux = reduce(np.kron, [chi.amps] * (n - 1))
    a = state.amps.reshape(n, d, -1)
    coef = a @ aux.conj()
    out = coef[:, :, None] * aux[None, None, :]
    projected = StateVector(state.dims, out.reshape(-1), normalized=False)
    return projected, projected.norm_sq


def kappa_weighted_sum(
    a: complex, b: complex, psi1: StateVector, psi2: StateVector, chi: StateVector
) -> StateVector:
    """a kappa_2 |psi1> + b kappa_1 |psi2>, the (unnormalized) protocol target."""
    o1 = overlap_decompose(psi1, chi)
    o2 = overlap_decompose(psi2, chi)
    return StateVector(psi1.dims, a * o2.kappa * psi1.amps + b * o1.kappa * psi2.amps)


def closed_form_p3(
    a: complex, b: complex, psi1: StateVector, psi2: StateVector, chi: StateVector
) -> float:
    """P3 = c1 c2 ||a kappa2 psi1 + b kappa1 psi2||^2 / (c1 + c2)."""
    c1 = overlap_decompose(psi1, chi).c
    c2 = overlap_decompose(psi2, chi).c
    return c1 * c2 / (c1 + c2) * kappa_weighted_sum(a, b, psi1, psi2, chi).norm_sq


def closed_form_p2(
    a: complex, b: complex, psi1: StateVector, psi2: StateVector, chi: StateVector
) -> float:
    """P2 = c1 c2 ||a kappa2 psi1 + b kappa1 psi2||^2 / (2 (c1 |a|^2 + c2 |b|^2))."""
    c1 = overlap_decompose(psi1, chi).c
    c2 = overlap_decompose(psi2, chi).c
    nsq = kappa_weighted_sum(a, b, psi1, psi2, chi).norm_sq
    return c1 * c2 * nsq / (2.0 * (c1 * abs(a) ** 2 + c2 * abs(b) ** 2))


def _pair_result(
    final_unnorm: np.ndarray,
    d: int,
    a: complex,
    b: complex,
    psi1: StateVector,
    psi2: StateVector,
    chi: StateVector,
    difference: Optional[StateVector],
) -> ProtocolResult:
    branch = StateVector((d,), final_unnorm, normalized=False)
    target_unnorm = kappa_weighted_sum(a, b, psi1, psi2, chi)
    final = branch.normalize()
    target = target_unnorm.normalize()
    return ProtocolResult(
        final_state=final,
        branch_unnormalized=branch,
        success_prob=branch.norm_sq,
        norm_sq=target_unnorm.norm_sq,
        target_state=target,
        fidelity_to_target=fidelity(pure_density(final), pure_density(target)),
        difference_branch=difference,
    )


def run_three_qubit(
    a: complex, b: complex, psi1: StateVector, psi2: StateVector, chi: StateVector
) -> ProtocolResult:
    """The prior three-qubit protocol: plain weights plus the mu-projection."""
    if abs(abs(a) ** 2 + abs(b) ** 2 - 1.0) > ATOL:
        raise ArgumentError("weights must satisfy |a|^2 + |b|^2 = 1")
    for s in (psi1, psi2, chi):
        if abs(s.norm_sq - 1.0) > ATOL:
            raise ArgumentError("input and reference states must be normalized")
    d = psi1.dims[0]
    c1 = overlap_decompose(psi1, chi).c
    c2 = overlap_decompose(psi2, chi).c
    anc = StateVector((2,), [a, b], normalized=True)
    state = tensor(tensor(anc, psi1), psi2)
    state = controlled_swap_cascade(state, 2, d)
    state, _ = project_onto_reference(state, chi, 2, d)
    # Contract the auxiliary against chi, then the ancilla against mu.
    coef = state.amps.reshape(2, d, d) @ chi.amps.conj()
    mu = np.array([math.sqrt(c1), math.sqrt(c2)]) / math.sqrt(c1 + c2)
    final_unnorm = mu.conj() @ coef
    return _pair_result(final_unnorm, d, a, b, psi1, psi2, chi, difference=None)


def run_two_qubit_reduced(
    a: complex, b: complex, psi1: StateVector, psi2: StateVector, chi: StateVector
) -> ProtocolResult:
    """The reduced protocol: primed weights, one chi-projection, Hadamard."""
    d = psi1.dims[0]
    spec = ReferenceSpec(n=2, d=d, weights=(a, b), states=(psi1, psi2), chi=chi)
    state = build_initial(spec)
    state = controlled_swap_cascade(state, 2, d)
    state, _ = project_onto_reference(state, chi, 2, d)
    coef = state.amps.reshape(2, d, d) @ chi.amps.conj()
    branches = HADAMARD @ coef.reshape(2, d)
    diff = StateVector((d,), branches[1], normalized=False)
    difference = (
        diff.normalize() if math.sqrt(diff.norm_sq) >= BRANCH_NORM_FLOOR else None
    )
    return _pair_result(branches[0], d, a, b, psi1, psi2, chi, difference=difference)
