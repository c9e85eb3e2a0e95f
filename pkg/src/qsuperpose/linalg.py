"""Exact complex linear algebra for small composite Hilbert spaces.

States and density matrices carry the list of subsystem dimensions
(ancilla first). Flattening is big-endian over ``dims``: the basis ket
|j>_n ⊗ |k>_d sits at flat index ``j*d + k``, which is exactly numpy's
Kronecker-product convention.

All values are immutable after construction and every operation is a
pure function, so everything here is safe to call concurrently.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from .errors import ArgumentError, DegenerateInputError, ZeroOverlapError

# Normalization / Hermiticity checks; dimensions stay tiny (<= ~81) so
# double precision leaves ample headroom.
ATOL = 1e-12
# Eigenvalue floor tolerating roundoff from channel compositions.
PSD_FLOOR = -1e-10
# |<chi|psi>| below this counts as a zero overlap.
EPS_OVERLAP = 1e-9


def _as_dims(dims: Iterable[int]) -> tuple[int, ...]:
    out = tuple(int(d) for d in dims)
    if any(d < 1 for d in out):
        raise ArgumentError(f"subsystem dimensions must be positive, got {out}")
    return out


def _check_finite(arr: np.ndarray, what: str) -> None:
    if not np.all(np.isfinite(arr.view(float))):
        raise ArgumentError(f"{what} contains NaN or Inf")


@dataclass(frozen=True, eq=False)
class StateVector:
    """Complex amplitude vector over a composite Hilbert space."""

    dims: tuple[int, ...]
    amps: np.ndarray
    normalized: bool = False

    def __post_init__(self):
        dims = _as_dims(self.dims)
        amps = np.array(self.amps, dtype=complex).reshape(-1)
        _check_finite(amps, "state amplitudes")
        if amps.size != math.prod(dims):
            raise ArgumentError(
                f"amplitude count {amps.size} does not match dims {dims}"
            )
        if self.normalized and abs(np.vdot(amps, amps).real - 1.0) > ATOL:
            raise ArgumentError("state flagged normalized but has unit-norm defect")
        amps.flags.writeable = False
        object.__setattr__(self, "dims", dims)
        object.__setattr__(self, "amps", amps)

    @property
    def dim(self) -> int:
        return self.amps.size

    @property
    def norm_sq(self) -> float:
        return float(np.vdot(self.amps, self.amps).real)

    def normalize(self) -> "StateVector":
        n = math.sqrt(self.norm_sq)
        if n < ATOL:
            raise DegenerateInputError("cannot normalize a (numerically) zero state")
        return StateVector(self.dims, self.amps / n, normalized=True)

    def scaled(self, factor: complex) -> "StateVector":
        return StateVector(self.dims, self.amps * factor, normalized=False)

    def to_json(self) -> dict:
        return {
            "dims": list(self.dims),
            "amps": [[float(a.real), float(a.imag)] for a in self.amps],
        }

    @staticmethod
    def from_json(obj: dict) -> "StateVector":
        try:
            dims = obj["dims"]
            amps = np.array([complex(re, im) for re, im in obj["amps"]])
        except (KeyError, TypeError, ValueError) as exc:
            raise ArgumentError(f"malformed state JSON: {exc}") from exc
        normed = abs(float(np.vdot(amps, amps).real) - 1.0) <= ATOL
        return StateVector(tuple(dims), amps, normalized=normed)


@dataclass(frozen=True, eq=False)
class DensityMatrix:
    """Hermitian PSD matrix, possibly sub-normalized (block after projection)."""

    dims: tuple[int, ...]
    mat: np.ndarray
    trace: float = field(init=False)

    def __post_init__(self):
        dims = _as_dims(self.dims)
        mat = np.array(self.mat, dtype=complex)
        d = math.prod(dims)
        if mat.shape != (d, d):
            raise ArgumentError(f"matrix shape {mat.shape} does not match dims {dims}")
        _check_finite(mat, "density matrix entries")
        if np.max(np.abs(mat - mat.conj().T)) > ATOL:
            raise ArgumentError("density matrix is not Hermitian within tolerance")
        if np.min(np.linalg.eigvalsh(mat)) < PSD_FLOOR:
            raise ArgumentError("density matrix has a negative eigenvalue")
        tr = float(np.trace(mat).real)
        if tr <= ATOL:
            raise DegenerateInputError("density matrix has (numerically) zero trace")
        if tr > 1.0 + ATOL:
            raise ArgumentError(f"density matrix trace {tr} exceeds 1")
        mat.flags.writeable = False
        object.__setattr__(self, "dims", dims)
        object.__setattr__(self, "mat", mat)
        object.__setattr__(self, "trace", tr)

    @property
    def dim(self) -> int:
        return self.mat.shape[0]

    def purity(self) -> float:
        return float(np.trace(self.mat @ self.mat).real)

    def to_json(self) -> dict:
        return {
            "dims": list(self.dims),
            "rows": [
                [[float(v.real), float(v.imag)] for v in row] for row in self.mat
            ],
        }

    @staticmethod
    def from_json(obj: dict) -> "DensityMatrix":
        try:
            dims = obj["dims"]
            mat = np.array(
                [[complex(re, im) for re, im in row] for row in obj["rows"]]
            )
        except (KeyError, TypeError, ValueError) as exc:
            raise ArgumentError(f"malformed density-matrix JSON: {exc}") from exc
        return DensityMatrix(tuple(dims), mat)


@dataclass(frozen=True)
class QubitParams:
    """Bloch angles plus an overall phase: e^{i gamma}(cos(theta/2)|0> + e^{i phi} sin(theta/2)|1>)."""

    theta: float
    phi: float
    gamma: float = 0.0

    def __post_init__(self):
        if not 0.0 <= self.theta <= math.pi:
            raise ArgumentError(f"theta must lie in [0, pi], got {self.theta}")
        if not 0.0 <= self.phi < 2.0 * math.pi:
            raise ArgumentError(f"phi must lie in [0, 2pi), got {self.phi}")
        if not 0.0 <= self.gamma < 2.0 * math.pi:
            raise ArgumentError(f"gamma must lie in [0, 2pi), got {self.gamma}")

    def stripped(self) -> "QubitParams":
        """Same physical ray with the overall phase removed."""
        return QubitParams(self.theta, self.phi, 0.0)


@dataclass(frozen=True)
class OverlapInfo:
    """Squared overlap magnitude and unit-modulus phase factor of <chi|psi>."""

    c: float
    kappa: complex

    def __post_init__(self):
        if self.c <= 0.0:
            raise ArgumentError("overlap magnitude c must be positive")
        if abs(abs(self.kappa) - 1.0) > ATOL:
            raise ArgumentError("kappa must have unit modulus")


def make_qubit(p: QubitParams) -> StateVector:
    amps = np.exp(1j * p.gamma) * np.array(
        [math.cos(p.theta / 2.0), np.exp(1j * p.phi) * math.sin(p.theta / 2.0)]
    )
    return StateVector((2,), amps, normalized=True)


def basis_state(dim: int, index: int) -> StateVector:
    if not 0 <= index < dim:
        raise ArgumentError(f"basis index {index} out of range for dimension {dim}")
    amps = np.zeros(dim, dtype=complex)
    amps[index] = 1.0
    return StateVector((dim,), amps, normalized=True)


def tensor(u: StateVector, v: StateVector) -> StateVector:
    return StateVector(
        u.dims + v.dims,
        np.kron(u.amps, v.amps),
        normalized=u.normalized and v.normalized,
    )


def pure_density(state: StateVector) -> DensityMatrix:
    psi = state.amps if state.normalized else state.normalize().amps
    return DensityMatrix(state.dims, np.outer(psi, psi.conj()))


def partial_trace(rho: DensityMatrix, keep: Sequence[int]) -> DensityMatrix:
    """Reduced density matrix over the subsystems listed in ``keep``."""
    n = len(rho.dims)
    keep = sorted(set(int(k) for k in keep))
    if any(k < 0 or k >= n for k in keep):
        raise ArgumentError(f"keep indices {keep} invalid for dims {rho.dims}")
    kept = set(keep)
    t = rho.mat.reshape(rho.dims + rho.dims)
    row = list(range(n))
    col = [n + i if i in kept else i for i in range(n)]
    out = [i for i in keep] + [n + i for i in keep]
    reduced = np.einsum(t, row + col, out)
    d = math.prod(rho.dims[i] for i in keep) if keep else 1
    new_dims = tuple(rho.dims[i] for i in keep) if keep else (1,)
    return DensityMatrix(new_dims, reduced.reshape(d, d))


def fidelity(rho_e: DensityMatrix, rho_t: DensityMatrix) -> float:
    """Tr(rho_e rho_t) / sqrt(Tr(rho_e^2) Tr(rho_t^2))."""
    if rho_e.dims != rho_t.dims:
        raise ArgumentError(f"dimension mismatch: {rho_e.dims} vs {rho_t.dims}")
    if rho_e.trace <= ATOL or rho_t.trace <= ATOL:
        raise DegenerateInputError("fidelity of a zero-trace state is undefined")
    num = float(np.trace(rho_e.mat @ rho_t.mat).real)
    den = math.sqrt(rho_e.purity() * rho_t.purity())
    return num / den


def overlap_decompose(psi: StateVector, chi: StateVector) -> OverlapInfo:
    """Split <chi|psi> into squared magnitude c and unit phase kappa."""
    if psi.dims != chi.dims:
        raise ArgumentError(f"dimension mismatch: {psi.dims} vs {chi.dims}")
    ip = complex(np.vdot(chi.amps, psi.amps))
    mag = abs(ip)
    if mag < EPS_OVERLAP:
        raise ZeroOverlapError(
            "overlap with the referential state is zero; the protocol requires "
            f"known nonzero overlaps (|<chi|psi>| = {mag:.3e})"
        )
    return OverlapInfo(c=mag * mag, kappa=ip / mag)


def phase_equivalent(u: StateVector, v: StateVector, tol: float = 1e-9) -> bool:
    """True iff u and v are the same state up to a global phase."""
    if u.dims != v.dims:
        raise ArgumentError(f"dimension mismatch: {u.dims} vs {v.dims}")
    nu = math.sqrt(u.norm_sq)
    nv = math.sqrt(v.norm_sq)
    if nu < ATOL or nv < ATOL:
        raise DegenerateInputError("phase comparison of a zero state is undefined")
    return abs(np.vdot(u.amps, v.amps)) / (nu * nv) >= 1.0 - tol
