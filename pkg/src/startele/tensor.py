"""Dense linear algebra for 1-4 qubit pure states and density matrices.

Basis ordering is big-endian: the ket |q0 q1 ... q_{k-1}> sits at index
sum_j q_j * 2**(k-1-j), so qubit 0 is the leftmost label.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Mapping, Sequence, Union

import numpy as np

ATOL = 1e-12
SPECTRAL_TOL = 1e-10
MAX_QUBITS = 4

QubitLabel = Union[int, str]


class DimensionError(ValueError):
    """Raised when an operation would exceed the qubit cap or mixes sizes."""


def qubit_index(label: QubitLabel, num_qubits: int) -> int:
    """Map an integer label or a party letter ("A", "B", ...) to an index."""
    if isinstance(label, str):
        if len(label) != 1 or not label.isalpha():
            raise ValueError(f"bad qubit label {label!r}")
        idx = ord(label.upper()) - ord("A")
    else:
        idx = int(label)
    if not 0 <= idx < num_qubits:
        raise ValueError(f"qubit label {label!r} out of range for {num_qubits} qubits")
    return idx


def _num_qubits_for(dim: int) -> int:
    k = dim.bit_length() - 1
    if dim < 2 or 1 << k != dim:
        raise DimensionError(f"dimension {dim} is not a power of two")
    return k


def _readonly(arr: np.ndarray) -> np.ndarray:
    arr = np.array(arr, dtype=complex)
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True, eq=False)
class PureState:
    amplitudes: np.ndarray

    def __post_init__(self):
        amps = np.asarray(self.amplitudes, dtype=complex)
        if amps.ndim != 1:
            raise DimensionError("amplitudes must be a 1-D array")
        k = _num_qubits_for(amps.size)
        if k > MAX_QUBITS:
            raise DimensionError(f"{k} qubits exceeds the cap of {MAX_QUBITS}")
        norm = np.linalg.norm(amps)
        if abs(norm - 1.0) > ATOL:
            raise ValueError(f"state is not normalized (norm {norm!r})")
        object.__setattr__(self, "amplitudes", _readonly(amps))

    @property
    def num_qubits(self) -> int:
        return self.amplitudes.size.bit_length() - 1

    @property
    def dim(self) -> int:
        return self.amplitudes.size

    @classmethod
    def normalized(cls, vec) -> "PureState":
        vec = np.asarray(vec, dtype=complex)
        norm = np.linalg.norm(vec)
        if norm < ATOL:
            raise ValueError("cannot normalize the zero vector")
        return cls(vec / norm)

    @classmethod
    def from_kets(cls, kets: Mapping[str, complex], normalize: bool = True) -> "PureState":
        """Build a state from bit-string keys, e.g. ``{"000": 1, "111": 1}``."""
        widths = {len(k) for k in kets}
        if len(widths) != 1:
            raise ValueError("all kets must have the same number of qubits")
        (k,) = widths
        vec = np.zeros(2**k, dtype=complex)
        for bits, amp in kets.items():
            vec[int(bits, 2)] += amp
        return cls.normalized(vec) if normalize else cls(vec)

    @classmethod
    def basis(cls, bits: str) -> "PureState":
        return cls.from_kets({bits: 1.0})

    def tensor(self) -> np.ndarray:
        """Amplitudes reshaped to one axis per qubit."""
        return self.amplitudes.reshape((2,) * self.num_qubits)

    def density(self) -> "DensityMatrix":
        psi = self.amplitudes
        return DensityMatrix(np.outer(psi, psi.conj()), factor=psi.reshape(-1, 1))

    def allclose(self, other: "PureState", atol: float = ATOL) -> bool:
        return self.dim == other.dim and bool(np.allclose(self.amplitudes, other.amplitudes, rtol=0, atol=atol))

    def __repr__(self) -> str:
        terms = [
            f"{complex(a):.6g}|{i:0{self.num_qubits}b}>"
            for i, a in enumerate(self.amplitudes)
            if abs(a) > 1e-15
        ]
        return f"PureState({' + '.join(terms)})"


@dataclass(frozen=True, eq=False)
class DensityMatrix:
    """Hermitian, PSD, unit-trace matrix on 1-3 qubits.

    ``factor`` optionally carries a matrix V with rho = V V^dagger.  Partial
    traces of pure states know V exactly, and the concurrence uses it to
    avoid taking square roots of round-off eigenvalues.
    """

    entries: np.ndarray
    factor: np.ndarray | None = field(default=None, repr=False)

    def __post_init__(self):
        rho = np.asarray(self.entries, dtype=complex)
        if rho.ndim != 2 or rho.shape[0] != rho.shape[1]:
            raise DimensionError("density matrix must be square")
        k = _num_qubits_for(rho.shape[0])
        if k > 3:
            raise DimensionError("density matrices are limited to 3 qubits")
        if np.max(np.abs(rho - rho.conj().T)) > ATOL:
            raise ValueError("density matrix is not Hermitian")
        if abs(np.trace(rho) - 1.0) > ATOL:
            raise ValueError(f"density matrix trace {np.trace(rho).real!r} != 1")
        if np.linalg.eigvalsh(rho)[0] < -SPECTRAL_TOL:
            raise ValueError("density matrix has a negative eigenvalue")
        object.__setattr__(self, "entries", _readonly(rho))
        if self.factor is not None:
            object.__setattr__(self, "factor", _readonly(self.factor))

    @property
    def num_qubits(self) -> int:
        return self.entries.shape[0].bit_length() - 1

    @property
    def dim(self) -> int:
        return self.entries.shape[0]


@dataclass(frozen=True, eq=False)
class HermitianSpectrum:
    eigenvalues: np.ndarray
    eigenvectors: np.ndarray | None = None


def hermitian_spectrum(matrix, vectors: bool = False) -> HermitianSpectrum:
    """Eigenvalues (descending) of a Hermitian matrix via a symmetric solver."""
    if isinstance(matrix, DensityMatrix):
        matrix = matrix.entries
    matrix = np.asarray(matrix, dtype=complex)
    if vectors:
        w, v = np.linalg.eigh(matrix)
        return HermitianSpectrum(w[::-1].copy(), v[:, ::-1].copy())
    return HermitianSpectrum(np.linalg.eigvalsh(matrix)[::-1].copy())


def tensor_product(a: PureState, b: PureState) -> PureState:
    if a.num_qubits + b.num_qubits > MAX_QUBITS:
        raise DimensionError(
            f"{a.num_qubits} + {b.num_qubits} qubits exceeds the cap of {MAX_QUBITS}"
        )
    return PureState.normalized(np.kron(a.amplitudes, b.amplitudes))


def partial_trace(rho: DensityMatrix | PureState, keep: Sequence[QubitLabel]) -> DensityMatrix:
    """Reduce to the qubits in ``keep``, ordered as given."""
    n = rho.num_qubits
    keep_idx = [qubit_index(q, n) for q in keep]
    if not keep_idx or len(set(keep_idx)) != len(keep_idx) or len(keep_idx) >= n:
        raise ValueError(f"keep must be a nonempty strict subset of qubits, got {list(keep)}")
    traced = [q for q in range(n) if q not in keep_idx]
    dk = 2 ** len(keep_idx)

    if isinstance(rho, PureState):
        m = np.transpose(rho.tensor(), keep_idx + traced).reshape(dk, -1)
        return DensityMatrix(m @ m.conj().T, factor=m)

    t = rho.entries.reshape((2,) * (2 * n))
    perm = keep_idx + traced
    t = np.transpose(t, perm + [n + q for q in perm])
    dt = 2 ** len(traced)
    t = t.reshape(dk, dt, dk, dt)
    return DensityMatrix(np.einsum("iaja->ij", t))


def partial_transpose(rho: DensityMatrix, subsystem: QubitLabel = 0) -> np.ndarray:
    """Partial transpose of a two-qubit density matrix on one subsystem."""
    if rho.num_qubits != 2:
        raise DimensionError("partial_transpose is defined for 2-qubit states only")
    t = rho.entries.reshape(2, 2, 2, 2)
    if qubit_index(subsystem, 2) == 0:
        t = t.transpose(2, 1, 0, 3)
    else:
        t = t.transpose(0, 3, 2, 1)
    return t.reshape(4, 4)


def fidelity_pure(a: PureState, b: PureState) -> float:
    if a.dim != b.dim:
        raise DimensionError("fidelity needs states of equal size")
    return float(min(1.0, abs(np.vdot(a.amplitudes, b.amplitudes)) ** 2))


def is_unitary(u, atol: float = ATOL) -> bool:
    u = np.asarray(u, dtype=complex)
    return u.shape == (2, 2) and bool(np.allclose(u @ u.conj().T, np.eye(2), rtol=0, atol=atol))


def apply_one_qubit_unitary(state: PureState, u, target: QubitLabel) -> PureState:
    u = np.asarray(u, dtype=complex)
    if not is_unitary(u):
        raise ValueError("operator is not a 2x2 unitary")
    q = qubit_index(target, state.num_qubits)
    out = np.moveaxis(np.tensordot(u, state.tensor(), axes=(1, q)), 0, q)
    return PureState(out.reshape(-1))


def schmidt_coefficients(state: PureState, cut: QubitLabel = 0) -> tuple[float, float]:
    """Schmidt coefficients of a two-qubit state, descending."""
    if state.num_qubits != 2:
        raise DimensionError("schmidt_coefficients needs a 2-qubit state")
    m = state.amplitudes.reshape(2, 2)
    if qubit_index(cut, 2) == 1:
        m = m.T
    s = np.linalg.svd(m, compute_uv=False)
    return float(s[0]), float(s[1])
