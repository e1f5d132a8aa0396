"""Self-inverse factors X (X = X^dagger, X^2 = I), product Hamiltonians and their evolution."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .numerics import (
    HERMITIAN_TOL,
    DimensionError,
    NotHermitianError,
    as_matrix,
    eigh,
    expm_hermitian,
    is_hermitian,
    kron,
)
from .states import BipartiteState, number_parity, two_j

SNAP_TOL = 1e-8
DEFAULT_FOCK_DIM = 32


class FactorError(ValueError):
    """Base class for rejected self-inverse factors."""


class NotInvolutionError(FactorError):
    """X @ X differs from the identity."""


class TrivialInvolutionError(FactorError):
    """X is +I or -I, so one eigenspace is empty."""


class FactorNotHermitianError(FactorError, NotHermitianError):
    pass


@dataclass(frozen=True, eq=False)
class SelfInverseFactor:
    matrix: np.ndarray
    plus: np.ndarray  # orthonormal columns spanning the +1 eigenspace
    minus: np.ndarray  # orthonormal columns spanning the -1 eigenspace
    name: str = ""

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]


def make_factor(m, name: str = "") -> SelfInverseFactor:
    """Validate a Hermitian involution and split its ±1 eigenspaces.

    Eigenvalues must lie within 1e-8 of ±1; the matrix is then rebuilt
    from the snapped spectrum so eigenspace membership is exact.
    """
    m = as_matrix(m)
    if m.shape[0] != m.shape[1]:
        raise DimensionError(f"factor must be square, got {m.shape}")
    if not is_hermitian(m, HERMITIAN_TOL):
        raise FactorNotHermitianError("factor is not Hermitian")
    if np.max(np.abs(m @ m - np.eye(m.shape[0]))) > HERMITIAN_TOL:
        raise NotInvolutionError("factor does not square to the identity")
    dec = eigh(m)
    vals = dec.eigenvalues
    if np.any(np.minimum(np.abs(vals - 1), np.abs(vals + 1)) > SNAP_TOL):
        raise NotInvolutionError(f"eigenvalues {vals} are not all ±1")
    pos = vals > 0
    plus, minus = dec.eigenvectors[:, pos], dec.eigenvectors[:, ~pos]
    if plus.shape[1] == 0 or minus.shape[1] == 0:
        raise TrivialInvolutionError("factor is ±identity; a nontrivial involution is required")
    snapped = plus @ plus.conj().T - minus @ minus.conj().T
    return SelfInverseFactor(snapped, plus, minus, name)


def pauli_z() -> SelfInverseFactor:
    return make_factor(np.diag([1.0, -1.0]), "pauli-z")


def parity(j) -> SelfInverseFactor:
    """Spin parity ``(-1)^N`` with ``N = Jz + j``, dimension ``2j + 1``."""
    d = two_j(j) + 1
    return make_factor(np.diag(number_parity(d)), f"parity:j={d - 1}/2")


def boson_parity(D: int = DEFAULT_FOCK_DIM) -> SelfInverseFactor:
    """Oscillator parity ``(-1)^{a^dagger a}`` truncated to ``D`` Fock levels."""
    if D < 2:
        raise ValueError("Fock truncation needs D >= 2")
    return make_factor(np.diag(number_parity(D)), f"boson:D={D}")


def extend_factor(x: SelfInverseFactor, ancilla: int, side: str = "A") -> SelfInverseFactor:
    """Embed ``x`` as ``I_anc ⊗ X`` (side A, ancilla first) or ``X ⊗ I_anc`` (side B)."""
    if ancilla == 1:
        return x
    eye = np.eye(ancilla)
    m = kron(eye, x.matrix) if side == "A" else kron(x.matrix, eye)
    return make_factor(m, f"{x.name}+anc{ancilla}")


@dataclass(frozen=True, eq=False)
class ProductHamiltonian:
    factor_a: SelfInverseFactor
    factor_b: SelfInverseFactor
    matrix: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        object.__setattr__(self, "matrix", kron(self.factor_a.matrix, self.factor_b.matrix))

    @property
    def dims(self) -> tuple[int, int]:
        return self.factor_a.dim, self.factor_b.dim


def ising() -> ProductHamiltonian:
    return ProductHamiltonian(pauli_z(), pauli_z())


def h1(j) -> ProductHamiltonian:
    return ProductHamiltonian(parity(j), parity(j))


def evolution(h: ProductHamiltonian, t: float) -> np.ndarray:
    """``exp(-iHt) = cos t I - i sin t X_A ⊗ X_B``."""
    n = h.matrix.shape[0]
    return math.cos(t) * np.eye(n, dtype=complex) - 1j * math.sin(t) * h.matrix


def evolution_numeric(h, t: float) -> np.ndarray:
    """``exp(-iHt)`` by diagonalization; works for any Hermitian matrix."""
    m = h.matrix if isinstance(h, ProductHamiltonian) else h
    return expm_hermitian(m, t)


def embed(op, ancilla_a: int = 1, ancilla_b: int = 1) -> np.ndarray:
    """``I_{A'} ⊗ op ⊗ I_{B'}`` in the A'-A-B-B' ordering."""
    return np.kron(np.kron(np.eye(ancilla_a), op), np.eye(ancilla_b))


def evolve_state(
    h: ProductHamiltonian,
    state: BipartiteState,
    t: float,
    ancilla_a: int = 1,
    ancilla_b: int = 1,
) -> BipartiteState:
    """Evolve under ``U(t)`` with the cut between A'A and BB'."""
    dA, dB = h.dims
    if state.dA != ancilla_a * dA or state.dB != dB * ancilla_b:
        raise DimensionError(
            f"state split {state.dA}x{state.dB} does not factor as "
            f"({ancilla_a}*{dA})x({dB}*{ancilla_b})"
        )
    u = embed(evolution(h, t), ancilla_a, ancilla_b)
    return BipartiteState(state.dA, state.dB, u @ state.amplitudes)
