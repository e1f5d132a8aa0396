"""Bipartite pure states and the named constructors used throughout.

States are stored as A-major amplitude vectors: the amplitude of
``|a>|b>`` sits at index ``a * dB + b``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import TYPE_CHECKING

import numpy as np

from .numerics import DimensionError, expm_hermitian, svd

if TYPE_CHECKING:
    from .self_inverse import SelfInverseFactor

SCHMIDT_CUTOFF = 1e-12
NORM_TOL = 1e-12


@dataclass(frozen=True, eq=False)
class BipartiteState:
    dA: int
    dB: int
    amplitudes: np.ndarray

    def __post_init__(self):
        amps = np.asarray(self.amplitudes, dtype=complex).reshape(-1)
        if amps.size != self.dA * self.dB:
            raise DimensionError(f"{amps.size} amplitudes do not fit a {self.dA}x{self.dB} split")
        norm = np.linalg.norm(amps)
        if abs(norm - 1.0) > NORM_TOL:
            raise ValueError(f"state is not normalized (norm {norm!r})")
        amps.setflags(write=False)
        object.__setattr__(self, "amplitudes", amps)

    @classmethod
    def from_vector(cls, vec, dA: int, dB: int) -> "BipartiteState":
        """Build a state from an unnormalized vector."""
        v = np.asarray(vec, dtype=complex).reshape(-1)
        n = np.linalg.norm(v)
        if n == 0:
            raise ValueError("zero vector is not a state")
        return cls(dA, dB, v / n)

    @classmethod
    def product(cls, a, b) -> "BipartiteState":
        a = np.asarray(a, dtype=complex)
        b = np.asarray(b, dtype=complex)
        return cls.from_vector(np.kron(a, b), a.size, b.size)

    @property
    def matrix(self) -> np.ndarray:
        """Amplitudes as a ``dA x dB`` matrix."""
        return self.amplitudes.reshape(self.dA, self.dB)

    def density(self) -> np.ndarray:
        return np.outer(self.amplitudes, self.amplitudes.conj())

    def reduced(self, keep: str = "A") -> np.ndarray:
        m = self.matrix
        if keep == "A":
            return m @ m.conj().T
        return (m.conj().T @ m).T

    def apply(self, op) -> "BipartiteState":
        """Apply an operator on the full space and renormalize."""
        return BipartiteState.from_vector(np.asarray(op) @ self.amplitudes, self.dA, self.dB)

    def swapped(self) -> "BipartiteState":
        return BipartiteState(self.dB, self.dA, self.matrix.T.reshape(-1))

    def fidelity(self, other: "BipartiteState") -> float:
        return float(abs(np.vdot(self.amplitudes, other.amplitudes)))


@dataclass(frozen=True)
class SchmidtDecomposition:
    coefficients: np.ndarray  # lambda_n, descending, summing to 1
    vectors_a: np.ndarray  # columns psi_n
    vectors_b: np.ndarray  # columns phi_n

    @property
    def rank(self) -> int:
        return len(self.coefficients)

    def reconstruct(self) -> np.ndarray:
        dA, dB = self.vectors_a.shape[0], self.vectors_b.shape[0]
        m = (self.vectors_a * np.sqrt(self.coefficients)) @ self.vectors_b.T
        return m.reshape(dA * dB)


@dataclass(frozen=True)
class PseudoQubitPair:
    gamma: np.ndarray
    gamma_bar: np.ndarray
    delta: np.ndarray
    delta_bar: np.ndarray

    @property
    def overlap_a(self) -> complex:
        return complex(np.vdot(self.gamma, self.gamma_bar))

    @property
    def overlap_b(self) -> complex:
        return complex(np.vdot(self.delta, self.delta_bar))


def pseudo_qubit_pair(gamma, delta, xa: "SelfInverseFactor", xb: "SelfInverseFactor") -> PseudoQubitPair:
    g = np.asarray(gamma, dtype=complex)
    d = np.asarray(delta, dtype=complex)
    g, d = g / np.linalg.norm(g), d / np.linalg.norm(d)
    return PseudoQubitPair(g, xa.matrix @ g, d, xb.matrix @ d)


def schmidt(state: BipartiteState) -> SchmidtDecomposition:
    u, s, vh = svd(state.matrix)
    lam = s**2
    keep = lam > SCHMIDT_CUTOFF
    lam = lam[keep]
    # renormalize after discarding numerical zeros
    return SchmidtDecomposition(lam / lam.sum(), u[:, keep], vh[keep, :].T)


def shannon_bits(p) -> float:
    p = np.asarray(p, dtype=float)
    p = p[p > 0]
    return max(float(-np.sum(p * np.log2(p))), 0.0)  # rounding can push a lone weight past 1


def entropy(state: BipartiteState) -> float:
    """Entanglement entropy in bits."""
    return shannon_bits(schmidt(state).coefficients)


def concurrence_two_term(overlap_a: complex, overlap_b: complex, t: float) -> float:
    """Concurrence of ``cos t |g>|d> - i sin t |g'>|d'>`` from the two overlaps."""
    ca, cb = abs(overlap_a) ** 2, abs(overlap_b) ** 2
    if ca > 1 + 1e-12 or cb > 1 + 1e-12:
        raise ValueError("overlaps must have modulus at most 1")
    return abs(math.sin(2 * t)) * math.sqrt(max(1.0 - ca, 0.0) * max(1.0 - cb, 0.0))


def schmidt_concurrence(state: BipartiteState) -> float:
    """Pure-state concurrence ``sqrt(2 (1 - sum lambda^2))``; ``2 sqrt(l1 l2)`` at rank 2."""
    lam = schmidt(state).coefficients
    return math.sqrt(max(2.0 * (1.0 - float(np.sum(lam**2))), 0.0))


def optimal_input(xa: "SelfInverseFactor", xb: "SelfInverseFactor", x: float, phase: complex = -1j) -> BipartiteState:
    """Two-branch state with Schmidt weights ``(x, 1-x)`` in the balanced ± bases.

    Builds ``sqrt(x)/2 (|+>+|->)(|+>+|->) + phase sqrt(1-x)/2 (|+>-|->)(|+>-|->)``
    from the first eigenvector of each eigenspace. With ``phase=-1j`` the
    rate at t=0 under ``exp(-iHt)`` is ``+2 sqrt(x(1-x)) log2(x/(1-x))``;
    ``phase=+1j`` gives the same magnitude with opposite sign.
    """
    if not 0 < x < 1:
        raise ValueError("weight x must lie in (0, 1)")
    pa, ma = xa.plus[:, 0], xa.minus[:, 0]
    pb, mb = xb.plus[:, 0], xb.minus[:, 0]
    even = np.kron(pa + ma, pb + mb)
    odd = np.kron(pa - ma, pb - mb)
    vec = math.sqrt(x) / 2 * even + phase * math.sqrt(1 - x) / 2 * odd
    return BipartiteState(xa.dim, xb.dim, vec)


def two_j(j) -> int:
    """Return the integer ``2j`` for a spin given as number, Fraction or ``'3/2'``."""
    if isinstance(j, str):
        num, _, den = j.partition("/")
        val = float(num) / float(den or 1)
    else:
        val = float(j)
    tj = round(2 * val)
    if tj < 1 or abs(2 * val - tj) > 1e-9:
        raise ValueError(f"spin j={j!r} must be a positive half-integer")
    return tj


def spin_operators(j) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """``(Jz, J+, J-)`` in the number basis ``|n> = |j; n - j>``, n = 0..2j."""
    tj = two_j(j)
    jj = tj / 2
    m = np.arange(tj + 1) - jj
    jz = np.diag(m).astype(complex)
    jp = np.zeros((tj + 1, tj + 1), dtype=complex)
    for n in range(tj):
        jp[n + 1, n] = math.sqrt((jj - m[n]) * (jj + m[n] + 1))
    return jz, jp, jp.conj().T


def spin_coherent(j, eta: complex) -> np.ndarray:
    """``exp(eta J+ - conj(eta) J-)|0>_j``."""
    _, jp, jm = spin_operators(j)
    gen = eta * jp - np.conj(eta) * jm
    # gen is anti-Hermitian, so exp(gen) = exp(-i (i gen))
    rot = expm_hermitian(1j * gen, 1.0)
    vac = np.zeros(jp.shape[0], dtype=complex)
    vac[0] = 1.0
    return rot @ vac


def number_parity(d: int) -> np.ndarray:
    return (-1.0) ** np.arange(d)


def parity_cat(a, b, x: float, phase: complex = 1j) -> tuple[BipartiteState, complex]:
    """Normalized ``sqrt(x)|a>|b> + phase sqrt(1-x) |Pa>|Pb>`` with ``P = (-1)^N``.

    Returns the state and the branch overlap ``<a|Pa><b|Pb>``.
    """
    if not 0 < x < 1:
        raise ValueError("weight x must lie in (0, 1)")
    a = np.asarray(a, dtype=complex)
    b = np.asarray(b, dtype=complex)
    fa, fb = number_parity(a.size) * a, number_parity(b.size) * b
    overlap = complex(np.vdot(a, fa) * np.vdot(b, fb))
    if abs(abs(overlap) - 1.0) < 1e-9:
        raise ValueError("branches coincide up to phase; the superposition is degenerate")
    vec = math.sqrt(x) * np.kron(a, b) + phase * math.sqrt(1 - x) * np.kron(fa, fb)
    return BipartiteState.from_vector(vec, a.size, b.size), overlap


def ecs(j, eta: complex, x: float, phase: complex = 1j) -> BipartiteState:
    """SU(2) entangled coherent state ``sqrt(x)|eta,eta> + i sqrt(1-x)|-eta,-eta>``, renormalized."""
    scs = spin_coherent(j, eta)
    state, _ = parity_cat(scs, scs, x, phase)
    return state


def ecs_branch_overlap(j, eta: complex) -> complex:
    """``<eta|-eta>``; equals ``cos(2|eta|)**(2j)``."""
    scs = spin_coherent(j, eta)
    return complex(np.vdot(scs, number_parity(scs.size) * scs))


def binomial_state(M: int, p: float, D: int) -> np.ndarray:
    """Fock-space binomial state truncated to ``D`` levels."""
    if not 0 <= p <= 1:
        raise ValueError("p must lie in [0, 1]")
    if M >= D:
        raise ValueError(f"binomial state with M={M} does not fit in {D} Fock levels")
    amps = np.zeros(D, dtype=complex)
    for n in range(M + 1):
        amps[n] = math.sqrt(math.comb(M, n) * p**n * (1 - p) ** (M - n))
    return amps


def max_entangled(d: int) -> BipartiteState:
    if d < 2:
        raise ValueError("need d >= 2")
    return BipartiteState(d, d, np.eye(d).reshape(-1) / math.sqrt(d))


def canonical_phase(vec) -> np.ndarray:
    """Remove the global phase so the first nonzero amplitude is real non-negative."""
    v = np.asarray(vec, dtype=complex)
    idx = np.flatnonzero(np.abs(v) > 1e-12)
    if idx.size == 0:
        return v.copy()
    z = v[idx[0]]
    return v * (abs(z) / z)


def random_state(dA: int, dB: int, rng: np.random.Generator) -> BipartiteState:
    z = rng.standard_normal(dA * dB) + 1j * rng.standard_normal(dA * dB)
    return BipartiteState.from_vector(z, dA, dB)
