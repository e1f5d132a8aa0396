"""Entanglement rates, the self-inverse capability constant and gate capability.

Three routes to the rate at t=0 are kept independent of each other:

* :func:`rate_zero_schmidt` sums over Schmidt pairs with the factor matrix
  elements (self-inverse Hamiltonians only);
* :func:`rate_zero_general` / :func:`rate_commutator` contract the
  commutator ``Tr_B[H, rho]`` with ``log2 rho_A`` (any Hermitian H);
* :func:`entropy_rate_fd` differentiates the entropy numerically.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .numerics import (
    DimensionError,
    NotHermitianError,
    as_matrix,
    central_diff,
    commutator,
    eigh,
    expm_hermitian,
    golden_max,
    is_hermitian,
    partial_trace,
    random_vector,
)
from .self_inverse import ProductHamiltonian, SelfInverseFactor, extend_factor, h1
from .states import (
    SCHMIDT_CUTOFF,
    BipartiteState,
    SchmidtDecomposition,
    concurrence_two_term,
    ecs,
    ecs_branch_overlap,
    entropy,
    optimal_input,
    pseudo_qubit_pair,
    schmidt,
)

REAL_TOL = 1e-9
SUPPORT_TOL = 1e-8


class RateNotRealError(ArithmeticError):
    """The analytic rate came out with a non-negligible imaginary part."""


@dataclass(frozen=True)
class RateReport:
    t: float
    gamma: float
    method: str  # "analytic-schmidt" | "commutator" | "finite-difference"


@dataclass(frozen=True)
class CapabilityResult:
    beta: float
    x0: float
    optimal_state: BipartiteState | None = None
    evaluations: int = 0


def two_branch_rate(x: float) -> float:
    """``2 sqrt(x(1-x)) log2(x/(1-x))``: the rate of a Schmidt-rank-2 optimal input."""
    if x <= 0.0 or x >= 1.0:
        return 0.0
    return 2.0 * math.sqrt(x * (1.0 - x)) * math.log2(x / (1.0 - x))


def stationarity_residual(x: float) -> float:
    """Zero exactly at the maximizer of :func:`two_branch_rate`."""
    return math.log(x / (1.0 - x)) - 2.0 / (2.0 * x - 1.0)


def _hmatrix(h) -> np.ndarray:
    m = h.matrix if isinstance(h, ProductHamiltonian) else as_matrix(h)
    if not is_hermitian(m):
        raise NotHermitianError("Hamiltonian must be Hermitian")
    return m


def _check_real(z: complex, where: str) -> float:
    if abs(z.imag) > REAL_TOL * max(1.0, abs(z.real)):
        raise RateNotRealError(f"{where}: rate has imaginary part {z.imag:.3e} (real part {z.real:.6e})")
    return float(z.real)


def _log2_support(rho_a: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """``log2 rho`` on its support, plus the projector onto the kernel."""
    dec = eigh(rho_a)
    keep = dec.eigenvalues > SCHMIDT_CUTOFF
    v = dec.eigenvectors
    vs = v[:, keep]
    log_rho = (vs * np.log2(dec.eigenvalues[keep])) @ vs.conj().T
    vk = v[:, ~keep]
    return log_rho, vk @ vk.conj().T


def _rate_from_density(hm: np.ndarray, rho: np.ndarray, dA: int, dB: int) -> complex:
    rho_a = partial_trace(rho, dA, dB, "A")
    rho_a_dot = -1j * partial_trace(commutator(hm, rho), dA, dB, "A")
    log_rho, kernel = _log2_support(rho_a)
    leak = np.max(np.abs(kernel @ rho_a_dot @ kernel), initial=0.0)
    if leak > SUPPORT_TOL:
        raise ArithmeticError(f"rho_A derivative leaks into the kernel (residual {leak:.2e})")
    return -np.trace(rho_a_dot @ log_rho)


def rate_commutator(h, state: BipartiteState, t: float = 0.0) -> float:
    """``-Tr[drho_A/dt log2 rho_A]`` at time ``t`` from the full density matrix.

    ``h`` may be any Hermitian matrix on the ``dA*dB`` space.
    """
    hm = _hmatrix(h)
    if hm.shape[0] != state.dA * state.dB:
        raise DimensionError("Hamiltonian and state dimensions differ")
    psi = expm_hermitian(hm, t) @ state.amplitudes if t != 0.0 else state.amplitudes
    rho = np.outer(psi, psi.conj())
    return _check_real(complex(_rate_from_density(hm, rho, state.dA, state.dB)), "rate_commutator")


def rate_zero_general(h, state: BipartiteState) -> float:
    """``i Tr_A{Tr_B[H, rho(0)] log2 rho_A(0)}`` for an arbitrary Hermitian H.

    Uses the pure-state shortcut ``Tr_B(H rho) = (H psi) psi^dagger`` reshaped,
    so no full density matrix is formed.
    """
    hm = _hmatrix(h)
    if hm.shape[0] != state.dA * state.dB:
        raise DimensionError("Hamiltonian and state dimensions differ")
    psi = state.matrix
    hpsi = (hm @ state.amplitudes).reshape(state.dA, state.dB)
    trb_comm = hpsi @ psi.conj().T - psi @ hpsi.conj().T
    rho_a = psi @ psi.conj().T
    log_rho, _ = _log2_support(rho_a)
    return _check_real(complex(1j * np.trace(trb_comm @ log_rho)), "rate_zero_general")


def rate_zero_schmidt(xa: SelfInverseFactor, xb: SelfInverseFactor, sd: SchmidtDecomposition) -> float:
    """``i sum_mn sqrt(l_m l_n) log2(l_m/l_n) (X_A)_mn (X_B)_mn`` over Schmidt pairs."""
    if sd.vectors_a.shape[0] != xa.dim or sd.vectors_b.shape[0] != xb.dim:
        raise DimensionError("Schmidt vectors do not match factor dimensions")
    psi, phi = sd.vectors_a, sd.vectors_b
    xa_mn = psi.conj().T @ xa.matrix @ psi
    xb_mn = phi.conj().T @ xb.matrix @ phi
    lam = sd.coefficients
    weight = np.sqrt(np.outer(lam, lam)) * (np.log2(lam)[:, None] - np.log2(lam)[None, :])
    return _check_real(complex(1j * np.sum(weight * xa_mn * xb_mn)), "rate_zero_schmidt")


def entropy_rate_fd(h, state: BipartiteState, t: float = 0.0, step: float = 1e-5) -> float:
    """Central difference of the entanglement entropy along ``exp(-iHt)``."""
    hm = _hmatrix(h)
    dec = eigh(hm)
    v = dec.eigenvectors
    coeffs = v.conj().T @ state.amplitudes

    def ent(s: float) -> float:
        psi = v @ (np.exp(-1j * dec.eigenvalues * s) * coeffs)
        return entropy(BipartiteState.from_vector(psi, state.dA, state.dB))

    return central_diff(ent, t, step)


def capability_bound(tol: float = 1e-10) -> CapabilityResult:
    """Maximize the two-branch rate over weights in (1/2, 1)."""
    res = golden_max(two_branch_rate, 0.5, 1.0 - 1e-9, tol)
    return CapabilityResult(beta=res.maximum, x0=res.argmax, evaluations=res.evaluations)


def capability_self_inverse(xa: SelfInverseFactor, xb: SelfInverseFactor) -> CapabilityResult:
    """Capability and optimal input for ``H = X_A ⊗ X_B``; the bound is attained."""
    bound = capability_bound()
    state = optimal_input(xa, xb, bound.x0)
    gamma = rate_zero_schmidt(xa, xb, schmidt(state))
    if abs(gamma - bound.beta) > 1e-8:
        raise ArithmeticError(f"optimal input reaches {gamma!r}, expected {bound.beta!r}")
    return CapabilityResult(bound.beta, bound.x0, state, bound.evaluations)


def rate_sweep(h, state: BipartiteState, t_grid) -> list[RateReport]:
    """Rate along a sorted time grid via the commutator route."""
    t_grid = [float(t) for t in t_grid]
    if any(b < a for a, b in zip(t_grid, t_grid[1:])):
        raise ValueError("time grid must be sorted")
    return [RateReport(t, rate_commutator(h, state, t), "commutator") for t in t_grid]


def sweep_fd_check(h, state: BipartiteState, reports: list[RateReport], step: float = 1e-5) -> float:
    """Largest deviation between a sweep and finite differences at interior grid points."""
    inner = reports[1:-1] if len(reports) > 2 else reports
    return max((abs(r.gamma - entropy_rate_fd(h, state, r.t, step)) for r in inner), default=0.0)


def balanced_input(x: SelfInverseFactor) -> np.ndarray:
    """Equal-weight superposition of a +1 and a -1 eigenvector: ``<v|X|v> = 0``."""
    return (x.plus[:, 0] + x.minus[:, 0]) / math.sqrt(2)


def gate_capability(
    xa: SelfInverseFactor,
    xb: SelfInverseFactor,
    t: float,
    trials: int = 64,
    seed: int = 0,
    ancilla_a: int = 1,
    ancilla_b: int = 1,
) -> float:
    """Largest concurrence ``exp(-iHt)`` creates from a product input.

    The balanced inputs zero both overlaps and give ``|sin 2t|``; ``trials``
    random product inputs confirm nothing exceeds it.
    """
    if trials < 1:
        raise ValueError("trials must be >= 1")
    xa = extend_factor(xa, ancilla_a, "A")
    xb = extend_factor(xb, ancilla_b, "B")
    pair = pseudo_qubit_pair(balanced_input(xa), balanced_input(xb), xa, xb)
    best = concurrence_two_term(pair.overlap_a, pair.overlap_b, t)
    rng = np.random.default_rng(seed)
    for _ in range(trials):
        pair = pseudo_qubit_pair(random_vector(xa.dim, rng), random_vector(xb.dim, rng), xa, xb)
        c = concurrence_two_term(pair.overlap_a, pair.overlap_b, t)
        if c > best + 1e-12:
            raise ArithmeticError(f"random input beat the balanced construction ({c} > {best})")
    return best


def ecs_rate_profile(j, x: float, moduli, phase: complex = 1j) -> list[tuple[float, float, float]]:
    """Rate at t=0 under ``H1`` of the ECS as the coherent amplitude ``|eta|`` varies.

    Rows are ``(|eta|, <eta|-eta>, rate)``. Only where the branches are
    orthogonal does the rate reach the two-branch value for weight ``x``.
    """
    h = h1(j)
    rows = []
    for r in moduli:
        r = float(r)
        overlap = ecs_branch_overlap(j, r).real
        rows.append((r, overlap, rate_zero_general(h, ecs(j, r, x, phase))))
    return rows
