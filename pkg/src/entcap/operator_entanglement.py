"""Operator Schmidt decomposition, operator entanglement and its rate.

An operator ``V`` on ``H_dA ⊗ H_dB`` is treated as a vector in the
Hilbert-Schmidt space ``HS(dA) ⊗ HS(dB)``. The reshuffle used throughout is
``M[a*dA + a', b*dB + b'] = V[a*dB + b, a'*dB + b']``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import minimize

from .capability import rate_commutator, rate_zero_general
from .numerics import (
    DimensionError,
    as_matrix,
    central_diff,
    expm_hermitian,
    golden_max,
    is_hermitian,
    svd,
)
from .self_inverse import ProductHamiltonian, embed, evolution
from .states import BipartiteState, entropy, max_entangled, random_state, shannon_bits

RANK_CUTOFF = 1e-9
UNITARY_TOL = 1e-8
RATE_STEP = 1e-6
CURVE_EDGE = 1e-3


@dataclass(frozen=True)
class OperatorSchmidt:
    coefficients: np.ndarray  # s_n, descending
    factors_a: list[np.ndarray]
    factors_b: list[np.ndarray]

    def reconstruct(self) -> np.ndarray:
        return sum(s * np.kron(a, b) for s, a, b in zip(self.coefficients, self.factors_a, self.factors_b))


@dataclass(frozen=True)
class OperatorRateCurve:
    samples: list[tuple[float, float, float]]  # (t, entanglement bits, rate)
    r_max: float
    t_star: float


@dataclass(frozen=True)
class LowerBoundReport:
    op_rate_max: float
    t_at_max: float
    state_rate_at_max: float  # rate of U(t)(Phi ⊗ Phi) at t_at_max
    sampled_state_rate_max: float
    optimized_state_rate_max: float
    rates: list[float] = field(repr=False, default_factory=list)

    @property
    def correspondence_gap(self) -> float:
        return abs(self.op_rate_max - self.state_rate_at_max)

    @property
    def holds(self) -> bool:
        best = max(self.sampled_state_rate_max, self.optimized_state_rate_max)
        return self.op_rate_max <= best + 1e-6


def _check_split(v: np.ndarray, dA: int, dB: int) -> None:
    n = dA * dB
    if v.shape != (n, n):
        raise DimensionError(f"operator of shape {v.shape} does not act on {dA}x{dB}")


def reshuffle(v, dA: int, dB: int) -> np.ndarray:
    v = as_matrix(v)
    _check_split(v, dA, dB)
    return v.reshape(dA, dB, dA, dB).transpose(0, 2, 1, 3).reshape(dA * dA, dB * dB)


def op_schmidt(v, dA: int, dB: int) -> OperatorSchmidt:
    """``V = sum_n s_n A_n ⊗ B_n`` with HS-orthonormal ``A_n``, ``B_n``."""
    u, s, wh = svd(reshuffle(v, dA, dB))
    keep = s > RANK_CUTOFF * s[0] if s[0] > 0 else np.zeros_like(s, dtype=bool)
    fa = [u[:, k].reshape(dA, dA) for k in np.flatnonzero(keep)]
    fb = [wh[k, :].reshape(dB, dB) for k in np.flatnonzero(keep)]
    return OperatorSchmidt(s[keep], fa, fb)


def _weights(v, dA: int, dB: int) -> np.ndarray:
    v = as_matrix(v)
    _check_split(v, dA, dB)
    n = dA * dB
    if np.max(np.abs(v.conj().T @ v - np.eye(n))) > UNITARY_TOL:
        raise ValueError("operator entanglement is normalized for unitaries only")
    return op_schmidt(v, dA, dB).coefficients ** 2 / n


def op_entanglement(v, dA: int, dB: int) -> float:
    """Shannon entropy (bits) of ``s_n^2 / (dA dB)``."""
    return shannon_bits(_weights(v, dA, dB))


def op_concurrence(v, dA: int, dB: int) -> float:
    """``2 sqrt(p1 p2)`` for an operator of Schmidt rank at most 2."""
    p = _weights(v, dA, dB)
    if p.size > 2:
        raise ValueError(f"operator Schmidt rank {p.size} > 2; concurrence is not defined here")
    return 2.0 * math.sqrt(p[0] * p[1]) if p.size == 2 else 0.0


def analytic_op_entanglement(t: float) -> float:
    c2 = math.cos(t) ** 2
    return shannon_bits([c2, 1.0 - c2])


def analytic_op_rate(t: float) -> float:
    """``sin(2t) log2(cot^2 t)``, with the limit 0 at multiples of pi/2."""
    s, c = math.sin(t), math.cos(t)
    if abs(s) < 1e-300 or abs(c) < 1e-300:
        return 0.0
    return math.sin(2 * t) * math.log2((c / s) ** 2)


def _unitary_at(h, t: float) -> np.ndarray:
    if isinstance(h, ProductHamiltonian):
        return evolution(h, t)
    return expm_hermitian(h, t)


def _dims(h, dA: int | None, dB: int | None) -> tuple[int, int]:
    if isinstance(h, ProductHamiltonian):
        return h.dims
    if dA is None or dB is None:
        raise ValueError("dA and dB are required for a bare Hamiltonian matrix")
    return dA, dB


def op_rate(h, t: float, dA: int | None = None, dB: int | None = None, step: float = RATE_STEP) -> float:
    """Central-difference time derivative of ``E[exp(-iHt)]``."""
    dA, dB = _dims(h, dA, dB)
    return central_diff(lambda s: op_entanglement(_unitary_at(h, s), dA, dB), t, step)


def op_rate_max(
    h, dA: int | None = None, dB: int | None = None, spacing: float = 1e-3, t_end: float = math.pi / 4
) -> OperatorRateCurve:
    """Scan ``(0, t_end]`` at ``spacing`` and refine the best sample by golden section."""
    dA, dB = _dims(h, dA, dB)
    ts = np.arange(CURVE_EDGE, t_end + 0.5 * spacing, spacing)
    samples = []
    for t in ts:
        e = op_entanglement(_unitary_at(h, t), dA, dB)
        samples.append((float(t), e, op_rate(h, t, dA, dB)))
    k = int(np.argmax([r for _, _, r in samples]))
    lo = max(ts[k] - spacing, CURVE_EDGE / 2)
    hi = ts[k] + spacing
    res = golden_max(lambda t: op_rate(h, t, dA, dB), lo, hi, 1e-7)
    if res.maximum < samples[k][2]:
        return OperatorRateCurve(samples, samples[k][2], samples[k][0])
    return OperatorRateCurve(samples, res.maximum, res.argmax)


def correspondence_check(v, dA: int, dB: int) -> tuple[float, float]:
    """Operator entanglement vs. entropy of ``V`` applied to ``|Phi>_{A'A} ⊗ |Phi>_{BB'}``."""
    v = as_matrix(v)
    e_op = op_entanglement(v, dA, dB)
    phi = np.kron(max_entangled(dA).amplitudes, max_entangled(dB).amplitudes)
    state = BipartiteState(dA * dA, dB * dB, embed(v, dA, dB) @ phi)
    return e_op, entropy(state)


def _state_from_params(p: np.ndarray, dA: int, dB: int) -> BipartiteState:
    n = dA * dB
    return BipartiteState.from_vector(p[:n] + 1j * p[n:], dA, dB)


def lower_bound_check(
    h, dA: int, dB: int, t_grid, samples: int = 10_000, seed: int = 0, polish: int = 3
) -> LowerBoundReport:
    """Compare the maximal operator rate with state rates found by search.

    The operator rate on the grid is checked against the state rate of the
    doubled maximally entangled input, then against the best ancilla-assisted
    state rate from random sampling followed by local ascent from the
    ``polish`` best samples.
    """
    h = as_matrix(h)
    if not is_hermitian(h):
        raise ValueError("Hamiltonian must be Hermitian")
    rates = [op_rate(h, float(t), dA, dB) for t in t_grid]
    k = int(np.argmax(rates))
    t_max = float(t_grid[k])

    h_ext = embed(h, dA, dB)
    phi = np.kron(max_entangled(dA).amplitudes, max_entangled(dB).amplitudes)
    phi_state = BipartiteState(dA * dA, dB * dB, phi)
    state_rate = rate_commutator(h_ext, phi_state, t_max)

    rng = np.random.default_rng(seed)
    sa, sb = dA * dA, dB * dB
    scored = []
    for _ in range(samples):
        st = random_state(sa, sb, rng)
        scored.append((rate_zero_general(h_ext, st), st))
    scored.sort(key=lambda item: item[0], reverse=True)
    sampled_best = scored[0][0] if scored else -math.inf

    optimized = -math.inf
    for _, st in scored[:polish]:
        x0 = np.concatenate([st.amplitudes.real, st.amplitudes.imag])

        def neg(p):
            return -rate_zero_general(h_ext, _state_from_params(p, sa, sb))

        res = minimize(neg, x0, method="BFGS", options={"maxiter": 400, "gtol": 1e-9})
        optimized = max(optimized, -float(res.fun))
    return LowerBoundReport(rates[k], t_max, state_rate, sampled_best, optimized, rates)
