"""Dense complex linear algebra, 1-D maximization and finite differences.

Matrices are plain ``numpy.ndarray`` objects of complex dtype. Bipartite
indices are flattened A-major: ``i = a * dB + b``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Literal

import numpy as np

HERMITIAN_TOL = 1e-10
JACOBI_TOL = 1e-12

_INV_PHI = (math.sqrt(5.0) - 1.0) / 2.0
_GRID_POINTS = 64


class DimensionError(ValueError):
    """Matrix shapes are inconsistent with the requested operation."""


class NotHermitianError(ValueError):
    """A Hermitian matrix was required."""


@dataclass(frozen=True)
class EigenDecomposition:
    eigenvalues: np.ndarray  # ascending, real
    eigenvectors: np.ndarray  # orthonormal columns


@dataclass(frozen=True)
class ScalarMaxResult:
    argmax: float
    maximum: float
    evaluations: int


def as_matrix(m) -> np.ndarray:
    a = np.asarray(m, dtype=complex)
    if a.ndim != 2:
        raise DimensionError(f"expected a 2-D matrix, got shape {a.shape}")
    return a


def is_hermitian(m: np.ndarray, tol: float = HERMITIAN_TOL) -> bool:
    m = np.asarray(m)
    return m.ndim == 2 and m.shape[0] == m.shape[1] and np.max(np.abs(m - m.conj().T), initial=0.0) <= tol


def kron(a, b) -> np.ndarray:
    """Kronecker product; entry ``(a*rB + b, a'*cB + b')`` is ``A[a,a'] * B[b,b']``."""
    return np.kron(as_matrix(a), as_matrix(b))


def partial_trace(rho, dA: int, dB: int, keep: Literal["A", "B"] = "A") -> np.ndarray:
    rho = as_matrix(rho)
    n = dA * dB
    if rho.shape != (n, n):
        raise DimensionError(f"rho has shape {rho.shape}, inconsistent with split {dA}x{dB}")
    r = rho.reshape(dA, dB, dA, dB)
    if keep == "A":
        return np.einsum("ibjb->ij", r)
    if keep == "B":
        return np.einsum("aiaj->ij", r)
    raise ValueError(f"keep must be 'A' or 'B', not {keep!r}")


def commutator(a, b) -> np.ndarray:
    a, b = as_matrix(a), as_matrix(b)
    if a.shape != b.shape or a.shape[0] != a.shape[1]:
        raise DimensionError(f"commutator needs equal square matrices, got {a.shape} and {b.shape}")
    return a @ b - b @ a


def _fix_phases(vecs: np.ndarray) -> np.ndarray:
    """Rotate each column so its first non-negligible entry is real positive."""
    out = vecs.copy()
    for k in range(out.shape[1]):
        col = out[:, k]
        idx = np.flatnonzero(np.abs(col) > 1e-12)
        if idx.size:
            z = col[idx[0]]
            out[:, k] = col * (abs(z) / z)
    return out


def _order(vals: np.ndarray, vecs: np.ndarray) -> EigenDecomposition:
    vecs = _fix_phases(vecs)
    first_nz = [int(np.flatnonzero(np.abs(vecs[:, k]) > 1e-12)[0]) for k in range(vecs.shape[1])]
    # Degenerate levels are ordered by where their eigenvector starts.
    keys = sorted(range(len(vals)), key=lambda k: (round(float(vals[k]), 9), first_nz[k]))
    return EigenDecomposition(np.asarray(vals, dtype=float)[keys], vecs[:, keys])


def jacobi_eigh(m, tol: float = JACOBI_TOL, max_sweeps: int = 100) -> EigenDecomposition:
    """Cyclic complex Jacobi eigensolver for Hermitian matrices.

    Each rotation first removes the phase of the pivot ``A[p, q]`` and then
    applies a real Givens rotation. Iterates until the off-diagonal Frobenius
    norm drops below ``tol`` (scaled by the matrix norm when that exceeds 1).
    """
    a = as_matrix(m).copy()
    if not is_hermitian(a):
        raise NotHermitianError("jacobi_eigh requires a Hermitian matrix")
    n = a.shape[0]
    v = np.eye(n, dtype=complex)
    threshold = tol * max(1.0, float(np.linalg.norm(a)))
    for _ in range(max_sweeps):
        if np.linalg.norm(a - np.diag(np.diag(a))) < threshold:
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                g = a[p, q]
                r = abs(g)
                if r < 1e-300:
                    continue
                ebar = (g / r).conjugate()
                tau = (a[q, q].real - a[p, p].real) / (2.0 * r)
                if abs(tau) > 1e150:
                    t = 0.5 / tau
                else:
                    t = (1.0 if tau >= 0 else -1.0) / (abs(tau) + math.sqrt(1.0 + tau * tau))
                c = 1.0 / math.sqrt(1.0 + t * t)
                s = t * c
                gpp, gpq, gqp, gqq = c, s, -s * ebar, c * ebar
                colp, colq = a[:, p].copy(), a[:, q].copy()
                a[:, p] = colp * gpp + colq * gqp
                a[:, q] = colp * gpq + colq * gqq
                rowp, rowq = a[p, :].copy(), a[q, :].copy()
                a[p, :] = np.conj(gpp) * rowp + np.conj(gqp) * rowq
                a[q, :] = np.conj(gpq) * rowp + np.conj(gqq) * rowq
                a[p, q] = a[q, p] = 0.0
                vp, vq = v[:, p].copy(), v[:, q].copy()
                v[:, p] = vp * gpp + vq * gqp
                v[:, q] = vp * gpq + vq * gqq
    else:
        raise RuntimeError(f"Jacobi did not converge in {max_sweeps} sweeps")
    return _order(np.diag(a).real, v)


def eigh(m, method: Literal["lapack", "jacobi"] = "lapack") -> EigenDecomposition:
    """Hermitian eigendecomposition with ascending eigenvalues and phase-fixed vectors."""
    m = as_matrix(m)
    if not is_hermitian(m):
        raise NotHermitianError("eigh requires a Hermitian matrix (tolerance 1e-10)")
    if method == "jacobi":
        return jacobi_eigh(m)
    vals, vecs = np.linalg.eigh((m + m.conj().T) / 2)
    return _order(vals, vecs)


def svd(m) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Thin SVD ``M = U @ diag(s) @ Vh`` with ``s`` descending."""
    u, s, vh = np.linalg.svd(as_matrix(m), full_matrices=False)
    return u, s, vh


def expm_hermitian(h, t: float) -> np.ndarray:
    """``exp(-i h t)`` for Hermitian ``h`` through its eigendecomposition."""
    dec = eigh(h)
    v = dec.eigenvectors
    return (v * np.exp(-1j * dec.eigenvalues * t)) @ v.conj().T


def golden_max(f: Callable[[float], float], lo: float, hi: float, tol: float = 1e-10) -> ScalarMaxResult:
    """Maximize a unimodal ``f`` on ``[lo, hi]``.

    A 64-point grid picks the bracket around the best sample, then golden
    section narrows it to width ``tol``. Non-finite values count as ``-inf``.
    """
    if tol <= 0:
        raise ValueError("tol must be positive")
    if not lo < hi:
        raise ValueError("need lo < hi")
    calls = 0

    def g(x: float) -> float:
        nonlocal calls
        calls += 1
        y = float(f(x))
        return y if math.isfinite(y) else -math.inf

    grid = np.linspace(lo, hi, _GRID_POINTS)
    vals = [g(x) for x in grid]
    k = int(np.argmax(vals))
    a, b = grid[max(k - 1, 0)], grid[min(k + 1, _GRID_POINTS - 1)]
    best_x, best_y = float(grid[k]), vals[k]

    c = b - _INV_PHI * (b - a)
    d = a + _INV_PHI * (b - a)
    fc, fd = g(c), g(d)
    while b - a > tol:
        if fc >= fd:
            b, d, fd = d, c, fc
            c = b - _INV_PHI * (b - a)
            fc = g(c)
        else:
            a, c, fc = c, d, fd
            d = a + _INV_PHI * (b - a)
            fd = g(d)
        if c >= d:  # interval collapsed to rounding
            break
    x = c if fc >= fd else d
    y = max(fc, fd)
    if best_y > y:
        x, y = best_x, best_y
    return ScalarMaxResult(argmax=float(x), maximum=float(y), evaluations=calls)


def central_diff(f: Callable[[float], float], t: float, h: float = 1e-5) -> float:
    if h <= 0:
        raise ValueError("h must be positive")
    return (f(t + h) - f(t - h)) / (2.0 * h)


def random_unitary(d: int, rng: np.random.Generator) -> np.ndarray:
    """Haar-random unitary from the QR of a complex Ginibre matrix."""
    z = (rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d))) / math.sqrt(2)
    q, r = np.linalg.qr(z)
    ph = np.diag(r) / np.abs(np.diag(r))
    return q * ph


def random_hermitian(d: int, rng: np.random.Generator, scale: float = 1.0) -> np.ndarray:
    z = rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d))
    return scale * (z + z.conj().T) / 2


def random_vector(d: int, rng: np.random.Generator) -> np.ndarray:
    z = rng.standard_normal(d) + 1j * rng.standard_normal(d)
    return z / np.linalg.norm(z)
