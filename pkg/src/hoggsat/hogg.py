"""Operators and pipeline of the single-step structured search.

The search runs in four stages on n qubits:

1. prepare the uniform superposition W|00...0>,
2. apply the conflict-phase diagonal R,
3. apply the Hamming-distance mixing operator U = W Gamma W,
4. read out the final distribution.

Operator definitions, with c the conflict count of an assignment, h its
number of 1-bits, d the Hamming distance between two assignments, and m the
clause count:

    R_ss     = sqrt(2) * cos((2c - 1) * pi/4)                 (m even)
             = i**c                                           (m odd)
    Gamma_rr = sqrt(2) * cos((m - 2h - 1) * pi/4)             (m even)
             = i**h * exp(-i*pi*m/4)                          (m odd)
    U_rs     = 2**(-(n-1)/2) * cos((n - m + 1 - 2d) * pi/4)   (m even)
             = 2**(-n/2) * exp(i*pi*(n-m)/4) * (-i)**d        (m odd)
    W_rs     = 2**(-n/2) * (-1)**popcount(r AND s)

All diagonals are returned raw, exactly as defined above; comparisons that
only hold up to a global phase perform explicit alignment instead of baking
normalization into the constructors.

Dense matrices are the reference representation.  `run_pipeline` uses the
O(n * 2**n) butterfly for W, which agrees with the dense route to machine
precision (checked in the test suite).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .formula import Formula, conflict_counts
from .linalg import phase_aligned_error, popcount

OPERATOR_TOL = 1e-10
NORMALIZATION_TOL = 1e-12


def _check_n(n: int) -> None:
    if not 1 <= n <= 16:
        raise ValueError(f"qubit count must be in [1, 16], got {n}")


def walsh_hadamard(n: int) -> np.ndarray:
    """Dense n-qubit Walsh-Hadamard transform; W @ W = identity.

    Memory grows as 4**n; intended for the small n used in verification.
    """
    _check_n(n)
    idx = np.arange(2**n, dtype=np.uint32)
    parity = popcount(idx[:, None] & idx[None, :]) & 1
    return (2 ** (-n / 2)) * np.where(parity, -1.0, 1.0).astype(complex)


def walsh_apply(vec: np.ndarray) -> np.ndarray:
    """Apply the normalized Walsh-Hadamard transform with the butterfly."""
    out = np.array(vec, dtype=complex)
    size = out.size
    if size & (size - 1) or size == 0:
        raise ValueError("state length must be a power of two")
    h = 1
    while h < size:
        out = out.reshape(-1, 2, h)
        top = out[:, 0, :].copy()
        out[:, 0, :] = top + out[:, 1, :]
        out[:, 1, :] = top - out[:, 1, :]
        out = out.reshape(size)
        h *= 2
    return out / np.sqrt(size)


def phase_matrix(f: Formula) -> np.ndarray:
    """Diagonal of the conflict-phase operator R for formula f."""
    c = conflict_counts(f)
    if f.m % 2 == 0:
        return (np.sqrt(2) * np.cos((2 * c - 1) * np.pi / 4)).astype(complex)
    return 1j**c


def gamma_matrix(n: int, m: int) -> np.ndarray:
    """Diagonal of Gamma, a function of the number of 1-bits per assignment."""
    _check_n(n)
    if m < 0:
        raise ValueError("clause count must be nonnegative")
    h = popcount(np.arange(2**n, dtype=np.uint32))
    if m % 2 == 0:
        return (np.sqrt(2) * np.cos((m - 2 * h - 1) * np.pi / 4)).astype(complex)
    return (1j**h) * np.exp(-1j * np.pi * m / 4)


def mixing_matrix(n: int, m: int) -> np.ndarray:
    """Dense mixing operator; entry (r, s) depends only on d(r, s)."""
    _check_n(n)
    if m < 0:
        raise ValueError("clause count must be nonnegative")
    idx = np.arange(2**n, dtype=np.uint32)
    d = popcount(idx[:, None] ^ idx[None, :])
    if m % 2 == 0:
        return (2 ** (-(n - 1) / 2) * np.cos((n - m + 1 - 2 * d) * np.pi / 4)).astype(complex)
    return 2 ** (-n / 2) * np.exp(1j * np.pi * (n - m) / 4) * (-1j) ** d


def leading_phase_normalized(diag: np.ndarray) -> np.ndarray:
    """Rescale a unit-modulus diagonal so its first entry equals 1."""
    diag = np.asarray(diag, dtype=complex)
    lead = diag[0]
    if abs(lead) < 1e-300:
        raise ValueError("leading entry is zero; cannot normalize phase")
    return diag / lead


@dataclass(frozen=True)
class WgwReport:
    """Outcome of checking U against W @ Gamma @ W."""

    n: int
    m: int
    max_abs_error: float
    global_phase: complex
    passed: bool


def verify_wgw(n: int, m: int, tol: float = OPERATOR_TOL) -> WgwReport:
    """Compare the direct mixing matrix with its W Gamma W factorization.

    The comparison aligns the global phase at the largest-modulus entry
    first; `passed` is False when the aligned error exceeds `tol`.
    """
    w = walsh_hadamard(n)
    product = w @ np.diag(gamma_matrix(n, m)) @ w
    err, phase = phase_aligned_error(product, mixing_matrix(n, m))
    return WgwReport(n=n, m=m, max_abs_error=err, global_phase=phase, passed=err <= tol)


def run_pipeline(f: Formula) -> np.ndarray:
    """Final state U R W |00...0> for formula f, as 2**n amplitudes."""
    psi = np.full(2**f.n, 2 ** (-f.n / 2), dtype=complex)  # W|0...0>
    psi = phase_matrix(f) * psi
    psi = walsh_apply(psi)
    psi = gamma_matrix(f.n, f.m) * psi
    return walsh_apply(psi)


def measure_distribution(psi: np.ndarray) -> np.ndarray:
    """Exact probability of each assignment for a normalized state."""
    psi = np.asarray(psi, dtype=complex)
    probs = np.abs(psi) ** 2
    total = probs.sum()
    if abs(total - 1.0) > 1e-9:
        raise ValueError(f"state is not normalized (sum of probabilities {total})")
    return probs
