"""Shared dense linear-algebra helpers.

Conventions used across the package:

* Spin/qubit 1 occupies the leftmost tensor factor, i.e. the most
  significant bit of a basis-state index.
* Single-spin rotations are R_axis(theta) = exp(-i * theta * sigma_axis / 2).
* Equality of unitaries and states is always judged after aligning an
  explicit global phase; nothing is silently renormalized.
"""

from __future__ import annotations

from functools import reduce

import numpy as np

SIGMA_X = np.array([[0, 1], [1, 0]], dtype=complex)
SIGMA_Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
SIGMA_Z = np.array([[1, 0], [0, -1]], dtype=complex)
IDENTITY_2 = np.eye(2, dtype=complex)

_AXIS_MATRICES = {
    "x": SIGMA_X,
    "y": SIGMA_Y,
    "z": SIGMA_Z,
    "-x": -SIGMA_X,
    "-y": -SIGMA_Y,
    "-z": -SIGMA_Z,
}

AXES = tuple(_AXIS_MATRICES)


def popcount(values):
    """Number of set bits, elementwise, for nonnegative ints below 2**32."""
    v = np.asarray(values, dtype=np.uint32)
    v = v - ((v >> 1) & 0x55555555)
    v = (v & 0x33333333) + ((v >> 2) & 0x33333333)
    v = (v + (v >> 4)) & 0x0F0F0F0F
    out = ((v * 0x01010101) >> 24).astype(np.int64)
    return out if out.ndim else int(out)


def kron_all(matrices) -> np.ndarray:
    """Kronecker product of a sequence of matrices, left factor first."""
    return reduce(np.kron, matrices)


def rotation(axis: str, angle: float) -> np.ndarray:
    """Single-spin rotation exp(-i*angle*sigma_axis/2); axis in x,y,z,-x,-y,-z."""
    try:
        sigma = _AXIS_MATRICES[axis]
    except KeyError:
        raise ValueError(f"unknown rotation axis {axis!r}") from None
    return np.cos(angle / 2) * IDENTITY_2 - 1j * np.sin(angle / 2) * sigma


def embed_single(op: np.ndarray, spin: int, n: int) -> np.ndarray:
    """Lift a 2x2 operator acting on `spin` (1-based) into the full 2**n space."""
    if not 1 <= spin <= n:
        raise ValueError(f"spin index {spin} out of range for {n} spins")
    return kron_all([op if k == spin else IDENTITY_2 for k in range(1, n + 1)])


def basis_state(index: int, n: int) -> np.ndarray:
    vec = np.zeros(2**n, dtype=complex)
    vec[index] = 1.0
    return vec


def is_unitary(matrix: np.ndarray, tol: float = 1e-10) -> bool:
    dim = matrix.shape[0]
    return bool(np.abs(matrix.conj().T @ matrix - np.eye(dim)).max() <= tol)


def phase_aligned_error(candidate: np.ndarray, reference: np.ndarray) -> tuple[float, complex]:
    """Max elementwise |candidate - phase*reference| after global-phase alignment.

    The phase is the ratio of the two arrays at the largest-modulus entry of
    the reference, normalized to unit modulus.  Returns (max_error, phase).
    """
    candidate = np.asarray(candidate)
    reference = np.asarray(reference)
    if candidate.shape != reference.shape:
        raise ValueError("shape mismatch in phase-aligned comparison")
    idx = np.unravel_index(int(np.argmax(np.abs(reference))), reference.shape)
    ref_entry = reference[idx]
    if abs(ref_entry) == 0.0:
        # reference is identically zero; no phase to align
        return float(np.abs(candidate).max()), 1.0 + 0j
    phase = candidate[idx] / ref_entry
    mod = abs(phase)
    phase = phase / mod if mod > 0 else 1.0 + 0j
    err = float(np.abs(candidate - phase * reference).max())
    return err, complex(phase)
