"""Dense complex Hermitian eigensolver and small matrix-function helpers.

The eigensolver is a cyclic Jacobi iteration working directly on complex
Hermitian matrices.  All dimensions in this package are tiny (at most 256),
so robustness and bit-for-bit reproducibility matter more than asymptotic
speed.  The core routine operates on a stack of matrices at once because the
fuzz campaigns diagonalize tens of thousands of 4x4 reductions.
"""

from __future__ import annotations

import numpy as np

HERMITICITY_TOL = 1e-10
OFFDIAG_TOL = 1e-13
MAX_SWEEPS = 100
PSD_FLOOR = -1e-10


def hermiticity_defect(h: np.ndarray) -> float:
    """Largest entrywise deviation of ``h`` from its conjugate transpose."""
    return float(np.max(np.abs(h - np.conj(np.swapaxes(h, -1, -2)))))


def eigh_batch(stack: np.ndarray, offtol: float = OFFDIAG_TOL,
               max_sweeps: int = MAX_SWEEPS) -> tuple[np.ndarray, np.ndarray]:
    """Diagonalize a stack of Hermitian matrices with cyclic Jacobi rotations.

    Parameters
    ----------
    stack : ndarray, shape (B, n, n)
        Hermitian matrices.  The Hermitian part is taken before iterating, so
        roundoff-level asymmetry is tolerated (validation happens in `eigh`).

    Returns
    -------
    (w, v) : eigenvalues sorted descending, shape (B, n); eigenvector columns
        aligned with them, shape (B, n, n).

    Sweeps stop once every matrix in the stack has off-diagonal Frobenius norm
    at or below ``offtol``.
    """
    a = np.asarray(stack, dtype=np.complex128)
    if a.ndim != 3 or a.shape[-1] != a.shape[-2]:
        raise ValueError(f"expected a (B, n, n) stack, got shape {a.shape}")
    a = 0.5 * (a + np.conj(np.swapaxes(a, -1, -2)))
    nbatch, n, _ = a.shape
    v = np.broadcast_to(np.eye(n, dtype=np.complex128), a.shape).copy()
    if n == 1:
        return a[:, :, 0].real.copy(), v
    iu = np.triu_indices(n, 1)
    pairs = list(zip(*iu))
    for _ in range(max_sweeps):
        off2 = 2.0 * (np.abs(a[:, iu[0], iu[1]]) ** 2).sum(axis=1)
        if np.max(off2) <= offtol * offtol:
            break
        for p, q in pairs:
            apq = a[:, p, q].copy()
            r = np.abs(apq)
            active = r > 1e-300
            if not active.any():
                continue
            rsafe = np.where(active, r, 1.0)
            tau = (a[:, q, q].real - a[:, p, p].real) / (2.0 * rsafe)
            sgn = np.where(tau >= 0, 1.0, -1.0)
            t = sgn / (np.abs(tau) + np.hypot(1.0, tau))
            c = 1.0 / np.sqrt(1.0 + t * t)
            s = t * c
            # phase of the annihilated entry; inactive pairs get the identity
            w = np.where(active, apq / rsafe, 1.0)
            c = np.where(active, c, 1.0)[:, None]
            s = np.where(active, s, 0.0)[:, None]
            wb = w[:, None]
            wcb = np.conj(wb)
            rowp = a[:, p, :].copy()
            rowq = a[:, q, :].copy()
            a[:, p, :] = c * rowp - wb * s * rowq
            a[:, q, :] = s * rowp + wb * c * rowq
            colp = a[:, :, p].copy()
            colq = a[:, :, q].copy()
            a[:, :, p] = c * colp - wcb * s * colq
            a[:, :, q] = s * colp + wcb * c * colq
            vp = v[:, :, p].copy()
            vq = v[:, :, q].copy()
            v[:, :, p] = c * vp - wcb * s * vq
            v[:, :, q] = s * vp + wcb * c * vq
    w = np.real(np.diagonal(a, axis1=-2, axis2=-1)).copy()
    order = np.argsort(-w, axis=1, kind="stable")
    w = np.take_along_axis(w, order, axis=1)
    v = np.take_along_axis(v, order[:, None, :], axis=2)
    return w, v


def eigh(h: np.ndarray, offtol: float = OFFDIAG_TOL,
         max_sweeps: int = MAX_SWEEPS) -> tuple[np.ndarray, np.ndarray]:
    """Eigendecomposition of one Hermitian matrix.

    Returns eigenvalues in descending order and orthonormal eigenvector
    columns.  Rejects input whose asymmetry exceeds ``HERMITICITY_TOL``.
    """
    h = np.asarray(h, dtype=np.complex128)
    if h.ndim != 2 or h.shape[0] != h.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {h.shape}")
    defect = hermiticity_defect(h)
    if defect > HERMITICITY_TOL:
        raise ValueError(
            f"matrix is not Hermitian: max |h - h^dagger| = {defect:.3e}")
    w, v = eigh_batch(h[None, :, :], offtol=offtol, max_sweeps=max_sweeps)
    return w[0], v[0]


def clip_psd(w: np.ndarray, floor: float = PSD_FLOOR, what: str = "matrix") -> np.ndarray:
    """Zero out roundoff-negative eigenvalues; reject genuine negativity."""
    lo = float(np.min(w))
    if lo < floor:
        raise ValueError(f"{what} is not positive semidefinite: "
                         f"smallest eigenvalue {lo:.3e}")
    return np.clip(w, 0.0, None)


def sqrtm_psd(h: np.ndarray) -> np.ndarray:
    """Hermitian square root of a positive semidefinite matrix."""
    w, v = eigh(h)
    w = clip_psd(w, what="sqrtm operand")
    return (v * np.sqrt(w)) @ np.conj(v.T)


def sqrtm_psd_batch(stack: np.ndarray, what: str = "sqrtm operand") -> np.ndarray:
    w, v = eigh_batch(stack)
    w = clip_psd(w, what=what)
    return (v * np.sqrt(w)[:, None, :]) @ np.conj(np.swapaxes(v, -1, -2))


def haar_unitary(n: int, rng: np.random.Generator) -> np.ndarray:
    """Haar-distributed unitary via QR of a complex Ginibre matrix."""
    z = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
    q, r = np.linalg.qr(z)
    d = np.diagonal(r)
    return q * (d / np.abs(d))
