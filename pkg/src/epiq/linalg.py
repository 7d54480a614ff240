"""Dense complex linear algebra for small Hilbert spaces.

Everything operates on plain numpy arrays of dimension <= ~16, where
robustness and bit-level reproducibility matter more than asymptotics.
All functions are pure; nothing here holds mutable state.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DimMismatch, NoConvergence, NotHermitian, NotNormalized
from .tolerances import TOL

MAX_JACOBI_SWEEPS = 100


def as_square(matrix) -> np.ndarray:
    a = np.asarray(matrix, dtype=complex)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise DimMismatch(f"expected a square matrix, got shape {a.shape}")
    if not np.isfinite(a).all():
        raise ValueError("matrix entries must be finite")
    return a


def as_ket(vector) -> np.ndarray:
    v = np.asarray(vector, dtype=complex)
    if v.ndim != 1:
        raise DimMismatch(f"expected a 1-d amplitude vector, got shape {v.shape}")
    if not np.isfinite(v).all():
        raise ValueError("amplitudes must be finite")
    return v


def dagger(matrix) -> np.ndarray:
    return np.conjugate(np.transpose(matrix))


def hermitian_defect(matrix) -> float:
    a = as_square(matrix)
    return float(np.max(np.abs(a - dagger(a))))


def require_hermitian(matrix, tol: float = TOL.herm) -> np.ndarray:
    a = as_square(matrix)
    defect = float(np.max(np.abs(a - dagger(a))))
    if defect > tol:
        raise NotHermitian(f"Hermitian defect {defect:.3e} exceeds {tol:.1e}")
    return a


def require_unit(vector, tol: float = TOL.norm) -> np.ndarray:
    v = as_ket(vector)
    n = float(np.linalg.norm(v))
    if abs(n - 1.0) > tol:
        raise NotNormalized(f"norm {n!r} is not 1 within {tol:.1e}")
    return v


def outer(u, v) -> np.ndarray:
    """|u><v| as a dense matrix; outer(u, u) of a unit ket is a rank-1 projector."""
    a = as_ket(u)
    b = as_ket(v)
    if a.shape != b.shape:
        raise DimMismatch(f"ket dims differ: {a.shape[0]} vs {b.shape[0]}")
    return np.outer(a, np.conjugate(b))


def trace_product(a, b) -> complex:
    """trace(a @ b) without forming the product (sum of a[i,j] * b[j,i])."""
    x = as_square(a)
    y = as_square(b)
    if x.shape != y.shape:
        raise DimMismatch(f"matrix dims differ: {x.shape[0]} vs {y.shape[0]}")
    return complex(np.sum(x * y.T))


@dataclass(frozen=True)
class EigenDecomposition:
    """Eigenvalues in ascending order; column k of `vectors` pairs with values[k]."""

    values: np.ndarray
    vectors: np.ndarray

    @property
    def dim(self) -> int:
        return len(self.values)

    def ket(self, k: int) -> np.ndarray:
        return self.vectors[:, k]

    def reconstruct(self) -> np.ndarray:
        return (self.vectors * self.values) @ dagger(self.vectors)


def _max_offdiag(a: np.ndarray) -> float:
    off = a - np.diag(a.diagonal())
    return float(np.max(np.abs(off)))


def _rotate(a: np.ndarray, v: np.ndarray, p: int, q: int) -> None:
    """One Jacobi rotation zeroing a[p,q]; updates a (similarity) and v (basis)."""
    apq = a[p, q]
    mag = abs(apq)
    phase = apq / mag
    h = (a[q, q].real - a[p, p].real) / (2.0 * mag)
    if h != 0.0:
        t = np.sign(h) / (abs(h) + np.sqrt(1.0 + h * h))
    else:
        t = 1.0
    c = 1.0 / np.sqrt(1.0 + t * t)
    s = t * c * phase

    cp = a[:, p].copy()
    cq = a[:, q].copy()
    a[:, p] = c * cp - np.conj(s) * cq
    a[:, q] = s * cp + c * cq
    rp = a[p, :].copy()
    rq = a[q, :].copy()
    a[p, :] = c * rp - s * rq
    a[q, :] = np.conj(s) * rp + c * rq
    a[p, q] = 0.0
    a[q, p] = 0.0

    vp = v[:, p].copy()
    vq = v[:, q].copy()
    v[:, p] = c * vp - np.conj(s) * vq
    v[:, q] = s * vp + c * vq


def _fix_phase(w: np.ndarray) -> np.ndarray:
    """Rotate the global phase so the largest-magnitude component is real positive.

    Near-ties resolve to the smallest index so the choice is stable under
    last-bit noise.
    """
    mags = np.abs(w)
    peak = float(mags.max())
    idx = int(np.flatnonzero(mags >= peak * (1.0 - 1e-9))[0])
    return w * np.conj(w[idx] / mags[idx])


def _standard_basis_span(block: np.ndarray) -> np.ndarray:
    """Canonical orthonormal basis of span(block): project the standard basis
    onto the subspace and Gram-Schmidt the projections in index order."""
    n, m = block.shape
    proj = block @ dagger(block)
    for threshold in (1e-6, 1e-12):
        cols: list[np.ndarray] = []
        for j in range(n):
            w = proj[:, j].copy()
            for u in cols:
                w -= u * np.vdot(u, w)
            wn = float(np.linalg.norm(w))
            if wn > threshold:
                cols.append(w / wn)
            if len(cols) == m:
                return np.column_stack(cols)
    raise NoConvergence("could not rebase a degenerate eigenspace")


def _canonicalize(values: np.ndarray, vectors: np.ndarray) -> np.ndarray:
    # Clusters narrower than the reconstruction tolerance are treated as one
    # eigenspace; rebasing inside them moves the reconstruction by at most
    # the cluster width.
    ctol = 1e-11 * max(1.0, float(np.abs(values).max()))
    out = vectors.copy()
    start = 0
    n = len(values)
    while start < n:
        stop = start + 1
        while stop < n and values[stop] - values[stop - 1] <= ctol:
            stop += 1
        if stop - start > 1:
            out[:, start:stop] = _standard_basis_span(out[:, start:stop])
        for k in range(start, stop):
            out[:, k] = _fix_phase(out[:, k])
        start = stop
    return out


def hermitian_eig(matrix, max_sweeps: int = MAX_JACOBI_SWEEPS) -> EigenDecomposition:
    """Eigendecomposition of a Hermitian matrix by cyclic complex Jacobi sweeps.

    Degenerate clusters are rebased onto the standard basis in index order and
    each vector's phase is fixed (largest component real positive), so the
    result is deterministic given identical input bits.
    """
    a = require_hermitian(matrix)
    n = a.shape[0]
    a = 0.5 * (a + dagger(a))
    v = np.eye(n, dtype=complex)
    if n > 1:
        scale = max(1.0, float(np.abs(a).max()))
        target = 1e-14 * scale
        converged = False
        for _ in range(max_sweeps):
            if _max_offdiag(a) <= target:
                converged = True
                break
            for p in range(n - 1):
                for q in range(p + 1, n):
                    if abs(a[p, q]) > target / (2 * n):
                        _rotate(a, v, p, q)
        if not converged and _max_offdiag(a) > target:
            raise NoConvergence(f"no convergence within {max_sweeps} Jacobi sweeps")
    values = a.diagonal().real.copy()
    order = np.argsort(values, kind="stable")
    values = values[order]
    vectors = _canonicalize(values, v[:, order])
    return EigenDecomposition(values=values, vectors=vectors)


def random_ket(dim: int, rng: np.random.Generator) -> np.ndarray:
    v = rng.standard_normal(dim) + 1j * rng.standard_normal(dim)
    return v / np.linalg.norm(v)


def random_hermitian(dim: int, rng: np.random.Generator, scale: float = 1.0) -> np.ndarray:
    a = rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))
    return scale * 0.5 * (a + dagger(a))


def random_unitary(dim: int, rng: np.random.Generator) -> np.ndarray:
    a = rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))
    q, r = np.linalg.qr(a)
    d = r.diagonal()
    return q * (d / np.abs(d))
