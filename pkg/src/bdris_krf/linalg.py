"""Dense complex linear algebra kernels used across the package.

Everything here follows the column-major (Fortran) vectorization convention:
``vec`` stacks columns, and all index bookkeeping for Kronecker-structured
vectors is derived from that choice.
"""

from dataclasses import dataclass

import numpy as np
import scipy.linalg

__all__ = [
    "PermutationMap",
    "dft_matrix",
    "khatri_rao",
    "kron",
    "kron_vec_permutation",
    "rank_one_approx",
    "unvec",
    "vec",
    "weyl_heisenberg_basis",
]


def kron(a, b):
    """Kronecker product of two matrices.

    Entry rule: ``kron(a, b)[i_a * rows(b) + i_b, j_a * cols(b) + j_b]
    = a[i_a, j_a] * b[i_b, j_b]``.
    """
    a = np.atleast_2d(np.asarray(a))
    b = np.atleast_2d(np.asarray(b))
    return np.kron(a, b)


def khatri_rao(a, b):
    """Column-wise Kronecker product of two matrices with equal column counts.

    Column ``r`` of the result is ``kron(a[:, r], b[:, r])``.
    """
    a = np.atleast_2d(np.asarray(a))
    b = np.atleast_2d(np.asarray(b))
    if a.shape[1] != b.shape[1]:
        raise ValueError(
            f"khatri_rao needs matching column counts, got {a.shape[1]} and {b.shape[1]}"
        )
    return scipy.linalg.khatri_rao(a, b)


def vec(a):
    """Stack the columns of a matrix into one vector."""
    return np.asarray(a).reshape(-1, order="F")


def unvec(v, rows, cols):
    """Inverse of :func:`vec`: reshape a vector into a rows-by-cols matrix."""
    v = np.asarray(v)
    if v.size != rows * cols:
        raise ValueError(f"cannot unvec length {v.size} into {rows}x{cols}")
    return v.reshape(rows, cols, order="F")


@dataclass(frozen=True, eq=False)
class PermutationMap:
    """Index permutation stored as a forward map, never as a dense matrix.

    ``forward[src] = dst`` means entry ``src`` of the input lands at position
    ``dst`` of the output.
    """

    forward: np.ndarray

    def __post_init__(self):
        fwd = np.asarray(self.forward, dtype=np.intp)
        if sorted(fwd.tolist()) != list(range(fwd.size)):
            raise ValueError("forward is not a permutation of 0..size-1")
        object.__setattr__(self, "forward", fwd)

    @property
    def size(self):
        return self.forward.size

    def apply(self, v):
        v = np.asarray(v)
        if v.shape != (self.size,):
            raise ValueError(f"expected vector of length {self.size}, got shape {v.shape}")
        out = np.empty_like(v)
        out[self.forward] = v
        return out

    def apply_inverse(self, v):
        v = np.asarray(v)
        if v.shape != (self.size,):
            raise ValueError(f"expected vector of length {self.size}, got shape {v.shape}")
        return v[self.forward]


def kron_vec_permutation(mt, mr, nbar):
    """Permutation sending ``vec(A kron B)`` to ``vec(A) kron vec(B)``.

    Here ``A`` is mt-by-nbar and ``B`` is mr-by-nbar.  Writing a source index
    as ``j*(mt*mr) + i`` with ``i = a_r*mr + b_r`` and ``j = a_c*nbar + b_c``,
    the entry moves to ``(a_c*mt + a_r)*(mr*nbar) + (b_c*mr + b_r)``.  The
    reshape/transpose below realizes exactly that index rule.
    """
    for name, val in (("mt", mt), ("mr", mr), ("nbar", nbar)):
        if val < 1:
            raise ValueError(f"{name} must be a positive integer, got {val}")
    size = mt * mr * nbar * nbar
    # Source axes in column-major order: (b_r, a_r, b_c, a_c).
    src = np.arange(size).reshape((mr, mt, nbar, nbar), order="F")
    # Destination orders them (b_r, b_c, a_r, a_c); gather[dst] = src.
    gather = src.transpose(0, 2, 1, 3).reshape(-1, order="F")
    forward = np.empty(size, dtype=np.intp)
    forward[gather] = np.arange(size)
    return PermutationMap(forward)


def rank_one_approx(m, tol=1e-12, max_iter=200):
    """Best rank-one approximation ``m ~ sigma * outer(u, conj(v))``.

    Runs an alternating power iteration seeded with the largest-norm column
    of ``m`` and stops once successive estimates of the dominant singular
    value agree to ``tol`` relative; if that never happens within
    ``max_iter`` sweeps, falls back to one full SVD.  The returned ``u`` and
    ``v`` have unit norm and the first nonzero entry of ``u`` is made real
    nonnegative so the output is deterministic.

    Returns
    -------
    (sigma, u, v) with sigma a nonnegative float, u of length rows(m) and
    v of length cols(m); the approximation is ``sigma * u @ v.conj().T``.
    """
    m = np.asarray(m, dtype=np.complex128)
    if m.ndim != 2:
        raise ValueError(f"expected a matrix, got ndim={m.ndim}")
    rows, cols = m.shape
    if not m.any():
        u = np.zeros(rows, dtype=np.complex128)
        v = np.zeros(cols, dtype=np.complex128)
        u[0] = 1.0
        v[0] = 1.0
        return 0.0, u, v

    col_norms = np.linalg.norm(m, axis=0)
    u = m[:, int(np.argmax(col_norms))].copy()
    u /= np.linalg.norm(u)
    v = None
    sigma = 0.0
    converged = False
    for _ in range(max_iter):
        w = m.conj().T @ u
        wn = np.linalg.norm(w)
        if wn == 0.0:
            break
        v = w / wn
        z = m @ v
        sigma_new = np.linalg.norm(z)
        if sigma_new == 0.0:
            break
        u = z / sigma_new
        if abs(sigma_new - sigma) <= tol * sigma_new:
            sigma = sigma_new
            converged = True
            break
        sigma = sigma_new
    if not converged:
        svd_u, svd_s, svd_vh = np.linalg.svd(m)
        sigma = float(svd_s[0])
        u = svd_u[:, 0]
        v = svd_vh[0].conj()
    return _fix_phase(float(sigma), u, v)


def _fix_phase(sigma, u, v):
    # Rotate so the first numerically nonzero entry of u is real nonnegative;
    # the compensating rotation of v leaves sigma * u * v^H unchanged.
    mags = np.abs(u)
    idx = int(np.argmax(mags > 1e-12 * mags.max()))
    pivot = u[idx]
    if abs(pivot) > 0:
        phase = pivot / abs(pivot)
        u = u * np.conj(phase)
        v = v * np.conj(phase)
    return sigma, u, v


def dft_matrix(n):
    """Unnormalized n-by-n DFT matrix with entries exp(-2i*pi*j*k/n)."""
    if n < 1:
        raise ValueError(f"n must be a positive integer, got {n}")
    return scipy.linalg.dft(n)


def weyl_heisenberg_basis(nbar):
    """The nbar^2 unitary shift-and-modulate matrices D^k P^p.

    D is the diagonal modulation diag(1, w, ..., w^(nbar-1)) with
    w = exp(-2i*pi/nbar) and P the cyclic down-shift.  The list is ordered
    with k varying fastest: element ``p*nbar + k`` is D^k P^p.  These are
    pairwise trace-orthogonal with norm sqrt(nbar) and tile the whole matrix
    space, which is what makes the scattering training design below
    orthogonal.
    """
    if nbar < 1:
        raise ValueError(f"nbar must be a positive integer, got {nbar}")
    idx = np.arange(nbar)
    d = np.exp(-2j * np.pi * idx / nbar)
    down = np.zeros((nbar, nbar), dtype=np.complex128)
    down[(idx + 1) % nbar, idx] = 1.0
    mats = []
    shift_p = np.eye(nbar, dtype=np.complex128)
    for _p in range(nbar):
        for k in range(nbar):
            mats.append((d**k)[:, None] * shift_p)
        shift_p = down @ shift_p
    return mats
