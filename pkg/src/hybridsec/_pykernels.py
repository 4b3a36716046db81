"""Pure numpy implementations of the hot kernels.

These mirror ``_ckernels.pyx`` exactly in signature and semantics and are
used when the compiled extension is unavailable or disabled.
"""

import numpy as np


def phase_project(x, scale):
    """Map every entry to ``scale * x / |x|``; zero entries get phase 0."""
    x = np.asarray(x, dtype=np.complex128)
    mag = np.abs(x)
    out = np.full(x.shape, scale, dtype=np.complex128)
    nz = mag > 0.0
    out[nz] = scale * (x[nz] / mag[nz])
    return out


def ins_solve(H_hat, Q, A0, tol, max_iter):
    """Alternating projection between null(H_hat^H) and the constant-modulus set.

    Parameters
    ----------
    H_hat : (N, K) complex array
    Q : (N, K) complex array
        Orthonormal basis of range(H_hat).
    A0 : (N, C) complex array
        Constant-modulus starting columns.
    tol : float
        Target leakage ``||H_hat^H a||^2``.
    max_iter : int

    Returns
    -------
    A : (N, C) best iterate per column
    iters : (C,) int64 projection steps used per column
    leak : (C,) float64 leakage of the returned column
    """
    H_hat = np.asarray(H_hat, dtype=np.complex128)
    Q = np.asarray(Q, dtype=np.complex128)
    A = np.array(A0, dtype=np.complex128, copy=True)
    n, ncol = A.shape
    scale = 1.0 / np.sqrt(n)
    Hh = H_hat.conj().T
    Qh = Q.conj().T
    iters = np.zeros(ncol, dtype=np.int64)
    leak = np.zeros(ncol, dtype=np.float64)
    for c in range(ncol):
        a = A[:, c].copy()
        best = a
        r = Hh @ a
        lk = float(np.real(np.vdot(r, r)))
        best_lk = lk
        it = 0
        while lk > tol and it < max_iter:
            x = a - Q @ (Qh @ a)
            a = phase_project(x, scale)
            it += 1
            r = Hh @ a
            lk = float(np.real(np.vdot(r, r)))
            if lk < best_lk:
                best, best_lk = a, lk
        A[:, c] = best
        iters[c] = it
        leak[c] = best_lk
    return A, iters, leak
