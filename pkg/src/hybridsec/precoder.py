"""Data and artificial-noise (AN) precoder construction.

Five schemes are supported:

========  ==================================================================
``ANA``   pure analog: conjugate-phase data columns, phase-only AN columns
          found by iterative null-space search (INS); no baseband stage
``HMF``   hybrid: phase-only RF stage shared by data and AN, baseband MF
``HZF``   hybrid: same RF stage, baseband ZF
``FMF``   full digital MF with null-space AN
``FZF``   full digital ZF with null-space AN
========  ==================================================================

Every builder returns matrices normalized so that ``||F W||_F^2 = K`` and
``||A V||_F^2 = L - K``.
"""

import enum
from dataclasses import dataclass
from functools import cached_property, lru_cache

import numpy as np

from . import _backend
from .errors import SingularMatrixError
from .numkernel import DEFAULT_TOL, as_generator, null_space_basis, null_space_columns, phase_only_project

INS_TOL = 1e-6
INS_MAX_ITER = 500

# Gram matrices with condition number above this are treated as singular.
COND_LIMIT = 1e12


class Scheme(str, enum.Enum):
    ANA = "ANA"
    HMF = "HMF"
    HZF = "HZF"
    FMF = "FMF"
    FZF = "FZF"

    def __str__(self):
        return self.value

    @property
    def is_analog_rf(self):
        return self in (Scheme.ANA, Scheme.HMF, Scheme.HZF)

    @property
    def is_zf(self):
        return self in (Scheme.HZF, Scheme.FZF)


@dataclass(frozen=True)
class InsReport:
    iterations: np.ndarray
    leakage: np.ndarray
    tol: float

    @property
    def converged(self):
        return self.leakage <= self.tol

    @property
    def all_converged(self):
        return bool(np.all(self.converged))


@dataclass(frozen=True, eq=False)
class PrecoderSet:
    """RF and baseband matrices for one scheme on one channel estimate.

    ``gamma`` is the scalar data-precoder scaling factor (``None`` for ANA).
    """

    scheme: Scheme
    F: np.ndarray
    W: np.ndarray
    A: np.ndarray
    V: np.ndarray
    L3: int
    gamma: float = None
    ins: InsReport = None

    @property
    def full_digital(self):
        return self.scheme in (Scheme.FMF, Scheme.FZF)

    @cached_property
    def data_beam(self):
        """Effective data precoder ``F W`` (N x K)."""
        return self.W if self.full_digital else self.F @ self.W

    @cached_property
    def an_beam(self):
        """Effective AN precoder ``A V`` (N x L3)."""
        return self.V if self.full_digital else self.A @ self.V


def _check_nonzero(H_hat):
    if not np.any(H_hat):
        raise ValueError("degenerate channel estimate (all zeros)")


def _random_phases(rows, cols, gen):
    return np.exp(1j * gen.uniform(0.0, 2.0 * np.pi, size=(rows, cols))) / np.sqrt(rows)


def build_analog_data(H_hat):
    """Conjugate-phase RF data precoder, one column per MT."""
    H_hat = np.asarray(H_hat, dtype=np.complex128)
    return phase_only_project(H_hat, H_hat.shape[0])


def build_analog_an_ins(H_hat, count, rng, tol=INS_TOL, max_iter=INS_MAX_ITER):
    """Phase-only AN columns lying (to ``tol``) in the null space of ``H_hat^H``.

    Each column starts from an independent random constant-modulus vector
    and alternates between the orthogonal projection onto null(H_hat^H) and
    the constant-modulus projection. Columns that miss ``tol`` within
    ``max_iter`` steps are returned best-effort; check ``report.converged``.

    Returns
    -------
    A : (N, count) complex array
    report : InsReport
    """
    H_hat = np.asarray(H_hat, dtype=np.complex128)
    n = H_hat.shape[0]
    A0 = _random_phases(n, count, as_generator(rng))
    if H_hat.shape[1] == 0:
        return A0, InsReport(np.zeros(count, np.int64), np.zeros(count), tol)
    Q, _ = np.linalg.qr(H_hat)
    A, iters, leak = _backend.ins_solve(H_hat, Q, A0, tol, max_iter)
    return A, InsReport(iters, leak, tol)


def build_hybrid_rf(H_hat, L, rng):
    """Shared RF stage: K conjugate-phase columns, then L - K random-phase columns.

    Random phases are drawn independently per entry.
    """
    H_hat = np.asarray(H_hat, dtype=np.complex128)
    n, k = H_hat.shape
    if L < k:
        raise ValueError(f"need L >= K, got L={L}, K={k}")
    F = build_analog_data(H_hat)
    if L == k:
        return F
    return np.hstack([F, _random_phases(n, L - k, as_generator(rng))])


@lru_cache(maxsize=8)
def _identity(n):
    eye = np.eye(n, dtype=np.complex128)
    eye.flags.writeable = False
    return eye


def _apply(F, X):
    return X if F is None else F @ X


def _gram(F, H_hat):
    B = _apply(None if F is None else F.conj().T, H_hat)  # L x K
    return B, B.conj().T @ B


def build_baseband_mf(F, H_hat):
    """``W = gamma_MF F^H H_hat`` scaled to ``||F W||_F^2 = K``.

    ``F = None`` stands for an identity RF stage (full-digital precoding).
    """
    H_hat = np.asarray(H_hat, dtype=np.complex128)
    _check_nonzero(H_hat)
    k = H_hat.shape[1]
    B, _ = _gram(F, H_hat)
    FB = _apply(F, B)
    tr = float(np.real(np.vdot(FB, FB)))
    if tr <= 0.0:
        raise ValueError("zero trace in MF normalization")
    return np.sqrt(k / tr) * B


def build_baseband_zf(F, H_hat):
    """``W = gamma F^H H_hat (H_hat^H F F^H H_hat)^{-1}`` scaled to ``||F W||_F^2 = K``.

    The scaling is computed from the realized ``||F W||_F`` so the power
    constraint holds exactly even when ``F^H F`` is not the identity; for a
    unitary RF stage it equals ``sqrt(K / tr(G^{-1}))``. ``F = None`` stands
    for an identity RF stage.
    """
    H_hat = np.asarray(H_hat, dtype=np.complex128)
    _check_nonzero(H_hat)
    k = H_hat.shape[1]
    B, G = _gram(F, H_hat)
    cond = np.linalg.cond(G)
    if not np.isfinite(cond) or cond > COND_LIMIT:
        raise SingularMatrixError(cond, "ZF Gram matrix")
    Wu = np.linalg.solve(G.T, B.T).T  # B @ inv(G)
    FW = _apply(F, Wu)
    return np.sqrt(k / float(np.real(np.vdot(FW, FW)))) * Wu


def build_baseband_an(A, H_hat, L3=None, tol=DEFAULT_TOL):
    """Null-space baseband AN precoder scaled to ``||A V||_F^2 = L3``.

    ``L3`` defaults to the full null-space dimension ``cols(A) - K``; a
    smaller value keeps the leading ``L3`` basis columns.
    """
    H_hat = np.asarray(H_hat, dtype=np.complex128)
    _check_nonzero(H_hat)
    V = null_space_basis(H_hat.conj().T @ A, tol)
    if L3 is not None:
        if L3 > V.shape[1]:
            raise ValueError(f"requested {L3} AN streams but null space has {V.shape[1]}")
        V = V[:, :L3]
    AV = A @ V
    return V * np.sqrt(V.shape[1] / float(np.real(np.vdot(AV, AV))))


def build_analog(H_hat, L, rng, ins_tol=INS_TOL, ins_max_iter=INS_MAX_ITER):
    H_hat = np.asarray(H_hat, dtype=np.complex128)
    _check_nonzero(H_hat)
    k = H_hat.shape[1]
    F = build_analog_data(H_hat)
    A, report = build_analog_an_ins(H_hat, L - k, rng, ins_tol, ins_max_iter)
    return PrecoderSet(Scheme.ANA, F, np.eye(k, dtype=np.complex128), A,
                       np.eye(L - k, dtype=np.complex128), L - k, ins=report)


def build_hybrid(scheme, H_hat, L, rng):
    scheme = Scheme(scheme)
    H_hat = np.asarray(H_hat, dtype=np.complex128)
    _check_nonzero(H_hat)
    F = build_hybrid_rf(H_hat, L, rng)
    if scheme is Scheme.HMF:
        W = build_baseband_mf(F, H_hat)
    elif scheme is Scheme.HZF:
        W = build_baseband_zf(F, H_hat)
    else:
        raise ValueError(f"not a hybrid scheme: {scheme}")
    V = build_baseband_an(F, H_hat)
    k = H_hat.shape[1]
    return PrecoderSet(scheme, F, W, F, V, L - k, gamma=_scale_of(F, W, H_hat, scheme))


def build_full_digital(scheme, H_hat, L3):
    """Full-digital MF/ZF with ``L3`` null-space AN streams (RF stages are identities).

    The AN precoder keeps ``L3`` orthonormal directions of null(H_hat^H)
    rather than all ``N - K``, so its per-stream power matches the hybrid
    schemes.
    """
    scheme = Scheme(scheme)
    H_hat = np.asarray(H_hat, dtype=np.complex128)
    _check_nonzero(H_hat)
    n, k = H_hat.shape
    if n - k < L3:
        raise ValueError(f"need N - K >= L3, got N={n}, K={k}, L3={L3}")
    if scheme is Scheme.FMF:
        W = build_baseband_mf(None, H_hat)
        gamma = float(np.linalg.norm(W) / np.linalg.norm(H_hat))
    elif scheme is Scheme.FZF:
        W = build_baseband_zf(None, H_hat)
        gamma = float(np.real(np.trace(H_hat.conj().T @ W)) / k)
    else:
        raise ValueError(f"not a full-digital scheme: {scheme}")
    V = null_space_columns(H_hat.conj().T, L3)
    eye = _identity(n)
    return PrecoderSet(scheme, eye, W, eye, V, L3, gamma=gamma)


def _scale_of(F, W, H_hat, scheme):
    # W = gamma * F^H H_hat X with X = I (MF) or the inverse Gram (ZF); recover gamma.
    if Scheme(scheme).is_zf:
        return float(np.real(np.trace(H_hat.conj().T @ F @ W)) / H_hat.shape[1])
    return float(np.linalg.norm(W) / np.linalg.norm(F.conj().T @ H_hat))


def build_precoders(scheme, H_hat, L, rng, ins_tol=INS_TOL, ins_max_iter=INS_MAX_ITER):
    """Dispatch to the builder for ``scheme``; ``rng`` feeds random RF phases and INS starts."""
    scheme = Scheme(scheme)
    if scheme is Scheme.ANA:
        return build_analog(H_hat, L, rng, ins_tol, ins_max_iter)
    if scheme in (Scheme.HMF, Scheme.HZF):
        return build_hybrid(scheme, H_hat, L, rng)
    return build_full_digital(scheme, H_hat, L - np.asarray(H_hat).shape[1])
