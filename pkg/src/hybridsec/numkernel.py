"""Complex linear-algebra and random-sampling primitives."""

from dataclasses import dataclass

import numpy as np
import scipy.linalg

from . import _backend
from .errors import RankDeficiencyError

DEFAULT_TOL = 1e-10


@dataclass(frozen=True)
class RngStream:
    """Addressable, reproducible random stream.

    A stream is identified by ``(master_seed, stream_id)`` plus an optional
    ``path`` of child indices. Every call to :meth:`generator` returns a fresh
    generator positioned at the start of the stream, so the same address
    always yields the same samples regardless of which worker draws them.
    """

    master_seed: int
    stream_id: int = 0
    path: tuple = ()

    def child(self, index):
        return RngStream(self.master_seed, self.stream_id, self.path + (int(index),))

    def generator(self):
        seq = np.random.SeedSequence(int(self.master_seed), spawn_key=(int(self.stream_id), *self.path))
        return np.random.Generator(np.random.PCG64(seq))


def as_generator(rng):
    if isinstance(rng, RngStream):
        return rng.generator()
    if isinstance(rng, np.random.Generator):
        return rng
    raise TypeError(f"expected RngStream or numpy Generator, got {type(rng).__name__}")


def sample_complex_gaussian(rows, cols, variance, rng):
    """Draw a ``rows x cols`` matrix of i.i.d. CN(0, variance) entries.

    Real and imaginary parts each carry ``variance / 2``.
    """
    if variance < 0:
        raise ValueError(f"variance must be nonnegative, got {variance}")
    gen = as_generator(rng)
    # draw even when variance == 0 so downstream samples keep their stream position
    z = gen.standard_normal((rows, cols)) + 1j * gen.standard_normal((rows, cols))
    if variance == 0:
        return np.zeros((rows, cols), dtype=np.complex128)
    return np.sqrt(variance / 2.0) * z


def null_space_basis(M, tol=DEFAULT_TOL):
    """Orthonormal basis of the null space of a wide ``k x n`` matrix.

    Singular values below ``tol * s_max`` count as zero. Raises
    :class:`RankDeficiencyError` when ``M`` has fewer than ``k`` significant
    singular values, so the returned basis always has ``n - k`` columns.
    """
    M = np.asarray(M, dtype=np.complex128)
    k, n = M.shape
    if k >= n:
        raise ValueError(f"need a wide matrix (k < n), got {k}x{n}")
    if k == 0:
        return np.eye(n, dtype=np.complex128)
    _, s, vh = np.linalg.svd(M, full_matrices=True)
    rank = int(np.sum(s > tol * s[0])) if s[0] > 0 else 0
    if rank < k:
        raise RankDeficiencyError(rank, k)
    return vh[k:].conj().T


def null_space_columns(M, count, tol=DEFAULT_TOL):
    """``count`` orthonormal null-space directions of a wide ``k x n`` matrix.

    Returns columns ``k .. k+count-1`` of the Householder completion of
    ``range(M^H)``, which costs O(n k count) instead of the O(n^2) full SVD.
    The rank test is the same relative singular-value rule as
    :func:`null_space_basis`.
    """
    M = np.asarray(M, dtype=np.complex128)
    k, n = M.shape
    if k + count > n:
        raise ValueError(f"null space of a {k}x{n} matrix has at most {n - k} directions, asked {count}")
    if k == 0:
        return np.eye(n, count, dtype=np.complex128)
    (qr, tau), r = scipy.linalg.qr(M.conj().T, mode="raw")
    s = np.linalg.svd(r[:k, :k], compute_uv=False)
    rank = int(np.sum(s > tol * s[0])) if s[0] > 0 else 0
    if rank < k:
        raise RankDeficiencyError(rank, k)
    C = np.zeros((n, count), dtype=np.complex128)
    C[k:k + count] = np.eye(count)
    out = scipy.linalg.lapack.zunmqr("L", "N", qr, tau, C, lwork=max(1, 64 * count))
    if out[-1] != 0:
        raise np.linalg.LinAlgError(f"zunmqr failed with info={out[-1]}")
    return out[0]


def phase_only_project(M, N):
    """Constant-modulus projection: each entry becomes ``e^{j arg(x)} / sqrt(N)``.

    Zero entries take phase 0.
    """
    return _backend.phase_project(np.asarray(M, dtype=np.complex128), 1.0 / np.sqrt(N))
