"""Dense complex matrix primitives.

Everything downstream works on plain ``numpy`` complex arrays. The helpers
here validate inputs, split a matrix into Hermitian and skew parts, compute
spectra, polar factors and spectral functions, and generate seeded random
test matrices.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .errors import InvalidAngle, InvalidInput, NonSquare, NotPsd, NumericalFailure

MAX_DIM = 64
RNG_ALGORITHM = "numpy.random.Philox (4x64, 10 rounds) seeded via SeedSequence"

_MASK64 = (1 << 64) - 1


@dataclass(frozen=True)
class SpectralData:
    eigenvalues: np.ndarray  # descending
    eigenvectors: np.ndarray  # columns, unitary


@dataclass(frozen=True)
class PsdVerdict:
    is_psd: bool
    min_eigenvalue: float
    tolerance_used: float

    def __bool__(self) -> bool:
        return self.is_psd


def as_matrix(A) -> np.ndarray:
    """Validate and return ``A`` as a square complex128 array."""
    M = np.asarray(A, dtype=complex)
    if M.ndim == 0:
        M = M.reshape(1, 1)
    if M.ndim != 2 or M.shape[0] != M.shape[1]:
        raise NonSquare(f"expected a square matrix, got shape {M.shape}")
    if M.shape[0] < 1 or M.shape[0] > MAX_DIM:
        raise InvalidInput(f"dimension {M.shape[0]} outside supported range 1..{MAX_DIM}")
    if not np.all(np.isfinite(M)):
        raise InvalidInput("matrix has non-finite entries")
    return M


def op_norm(A: np.ndarray) -> float:
    return float(np.linalg.norm(A, 2)) if A.size else 0.0


def sym(M: np.ndarray) -> np.ndarray:
    """Hermitian part ``(M + M*)/2`` with no checks (internal use)."""
    return (M + M.conj().T) / 2


def hermitian(M, check: bool = True) -> np.ndarray:
    """Return the symmetrized copy of ``M``.

    With ``check`` the asymmetry residual must satisfy
    ``||M - M*||_op <= 1e-13 max(1, ||M||_op)``.
    """
    M = as_matrix(M)
    if check:
        resid = op_norm(M - M.conj().T)
        if resid > 1e-13 * max(1.0, op_norm(M)):
            raise InvalidInput(f"matrix is not Hermitian (asymmetry {resid:.3e})")
    return sym(M)


def cartesian_decompose(A) -> tuple[np.ndarray, np.ndarray]:
    """Split ``A = H + iK`` with ``H = (A + A*)/2`` and ``K = (A - A*)/(2i)``."""
    A = as_matrix(A)
    Ah = A.conj().T
    return (A + Ah) / 2, (A - Ah) / 2j


def real_part(A) -> np.ndarray:
    return cartesian_decompose(A)[0]


def imag_part(A) -> np.ndarray:
    return cartesian_decompose(A)[1]


def jacobi_eigh(H, tol: float = 1e-13, max_sweeps: int = 64) -> SpectralData:
    """Cyclic Jacobi eigensolver for a complex Hermitian matrix.

    Stops once the off-diagonal Frobenius norm drops below ``tol * ||H||_F``.
    Raises NumericalFailure after ``max_sweeps`` sweeps.
    """
    M = np.array(H, dtype=complex)
    n = M.shape[0]
    V = np.eye(n, dtype=complex)
    target = tol * max(np.linalg.norm(M), np.finfo(float).tiny)
    for _ in range(max_sweeps):
        off = np.linalg.norm(M - np.diag(np.diag(M)))
        if off <= target:
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                b = M[p, q]
                mag = abs(b)
                if mag <= target * 1e-3 / n:
                    continue
                phase = b / mag
                app, aqq = M[p, p].real, M[q, q].real
                theta = (aqq - app) / (2 * mag)
                t = math.copysign(1.0, theta) / (abs(theta) + math.sqrt(theta * theta + 1))
                c = 1 / math.sqrt(t * t + 1)
                s = t * c
                # phase fix on column q makes the (p, q) entry real, then a real rotation
                g = np.array([[c, s], [-s * phase.conjugate(), c * phase.conjugate()]])
                idx = [p, q]
                M[:, idx] = M[:, idx] @ g
                M[idx, :] = g.conj().T @ M[idx, :]
                V[:, idx] = V[:, idx] @ g
    else:
        off = np.linalg.norm(M - np.diag(np.diag(M)))
        if off > target:
            raise NumericalFailure(f"Jacobi did not converge in {max_sweeps} sweeps")
    w = np.diag(M).real
    order = np.argsort(-w, kind="stable")
    return SpectralData(w[order], V[:, order])


def hermitian_eigen(H, method: str = "lapack") -> SpectralData:
    """Eigen-decomposition of a Hermitian matrix with descending eigenvalues."""
    H = sym(as_matrix(H))
    if method == "jacobi":
        return jacobi_eigh(H)
    if method != "lapack":
        raise InvalidInput(f"unknown eigen method {method!r}")
    try:
        w, Q = np.linalg.eigh(H)
    except np.linalg.LinAlgError as exc:
        raise NumericalFailure(str(exc)) from exc
    return SpectralData(w[::-1].copy(), Q[:, ::-1].copy())


def eigvalsh_desc(H) -> np.ndarray:
    """Descending eigenvalues of the Hermitian part of ``H``."""
    try:
        return np.linalg.eigvalsh(sym(np.asarray(H, dtype=complex)))[::-1]
    except np.linalg.LinAlgError as exc:
        raise NumericalFailure(str(exc)) from exc


def singular_values(A) -> np.ndarray:
    A = np.asarray(A, dtype=complex)
    if A.size == 0:
        return np.zeros(0)
    try:
        return np.linalg.svd(A, compute_uv=False)
    except np.linalg.LinAlgError as exc:
        raise NumericalFailure(str(exc)) from exc


def _orthonormal_completion(basis: np.ndarray, n: int) -> np.ndarray:
    """Deterministic orthonormal basis of span(basis).

    Gram-Schmidt over the projections of e_1, ..., e_n in index order, so the
    result does not depend on the phases or rotation of ``basis``.
    """
    d = basis.shape[1]
    out = np.zeros((n, d), dtype=complex)
    if d == 0:
        return out
    proj = basis @ basis.conj().T
    m = 0
    for i in range(n):
        v = proj[:, i].copy()
        for _ in range(2):
            v -= out[:, :m] @ (out[:, :m].conj().T @ v)
        nv = np.linalg.norm(v)
        if nv > 1e-6:
            out[:, m] = v / nv
            m += 1
            if m == d:
                break
    if m < d:
        raise NumericalFailure("kernel completion lost rank")
    return out


def polar_decompose(A) -> tuple[np.ndarray, np.ndarray]:
    """Right polar decomposition ``A = U P`` with ``P = |A| = (A*A)^{1/2}``.

    When ``A`` is singular, ``U`` maps an orthonormal basis of ker(A) onto an
    orthonormal basis of range(A)^perp; both bases come from
    :func:`_orthonormal_completion`, which keeps the witness reproducible.
    The zero matrix gets ``U = I``.
    """
    A = as_matrix(A)
    n = A.shape[0]
    try:
        W, s, Vh = np.linalg.svd(A)
    except np.linalg.LinAlgError as exc:
        raise NumericalFailure(str(exc)) from exc
    rank = int(np.sum(s > n * np.finfo(float).eps * s[0]))
    P = sym((Vh.conj().T * s) @ Vh)
    U = W[:, :rank] @ Vh[:rank, :]
    if rank < n:
        ker = _orthonormal_completion(Vh[rank:, :].conj().T, n)
        coker = _orthonormal_completion(W[:, rank:], n)
        U = U + coker @ ker.conj().T
    return U, P


def modulus(A) -> np.ndarray:
    """``|A| = (A*A)^{1/2}``."""
    return polar_decompose(A)[1]


def is_psd(H, scale_tol: float = 1e-10) -> PsdVerdict:
    """Loewner test ``H >= 0`` relative to the spectral scale of ``H``."""
    if scale_tol <= 0:
        raise InvalidInput("scale_tol must be positive")
    w = eigvalsh_desc(H)
    tol = scale_tol * max(1.0, float(np.max(np.abs(w))))
    lo = float(w[-1])
    return PsdVerdict(lo >= -tol, lo, tol)


def loewner_le(A, B, scale_tol: float = 1e-10) -> PsdVerdict:
    """``A <= B`` in the Loewner order."""
    return is_psd(sym(np.asarray(B) - np.asarray(A)), scale_tol)


def apply_function(f: Callable[[np.ndarray], np.ndarray], P, tol: float = 1e-10) -> np.ndarray:
    """Spectral calculus ``f(P) = Q diag(f(lambda)) Q*`` for a psd matrix ``P``.

    Eigenvalues in ``[-tol * scale, 0)`` are clamped to zero.
    """
    spec = hermitian_eigen(P)
    w = spec.eigenvalues
    scale = max(1.0, float(np.max(np.abs(w))))
    if w[-1] < -tol * scale:
        raise NotPsd(f"minimum eigenvalue {w[-1]:.3e} below -{tol * scale:.3e}")
    fw = np.asarray(f(np.maximum(w, 0.0)), dtype=float)
    Q = spec.eigenvectors
    return sym((Q * fw) @ Q.conj().T)


def is_normal(A, tol: float = 1e-10) -> bool:
    A = np.asarray(A, dtype=complex)
    Ah = A.conj().T
    return op_norm(A @ Ah - Ah @ A) <= tol * max(1.0, op_norm(A) ** 2)


# --------------------------------------------------------------------------
# Seeded random matrices
# --------------------------------------------------------------------------


def splitmix64(x: int) -> int:
    """SplitMix64 finalizer (Steele, Lea and Flood)."""
    x = (x + 0x9E3779B97F4A7C15) & _MASK64
    x = ((x ^ (x >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
    x = ((x ^ (x >> 27)) * 0x94D049BB133111EB) & _MASK64
    return x ^ (x >> 31)


def mix_seed(master_seed: int, index: int) -> int:
    """Per-trial seed: ``splitmix64(master ^ splitmix64(index))``."""
    return splitmix64((master_seed & _MASK64) ^ splitmix64(index & _MASK64))


def make_rng(seed: int) -> np.random.Generator:
    return np.random.Generator(np.random.Philox(seed & _MASK64))


def _ginibre(rng: np.random.Generator, n: int) -> np.ndarray:
    return (rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))) / math.sqrt(2)


def _haar_unitary(rng: np.random.Generator, n: int) -> np.ndarray:
    Q, R = np.linalg.qr(_ginibre(rng, n))
    d = np.diag(R)
    return Q * (d / np.abs(d))


def _sqrtm_pd(H: np.ndarray) -> np.ndarray:
    w, Q = np.linalg.eigh(H)
    return sym((Q * np.sqrt(np.maximum(w, 0))) @ Q.conj().T)


def random_matrix(kind: str, n: int, seed: int, alpha: float | None = None) -> np.ndarray:
    """Deterministic random test matrix.

    Parameters
    ----------
    kind : {'ginibre', 'unitary', 'psd', 'hermitian', 'sectorial', 'normal_sectorial'}
    n : int
        Dimension.
    seed : int
        64-bit seed; identical ``(kind, n, seed, alpha)`` gives identical output.
    alpha : float, optional
        Sector half-angle in ``[0, pi/2)``, required by the sectorial kinds.

    Notes
    -----
    ``sectorial`` builds ``A = H + i H^{1/2} S H^{1/2}`` with ``H`` positive
    definite and ``S`` Hermitian of spectral radius ``tan(alpha)``, so the
    minimal sector angle of ``A`` is ``alpha``. ``normal_sectorial`` is
    ``U D U*`` with one eigenvalue on the ray ``arg z = alpha``.
    """
    if not 1 <= n <= MAX_DIM:
        raise InvalidInput(f"dimension {n} outside 1..{MAX_DIM}")
    rng = make_rng(seed)
    if kind in ("sectorial", "normal_sectorial"):
        if alpha is None or not (0.0 <= alpha < math.pi / 2):
            raise InvalidAngle(f"alpha={alpha!r} outside [0, pi/2)")
    if kind == "ginibre":
        return _ginibre(rng, n)
    if kind == "unitary":
        return _haar_unitary(rng, n)
    if kind == "psd":
        G = _ginibre(rng, n)
        return sym(G @ G.conj().T / n)
    if kind == "hermitian":
        return sym(_ginibre(rng, n))
    if kind == "sectorial":
        G = _ginibre(rng, n)
        H = sym(G @ G.conj().T / n) + 0.05 * np.eye(n)
        S = sym(_ginibre(rng, n))
        rho = float(np.max(np.abs(np.linalg.eigvalsh(S))))
        S = S * (math.tan(alpha) / rho) if rho > 0 else S * 0
        Hh = _sqrtm_pd(H)
        return H + 1j * sym(Hh @ S @ Hh)
    if kind == "normal_sectorial":
        U = _haar_unitary(rng, n)
        r = rng.uniform(0.5, 2.0, n)
        phi = rng.uniform(-alpha, alpha, n)
        phi[0] = alpha if rng.random() < 0.5 else -alpha
        D = r * np.exp(1j * phi)
        return (U * D) @ U.conj().T
    raise InvalidInput(f"unknown random matrix kind {kind!r}")
