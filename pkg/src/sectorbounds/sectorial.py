"""Sector membership and minimal sector angles.

A matrix is sectorial with half-angle ``alpha`` when its numerical range lies
in ``S_alpha = {z : Re z >= 0, |Im z| <= tan(alpha) Re z}``. With
``A = H + iK`` this is equivalent to ``tan(alpha) H +- K >= 0``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import BoundaryAmbiguous, InvalidAngle, InvalidInput, MethodInapplicable
from .matrix import PsdVerdict, as_matrix, cartesian_decompose, eigvalsh_desc, is_psd, op_norm, sym
from .search import golden_section

ANGLE_TOL = 1e-8
BISECTION_T_MAX = math.tan(math.radians(89.99))
BISECTION_STEPS = 80


@dataclass(frozen=True)
class SectorAngle:
    alpha: float
    tan_alpha: float = field(init=False)
    sec_alpha: float = field(init=False)

    def __post_init__(self):
        a = float(self.alpha)
        if not (0.0 <= a < math.pi / 2):
            raise InvalidAngle(f"alpha={a!r} outside [0, pi/2)")
        object.__setattr__(self, "alpha", a)
        object.__setattr__(self, "tan_alpha", math.tan(a))
        object.__setattr__(self, "sec_alpha", 1.0 / math.cos(a))

    def __float__(self) -> float:
        return self.alpha


@dataclass(frozen=True)
class NotSectorial:
    """Marker returned when no sector ``S_alpha`` with ``alpha < pi/2`` contains W(A)."""

    reason: str

    def __bool__(self) -> bool:
        return False


@dataclass(frozen=True)
class FovSample:
    theta: float
    boundary_point: complex


def as_angle(alpha) -> SectorAngle:
    return alpha if isinstance(alpha, SectorAngle) else SectorAngle(float(alpha))


def sector_contains(A, alpha, tol: float = 1e-10) -> tuple[PsdVerdict, PsdVerdict]:
    """Test ``W(A) in S_alpha`` as ``tan(alpha) Re A + Im A >= 0`` and
    ``tan(alpha) Re A - Im A >= 0``. Contained iff both verdicts are psd."""
    if tol <= 0:
        raise InvalidInput("tol must be positive")
    a = as_angle(alpha)
    H, K = cartesian_decompose(A)
    return is_psd(a.tan_alpha * H + K, tol), is_psd(a.tan_alpha * H - K, tol)


def is_contained(A, alpha, tol: float = 1e-10) -> bool:
    plus, minus = sector_contains(A, alpha, tol)
    return plus.is_psd and minus.is_psd


def block_psd(P, Q, tol: float = 1e-10) -> PsdVerdict:
    """Direct 2n x 2n test of ``[[P, Q], [Q, P]] >= 0``."""
    P = np.asarray(P, dtype=complex)
    Q = np.asarray(Q, dtype=complex)
    return is_psd(np.block([[P, Q], [Q, P]]), tol)


def split_psd(P, Q, tol: float = 1e-10) -> bool:
    """The same test through the balanced rotation: ``P + Q >= 0`` and ``P - Q >= 0``."""
    P = np.asarray(P, dtype=complex)
    Q = np.asarray(Q, dtype=complex)
    return is_psd(P + Q, tol).is_psd and is_psd(P - Q, tol).is_psd


def _kernel_violation(H, K, tol: float):
    """Return a reason string when Re A is not psd, or Im A does not vanish on
    ker(Re A); otherwise ``None`` plus the eigen-decomposition of Re A."""
    w, Q = np.linalg.eigh(H)
    scale = max(1.0, float(np.max(np.abs(w))))
    if w[0] < -tol * scale:
        return f"Re A has eigenvalue {w[0]:.3e} < 0", w, Q, scale
    ker = Q[:, w <= tol * scale]
    if ker.shape[1] and op_norm(K @ ker) > math.sqrt(tol) * max(1.0, op_norm(K)):
        return "Im A does not vanish on ker(Re A)", w, Q, scale
    return None, w, Q, scale


def _whitened(H, K, tol):
    reason, w, Q, scale = _kernel_violation(H, K, tol)
    if reason:
        return NotSectorial(reason)
    if w[0] <= tol * scale:
        raise MethodInapplicable("Re A is singular; use method='bisection'")
    Rm = (Q / np.sqrt(w)) @ Q.conj().T
    rho = float(np.max(np.abs(np.linalg.eigvalsh(sym(Rm @ K @ Rm)))))
    return SectorAngle(math.atan(rho))


def _bisection(H, K, tol):
    reason, *_ = _kernel_violation(H, K, tol)
    if reason:
        return NotSectorial(reason)

    def ok(t):
        return min(eigvalsh_desc(t * H + K)[-1], eigvalsh_desc(t * H - K)[-1]) >= -tol * max(
            1.0, t * op_norm(H) + op_norm(K)
        )

    if ok(0.0):
        return SectorAngle(0.0)
    lo, hi = 0.0, BISECTION_T_MAX
    if not ok(hi):
        return NotSectorial("no tan(alpha) below tan(89.99 deg) certifies containment")
    for _ in range(BISECTION_STEPS):
        mid = 0.5 * (lo + hi)
        if ok(mid):
            hi = mid
        else:
            lo = mid
    return SectorAngle(math.atan(hi))


def _support_points(A, H, K, thetas):
    thetas = np.atleast_1d(np.asarray(thetas, dtype=float))
    stack = np.cos(thetas)[:, None, None] * H + np.sin(thetas)[:, None, None] * K
    _, V = np.linalg.eigh(stack)
    x = V[:, :, -1]
    return np.einsum("ti,ij,tj->t", x.conj(), A, x)


def _fov(A, H, K, tol, coarse=360, width=1e-10):
    reason, *_ = _kernel_violation(H, K, tol)
    if reason:
        return NotSectorial(reason)
    thetas = 2 * np.pi * np.arange(coarse) / coarse
    z = _support_points(A, H, K, thetas)
    args = np.angle(z)
    args[np.abs(z) == 0] = 0.0
    best = float(np.max(np.abs(args)))
    step = 2 * np.pi / coarse
    for sign in (1.0, -1.0):
        j = int(np.argmax(sign * args))

        def g(t, sign=sign):
            zt = _support_points(A, H, K, t)[0]
            return sign * float(np.angle(zt)) if zt != 0 else 0.0

        _, neg = golden_section(lambda t: -g(t), thetas[j] - step, thetas[j] + step, width)
        best = max(best, -neg)
    if best >= math.pi / 2:
        return NotSectorial("numerical range touches the imaginary axis off the origin")
    return SectorAngle(best)


def sector_angle(A, method: str = "whitened", tol: float | None = None):
    """Minimal half-angle ``alpha`` with ``W(A) in S_alpha``.

    Parameters
    ----------
    method : {'whitened', 'bisection', 'fov_sampling'}
        ``whitened`` returns ``arctan`` of the spectral radius of
        ``H^{-1/2} K H^{-1/2}`` and needs ``Re A`` positive definite.
        ``bisection`` searches ``t`` with ``t H +- K >= 0`` and copes with a
        singular ``Re A``. ``fov_sampling`` is an inner approximation from
        support points of the numerical range.

    Returns
    -------
    SectorAngle or NotSectorial
    """
    A = as_matrix(A)
    H, K = cartesian_decompose(A)
    if method == "whitened":
        return _whitened(H, K, 1e-10 if tol is None else tol)
    if method == "bisection":
        return _bisection(H, K, 1e-12 if tol is None else tol)
    if method == "fov_sampling":
        return _fov(A, H, K, 1e-10 if tol is None else tol)
    raise InvalidInput(f"unknown sector_angle method {method!r}")


def minimal_angle(A):
    """Whitened angle, falling back to bisection when ``Re A`` is singular."""
    try:
        return sector_angle(A, "whitened")
    except MethodInapplicable:
        return sector_angle(A, "bisection")


def lemma22_equivalence(A, alpha, tol: float = 1e-12) -> tuple[bool, bool, bool]:
    """Evaluate the three equivalent sectoriality conditions independently.

    1. ``W(A) in S_alpha`` from numerical-range sampling.
    2. ``[[sec(alpha) Re A, A*], [A, sec(alpha) Re A]] >= 0``.
    3. ``[[tan(alpha) Re A, Im A], [Im A, tan(alpha) Re A]] >= 0``.

    Conditions 2 and 3 are checked as full 2n x 2n eigenproblems. Raises
    BoundaryAmbiguous when ``alpha`` is within 1e-8 rad of the exact angle.
    """
    A = as_matrix(A)
    a = as_angle(alpha)
    exact = sector_angle(A, "bisection")
    if isinstance(exact, SectorAngle) and abs(exact.alpha - a.alpha) < ANGLE_TOL:
        raise BoundaryAmbiguous(f"alpha={a.alpha} within {ANGLE_TOL} of sector angle {exact.alpha}")
    H, K = cartesian_decompose(A)
    fov = sector_angle(A, "fov_sampling")
    c1 = isinstance(fov, SectorAngle) and fov.alpha <= a.alpha
    c2 = is_psd(np.block([[a.sec_alpha * H, A.conj().T], [A, a.sec_alpha * H]]), tol).is_psd
    c3 = block_psd(a.tan_alpha * H, K, tol).is_psd
    return c1, c2, c3


def fov_boundary(A, m: int) -> list[FovSample]:
    """Support points ``z(theta) = x* A x`` at ``theta_j = 2 pi j / m``, where
    ``x`` is a top eigenvector of ``Re(exp(-i theta) A)``."""
    if m < 8:
        raise InvalidInput("fov_boundary needs at least 8 samples")
    A = as_matrix(A)
    H, K = cartesian_decompose(A)
    thetas = 2 * np.pi * np.arange(m) / m
    z = _support_points(A, H, K, thetas)
    return [FovSample(float(t), complex(v)) for t, v in zip(thetas, z)]
