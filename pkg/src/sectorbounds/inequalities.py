"""Checkable forms of the lemmas and proof steps behind the sectorial
Rotfel'd bounds.

Where a proof builds an explicit unitary (always from a polar
decomposition), the check returns it as a witness together with the minimum
eigenvalue of the asserted-psd difference. Existence-only statements are
checked through their weak-majorization consequences.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import BlockNotPsd, CounterexampleAlarm, InvalidScale, NotInSector, PreconditionFailed
from .matrix import (
    as_matrix,
    cartesian_decompose,
    eigvalsh_desc,
    is_psd,
    loewner_le,
    op_norm,
    polar_decompose,
    singular_values,
    sym,
)
from .norms import ConcaveFunction, majorization_gaps, weak_majorize
from .sectorial import as_angle, is_contained

RESIDUAL_TOL = 1e-9


@dataclass(frozen=True)
class WitnessReport:
    label: str
    witness_unitaries: list  # (name, matrix) pairs
    residual_min_eig: float
    holds: bool
    s: float
    tolerance: float


def _residual_report(label, rhs, lhs, s, witnesses) -> WitnessReport:
    diff = sym(rhs - lhs)
    lo = float(eigvalsh_desc(diff)[-1])
    tol = RESIDUAL_TOL * max(1.0, op_norm(rhs))
    return WitnessReport(label, witnesses, lo, lo >= -tol, float(s), tol)


def _check_scale(s):
    if not s > 0:
        raise InvalidScale(f"scaling parameter must be positive, got {s!r}")


def lemma21_check(Ablk, X, Bblk, s: float) -> tuple[WitnessReport, WitnessReport]:
    """Both conclusions of the 2x2 block lemma for ``[[A, X], [X*, B]] >= 0``.

    The first report is ``|X*| <= (s/2) A + (1/2s) U* B U`` with ``U`` from the
    polar decomposition ``X* = U |X*|``. The second applies the same
    construction to the flipped block ``[[B, X*], [X, A]]`` with ``s -> 1/s``:
    ``|X| <= (s/2) V* A V + (1/2s) B`` where ``X = V |X|``.
    """
    _check_scale(s)
    Ablk, Bblk, X = as_matrix(Ablk), as_matrix(Bblk), as_matrix(X)
    block = np.block([[Ablk, X], [X.conj().T, Bblk]])
    verdict = is_psd(block)
    if not verdict.is_psd:
        raise BlockNotPsd(f"block matrix has eigenvalue {verdict.min_eigenvalue:.3e}")
    U, absXs = polar_decompose(X.conj().T)
    first = _residual_report(
        "mr", s / 2 * Ablk + U.conj().T @ Bblk @ U / (2 * s), absXs, s, [("U", U)]
    )
    V, absX = polar_decompose(X)
    second = _residual_report(
        "swap", s / 2 * V.conj().T @ Ablk @ V + Bblk / (2 * s), absX, s, [("V", V)]
    )
    return first, second


def lemma21_congruence(Ablk, X, Bblk, s: float) -> float:
    """Minimum eigenvalue of ``[sI, -U*] M [sI; -U]`` for the block ``M``;
    nonnegative whenever ``M >= 0``."""
    _check_scale(s)
    Ablk, Bblk, X = as_matrix(Ablk), as_matrix(Bblk), as_matrix(X)
    n = Ablk.shape[0]
    U, _ = polar_decompose(X.conj().T)
    M = np.block([[Ablk, X], [X.conj().T, Bblk]])
    C = np.vstack([s * np.eye(n), -U])
    return float(eigvalsh_desc(C.conj().T @ M @ C)[-1])


def thompson_consequence(A, B) -> bool:
    """``sigma(A + B)`` is weakly majorized by ``sigma(A) + sigma(B)``.

    Raises CounterexampleAlarm if the check fails.
    """
    sa, sb, sab = singular_values(A), singular_values(B), singular_values(np.asarray(A) + np.asarray(B))
    tol = RESIDUAL_TOL * max(1.0, float(sa.sum() + sb.sum()))
    if not weak_majorize(sab, sa + sb, tol):
        raise CounterexampleAlarm(f"Ky Fan gaps {majorization_gaps(sab, sa + sb)}")
    return True


def bourin_uchiyama_consequence(f: ConcaveFunction, A, B) -> bool:
    """``lambda(f(A + B))`` is weakly majorized by ``lambda(f(A)) + lambda(f(B))``
    for psd ``A, B``. Raises CounterexampleAlarm if the check fails."""
    la, lb = np.maximum(eigvalsh_desc(A), 0), np.maximum(eigvalsh_desc(B), 0)
    lab = np.maximum(eigvalsh_desc(np.asarray(A) + np.asarray(B)), 0)
    fa, fb, fab = f(la), f(lb), f(lab)
    tol = RESIDUAL_TOL * max(1.0, float(fa.sum() + fb.sum()))
    if not weak_majorize(fab, fa + fb, tol):
        raise CounterexampleAlarm(f"Ky Fan gaps {majorization_gaps(fab, fa + fb)}")
    return True


def fan_hoffman_margins(A) -> np.ndarray:
    """``sigma_j(A) - lambda_j(Re A)`` for every j."""
    return singular_values(A) - eigvalsh_desc(cartesian_decompose(A)[0])


def fan_hoffman_check(A) -> bool:
    sv = singular_values(A)
    margins = fan_hoffman_margins(A)
    return bool(np.all(margins >= -RESIDUAL_TOL * max(1.0, float(sv[0]))))


def weyl_norm_monotone(f: ConcaveFunction, A, B) -> bool:
    """``A >= B >= 0`` implies ``f(lambda_j(A)) >= f(lambda_j(B))`` for every j,
    hence ``||f(A)|| >= ||f(B)||`` for every unitarily invariant norm."""
    if not is_psd(B).is_psd or not loewner_le(B, A).is_psd:
        raise PreconditionFailed("need A >= B >= 0")
    fa = f(np.maximum(eigvalsh_desc(A), 0))
    fb = f(np.maximum(eigvalsh_desc(B), 0))
    tol = RESIDUAL_TOL * max(1.0, float(np.max(np.abs(fa))))
    return bool(np.all(fa >= fb - tol))


def re_modulus_dominance(f: ConcaveFunction, A) -> bool:
    """``||f(Re A)|| <= ||f(|A|)||`` for every unitarily invariant norm, via
    weak majorization of ``f(lambda(Re A))`` by ``f(sigma(A))``."""
    H = cartesian_decompose(A)[0]
    verdict = is_psd(H)
    if not verdict.is_psd:
        raise PreconditionFailed(f"Re A is not psd (min eigenvalue {verdict.min_eigenvalue:.3e})")
    fre = f(np.maximum(eigvalsh_desc(H), 0))
    fmod = f(singular_values(A))
    return weak_majorize(fre, fmod, RESIDUAL_TOL * max(1.0, float(fmod.sum())))


def _sectorial_parts(A, alpha, s):
    _check_scale(s)
    A = as_matrix(A)
    a = as_angle(alpha)
    if not is_contained(A, a):
        raise NotInSector(f"W(A) is not contained in S_alpha for alpha={a.alpha}")
    H, K = cartesian_decompose(A)
    return A, a, H, K


def im_part_bound(A, alpha, s: float) -> WitnessReport:
    """``|Im A| <= (s tan(alpha)/2) Re A + (tan(alpha)/2s) U* Re A U``.

    ``U`` is the polar factor of ``Im A``; the block lemma is applied to
    ``[[tan(alpha) Re A, Im A], [Im A, tan(alpha) Re A]]``.
    """
    A, a, H, K = _sectorial_parts(A, alpha, s)
    U, absK = polar_decompose(K)
    t = a.tan_alpha
    rhs = s * t / 2 * H + t / (2 * s) * (U.conj().T @ H @ U)
    return _residual_report("e1", rhs, absK, s, [("U", U)])


def modulus_bound(A, alpha, s: float) -> WitnessReport:
    """``|A| <= (sec(alpha)/2)(s Re A + s^{-1} U* Re A U)`` with ``A = U|A|``."""
    A, a, H, _ = _sectorial_parts(A, alpha, s)
    U, absA = polar_decompose(A)
    rhs = a.sec_alpha / 2 * (s * H + (U.conj().T @ H @ U) / s)
    return _residual_report("e4.1", rhs, absA, s, [("U", U)])


def triangle_modulus_chain(A, alpha, s: float) -> bool:
    """Norm-level form of the triangle step for ``|A| = |Re A + i Im A|``:

    ``sigma(A)`` is weakly majorized by
    ``lambda(Re A) + (tan(alpha)/2) lambda(s Re A + s^{-1} U* Re A U)``
    with ``U`` the polar factor of ``Im A``.
    """
    A, a, H, K = _sectorial_parts(A, alpha, s)
    U, _ = polar_decompose(K)
    inner = s * H + (U.conj().T @ H @ U) / s
    bound = eigvalsh_desc(H) + a.tan_alpha / 2 * eigvalsh_desc(inner)
    sv = singular_values(A)
    return weak_majorize(sv, bound, RESIDUAL_TOL * max(1.0, float(np.sum(np.abs(bound)))))
