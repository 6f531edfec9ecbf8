"""Left- and right-hand sides of the Rotfel'd-type bounds for partitioned
sectorial matrices, with verification, comparison and optimization over the
free scaling parameter ``s``.

Every bound has the shape ``sum_i sum_terms c * ||f(a * |A_ii|)||``, so a
bound kind is stored as a list of ``(c, a)`` pairs. Block norms are taken on
``M_n`` by padding the block's spectrum with zeros.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass
from functools import cached_property

import numpy as np

from .errors import (
    AngleTooSmall,
    CounterexampleAlarm,
    InvalidExponent,
    InvalidInput,
    InvalidRange,
    InvalidScale,
    NotApplicable,
    NotInSector,
)
from .matrix import as_matrix, eigvalsh_desc, is_normal, is_psd, op_norm, singular_values
from .norms import ConcaveFunction, NormFamily, make_concave, norm_value
from .search import golden_section
from .sectorial import ANGLE_TOL, NotSectorial, SectorAngle, as_angle, minimal_angle

HOLD_TOL = 1e-8
S_FREE_KINDS = ("lee", "zpt", "zpc", "zhao_ni", "ylc", "fu_liu", "mao")
S_KINDS = ("main", "m2")
KIND_NAMES = S_FREE_KINDS + S_KINDS + ("power_cor",)


@dataclass(frozen=True)
class PartitionedMatrix:
    """``A`` split as ``[[A11, A12], [A21, A22]]`` with ``A11`` of size ``split``."""

    A: np.ndarray
    split: int

    def __post_init__(self):
        A = as_matrix(self.A)
        object.__setattr__(self, "A", A)
        if not 1 <= self.split < A.shape[0]:
            raise InvalidInput(f"split {self.split} must satisfy 1 <= split < {A.shape[0]}")

    @property
    def n(self) -> int:
        return self.A.shape[0]

    @property
    def blocks(self):
        k = self.split
        A = self.A
        return A[:k, :k], A[:k, k:], A[k:, :k], A[k:, k:]

    @property
    def diagonal_blocks(self):
        k = self.split
        return self.A[:k, :k], self.A[k:, k:]

    @cached_property
    def singular_values(self) -> np.ndarray:
        return singular_values(self.A)

    @cached_property
    def block_singular_values(self) -> tuple[np.ndarray, np.ndarray]:
        return tuple(singular_values(B) for B in self.diagonal_blocks)

    @cached_property
    def block_eigenvalues(self) -> tuple[np.ndarray, np.ndarray]:
        return tuple(np.maximum(eigvalsh_desc(B), 0.0) for B in self.diagonal_blocks)

    @cached_property
    def angle(self):
        return minimal_angle(self.A)

    @cached_property
    def is_psd(self) -> bool:
        A = self.A
        hermitian = op_norm(A - A.conj().T) <= 1e-13 * max(1.0, op_norm(A))
        return hermitian and is_psd(A).is_psd

    @cached_property
    def is_normal(self) -> bool:
        return is_normal(self.A)


@dataclass(frozen=True)
class BoundKind:
    """One of the bound formulas; ``param`` is ``s`` for main/m2 and ``p`` for power_cor."""

    name: str
    param: float | None = None

    def __post_init__(self):
        if self.name not in KIND_NAMES:
            raise InvalidInput(f"unknown bound kind {self.name!r}")
        if self.name in S_KINDS:
            if self.param is None or not (self.param > 0 and math.isfinite(self.param)):
                raise InvalidScale(f"{self.name} needs s > 0, got {self.param!r}")
        elif self.name == "power_cor":
            if self.param is None or not (0 < self.param <= 1):
                raise InvalidExponent(f"power_cor needs 0 < p <= 1, got {self.param!r}")
        elif self.param is not None:
            raise InvalidInput(f"{self.name} takes no parameter")

    @property
    def label(self) -> str:
        return self.name if self.param is None else f"{self.name}({self.param!r})"

    def __str__(self) -> str:
        return self.label


def main(s: float) -> BoundKind:
    return BoundKind("main", float(s))


def m2(s: float) -> BoundKind:
    return BoundKind("m2", float(s))


def power_cor(p: float) -> BoundKind:
    return BoundKind("power_cor", float(p))


def parse_kind(text: str, s: float | None = None) -> BoundKind:
    """``main``/``m2`` take ``s`` (default 1), ``power_cor:p`` takes an exponent."""
    name, _, arg = text.strip().partition(":")
    if name in S_KINDS:
        return BoundKind(name, float(arg) if arg else float(1.0 if s is None else s))
    if name == "power_cor":
        return BoundKind(name, float(arg) if arg else None)
    return BoundKind(name)


def bound_terms(kind: BoundKind, a: SectorAngle) -> list[tuple[float, float]]:
    """``(coefficient, scale)`` pairs of the per-block sum for ``kind``."""
    t, sec = a.tan_alpha, a.sec_alpha
    s = kind.param
    return {
        "lee": lambda: [(1.0, 1.0)],
        "zpt": lambda: [(1.0, 1.0), (2.0, t)],
        "zpc": lambda: [(2.0, math.sqrt(2) / 2)],
        "zhao_ni": lambda: [(1.0, 1.0), (1.0, t)],
        "ylc": lambda: [(1.0, sec)],
        "fu_liu": lambda: [(1.0, sec * sec)],
        "mao": lambda: [(2.0, sec / 2)],
        "main": lambda: [(1.0, 1.0), (1.0, s * t / 2), (1.0, t / (2 * s))],
        "m2": lambda: [(1.0, s * sec / 2), (1.0, sec / (2 * s))],
    }[kind.name]()


def _measure(values: np.ndarray, n: int, norm: NormFamily | None):
    """Norm of a padded spectrum; ``norm=None`` gives the whole Ky Fan profile."""
    padded = np.zeros(n)
    padded[: values.size] = values
    padded = np.sort(padded)[::-1]
    if norm is None:
        return np.cumsum(padded)
    return norm_value(padded, norm)


def _resolve_angle(P: PartitionedMatrix, alpha) -> SectorAngle:
    exact = P.angle
    if isinstance(exact, NotSectorial):
        raise NotInSector(exact.reason)
    if alpha is None:
        return exact
    a = as_angle(alpha)
    if a.alpha < exact.alpha - ANGLE_TOL:
        raise AngleTooSmall(f"alpha={a.alpha} below the sector angle {exact.alpha}")
    return a


def _check_applicable(P: PartitionedMatrix, kind: BoundKind, exact: SectorAngle) -> None:
    if kind.name == "lee" and not P.is_psd:
        raise NotApplicable("lee needs a positive semidefinite A")
    if kind.name == "zpc" and exact.alpha > math.pi / 4 + ANGLE_TOL:
        raise NotApplicable("zpc needs W(A) inside the sector of half-angle pi/4")
    if kind.name in ("zhao_ni", "ylc") and not P.is_normal:
        raise NotApplicable(f"{kind.name} needs a normal A")


def lhs_value(P: PartitionedMatrix, f: ConcaveFunction, norm: NormFamily | None):
    """``||f(|A|)||``; the eigenvalues of ``f(|A|)`` are ``f(sigma_j(A))``."""
    return _measure(f(P.singular_values), P.n, norm)


def rhs_value(P: PartitionedMatrix, alpha, f: ConcaveFunction, norm: NormFamily | None, kind: BoundKind):
    """Right-hand side of ``kind`` at sector angle ``alpha`` (``None`` uses the
    minimal angle of ``A``). ``norm=None`` returns the Ky Fan profile."""
    a = _resolve_angle(P, alpha)
    _check_applicable(P, kind, P.angle)
    n = P.n
    if kind.name == "power_cor":
        p = kind.param
        if f.family != "power" or f.params[0] != p:
            raise NotApplicable(f"power_cor({p}) is stated for f(t) = t^{p}, got {f.spec}")
        coef = 1.0 + 2.0 ** (1.0 - p) * a.tan_alpha**p
        return coef * sum(_measure(f(sv), n, norm) for sv in P.block_singular_values)
    spectra = P.block_eigenvalues if kind.name == "lee" else P.block_singular_values
    terms = bound_terms(kind, a)
    total = 0.0
    for sv in spectra:
        block = 0.0
        for coef, scale in terms:
            block = block + coef * _measure(f(scale * sv), n, norm)
        total = total + block
    return total


@dataclass(frozen=True)
class BoundReport:
    kind: str
    lhs: float
    rhs: float
    margin: float
    norm: str
    f: str
    s: float | None
    alpha: float
    holds: bool
    tolerance: float
    seed: int | None = None

    def to_dict(self) -> dict:
        return asdict(self)

    @classmethod
    def from_dict(cls, d: dict) -> "BoundReport":
        return cls(**d)


def hold_tolerance(rhs: float) -> float:
    return HOLD_TOL * max(1.0, abs(rhs))


def make_report(kind: BoundKind, lhs: float, rhs: float, norm: str, f: ConcaveFunction, alpha: float,
                seed: int | None = None) -> BoundReport:
    margin = rhs - lhs
    tol = hold_tolerance(rhs)
    s = kind.param if kind.name in S_KINDS else None
    return BoundReport(kind.label, lhs, rhs, margin, norm, f.spec, s, alpha, margin >= -tol, tol, seed)


def verify_bound(P, alpha, f, norm: NormFamily, kind: BoundKind, seed: int | None = None) -> BoundReport:
    a = _resolve_angle(P, alpha)
    lhs = float(lhs_value(P, f, norm))
    rhs = float(rhs_value(P, a, f, norm, kind))
    return make_report(kind, lhs, rhs, norm.label, f, a.alpha, seed)


def verify_kyfan(P, alpha, f, kind: BoundKind) -> tuple[np.ndarray, np.ndarray, bool]:
    """LHS and RHS Ky Fan profiles ``k = 1..n`` and whether every one holds."""
    lhs = lhs_value(P, f, None)
    rhs = rhs_value(P, alpha, f, None, kind)
    ok = bool(np.all(rhs - lhs >= -HOLD_TOL * np.maximum(1.0, np.abs(rhs))))
    return lhs, rhs, ok


@dataclass(frozen=True)
class SOptimum:
    s: float
    rhs: float
    flat: bool


def optimize_s(P, alpha, f, norm: NormFamily, kind: str, s_range=(1e-3, 1e3), grid: int = 64) -> SOptimum:
    """Minimize the RHS of ``main(s)`` or ``m2(s)`` over ``s``.

    A log-uniform grid scan picks the best grid point, then golden-section
    search on ``log s`` refines it between its neighbours until the bracket is
    below 1e-6. This finds a local minimizer, not a certified global one.
    """
    if kind not in S_KINDS:
        raise InvalidInput(f"optimize_s works on {S_KINDS}, not {kind!r}")
    lo, hi = s_range
    if not (0 < lo < hi and math.isfinite(hi)):
        raise InvalidRange(f"bad s range {s_range!r}")
    a = _resolve_angle(P, alpha)

    def value(log_s):
        return float(rhs_value(P, a, f, norm, BoundKind(kind, math.exp(log_s))))

    logs = np.linspace(math.log(lo), math.log(hi), grid)
    vals = np.array([value(x) for x in logs])
    top = float(np.max(np.abs(vals)))
    if float(np.max(vals) - np.min(vals)) <= 1e-12 * max(top, np.finfo(float).tiny):
        s0 = min(max(1.0, lo), hi)
        return SOptimum(s0, value(math.log(s0)), True)
    j = int(np.argmin(vals))
    left, right = logs[max(j - 1, 0)], logs[min(j + 1, grid - 1)]
    x, fx = golden_section(value, left, right, 1e-6)
    if vals[j] < fx:
        x, fx = logs[j], float(vals[j])
    return SOptimum(math.exp(x), fx, False)


def dominance_remark(P, alpha, f, norm: NormFamily | None, s: float) -> bool:
    """``rhs(main(s)) <= rhs(zpt)`` for ``s`` in ``[1, 2]``."""
    if not 1.0 <= s <= 2.0:
        raise InvalidScale(f"dominance holds for s in [1, 2], got {s}")
    ours = rhs_value(P, alpha, f, norm, main(s))
    theirs = rhs_value(P, alpha, f, norm, BoundKind("zpt"))
    return bool(np.all(ours <= theirs + 1e-10 * np.maximum(1.0, np.abs(theirs))))


def power_corollary_check(P, alpha, p: float, norm: NormFamily) -> BoundReport:
    """Power-function corollary, cross-checked against ``main(1)`` with
    ``f(t) = t^p``. Raises CounterexampleAlarm if the two RHS disagree."""
    if not 0 < p <= 1:
        raise InvalidExponent(f"need 0 < p <= 1, got {p}")
    f = make_concave("power", p)
    report = verify_bound(P, alpha, f, norm, power_cor(p))
    via_main = float(rhs_value(P, alpha, f, norm, main(1.0)))
    if abs(via_main - report.rhs) > 1e-10 * max(1.0, report.rhs):
        raise CounterexampleAlarm(f"power corollary rhs {report.rhs} != main(1) rhs {via_main}")
    return report
