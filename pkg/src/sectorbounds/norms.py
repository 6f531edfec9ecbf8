"""Unitarily invariant norms, weak majorization and concave scalar functions."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import InvalidSelector, NotConcave
from .matrix import singular_values

SCHATTEN_SPOT_P = (1.0, 1.5, 2.0, 3.0, math.inf)


@dataclass(frozen=True)
class NormFamily:
    """A unitarily invariant norm selected by its symmetric gauge function.

    ``kind`` is one of ``'ky_fan'`` (param k), ``'schatten'`` (param p >= 1,
    ``inf`` allowed), ``'operator'`` or ``'trace'``.
    """

    kind: str
    param: float | None = None

    def __post_init__(self):
        if self.kind == "ky_fan":
            if self.param is None or int(self.param) != self.param or self.param < 1:
                raise InvalidSelector(f"Ky Fan index must be a positive integer, got {self.param!r}")
        elif self.kind == "schatten":
            if self.param is None or not self.param >= 1:
                raise InvalidSelector(f"Schatten exponent must be >= 1, got {self.param!r}")
        elif self.kind not in ("operator", "trace"):
            raise InvalidSelector(f"unknown norm kind {self.kind!r}")

    @property
    def label(self) -> str:
        if self.kind == "ky_fan":
            return f"kyfan:{int(self.param)}"
        if self.kind == "schatten":
            return "schatten:inf" if math.isinf(self.param) else f"schatten:{self.param:g}"
        return "op" if self.kind == "operator" else "trace"

    def __str__(self) -> str:
        return self.label

    def __call__(self, sv) -> float:
        return norm_value(sv, self)


def ky_fan(k: int) -> NormFamily:
    return NormFamily("ky_fan", k)


def schatten(p: float) -> NormFamily:
    return NormFamily("schatten", float(p))


OPERATOR = NormFamily("operator")
TRACE = NormFamily("trace")


def norm_value(sv, family: NormFamily) -> float:
    """Evaluate a unitarily invariant norm from descending singular values."""
    sv = np.asarray(sv, dtype=float)
    if family.kind == "ky_fan":
        k = int(family.param)
        if k > sv.size:
            raise InvalidSelector(f"Ky Fan k={k} exceeds dimension {sv.size}")
        return float(np.sum(sv[:k]))
    if family.kind == "trace":
        return float(np.sum(sv))
    if family.kind == "operator":
        return float(sv[0]) if sv.size else 0.0
    p = family.param
    if math.isinf(p):
        return float(np.max(sv)) if sv.size else 0.0
    top = float(np.max(sv)) if sv.size else 0.0
    if top == 0.0:
        return 0.0
    return top * float(np.sum((sv / top) ** p)) ** (1.0 / p)


def ky_fan_profile(sv) -> np.ndarray:
    """All Ky Fan norms ``(||.||_(1), ..., ||.||_(n))`` at once."""
    return np.cumsum(np.sort(np.asarray(sv, dtype=float))[::-1])


def matrix_norm(A, family: NormFamily) -> float:
    return norm_value(singular_values(A), family)


def all_families(n: int) -> list[NormFamily]:
    """The Ky Fan certificate family plus the Schatten spot checks."""
    return [ky_fan(k) for k in range(1, n + 1)] + [schatten(p) for p in SCHATTEN_SPOT_P]


def parse_norm_spec(text: str, n: int) -> list[NormFamily]:
    """Parse ``kyfan:all``, ``kyfan:3``, ``schatten:2``, ``op`` or ``trace``."""
    text = text.strip()
    head, _, arg = text.partition(":")
    try:
        if head == "kyfan":
            if arg == "all":
                return [ky_fan(k) for k in range(1, n + 1)]
            return [ky_fan(int(arg))]
        if head == "schatten":
            return [schatten(math.inf if arg in ("inf", "infinity") else float(arg))]
    except ValueError as exc:
        raise InvalidSelector(f"bad norm spec {text!r}") from exc
    if text == "op":
        return [OPERATOR]
    if text == "trace":
        return [TRACE]
    raise InvalidSelector(f"bad norm spec {text!r}")


def weak_majorize(a, b, tol: float = 0.0) -> bool:
    """``a`` is weakly majorized by ``b``: every leading partial sum of the
    descending rearrangement of ``a`` is at most that of ``b`` (plus ``tol``)."""
    a = np.sort(np.asarray(a, dtype=float))[::-1]
    b = np.sort(np.asarray(b, dtype=float))[::-1]
    if a.shape != b.shape:
        raise ValueError("weak_majorize needs equal lengths")
    return bool(np.all(np.cumsum(a) <= np.cumsum(b) + tol))


def majorization_gaps(a, b) -> np.ndarray:
    """Partial-sum slack ``cumsum(b) - cumsum(a)`` (descending order)."""
    a = np.sort(np.asarray(a, dtype=float))[::-1]
    b = np.sort(np.asarray(b, dtype=float))[::-1]
    return np.cumsum(b) - np.cumsum(a)


def ui_dominance(A, B, tol: float = 1e-10) -> bool:
    """Certify ``||A|| <= ||B||`` for every unitarily invariant norm.

    The certificate is weak majorization of singular values (Fan dominance).
    When it holds, every Ky Fan and Schatten spot-check norm is verified
    explicitly as well; a mismatch there raises AssertionError.
    """
    sa, sb = singular_values(A), singular_values(B)
    if not weak_majorize(sa, sb, tol):
        return False
    n = sa.size
    for fam in all_families(n):
        lhs, rhs = norm_value(sa, fam), norm_value(sb, fam)
        assert lhs <= rhs + n * tol * max(1.0, rhs), (fam.label, lhs, rhs)
    return True


# --------------------------------------------------------------------------
# Concave functions
# --------------------------------------------------------------------------

FAMILIES = ("power", "log1p", "cap", "affine", "rational", "piecewise")


@dataclass(frozen=True)
class ConcaveFunction:
    """A nonnegative concave function on ``[0, inf)`` from a parametric family.

    Build instances through :func:`make_concave`, which runs the sampling
    checks and sets ``validated``.
    """

    family: str
    params: tuple
    validated: bool = field(default=False, compare=False)

    def __call__(self, t):
        t = np.asarray(t, dtype=float)
        fam, prm = self.family, self.params
        if fam == "power":
            return np.power(t, prm[0])
        if fam == "log1p":
            return np.log1p(prm[0] * t)
        if fam == "cap":
            return np.minimum(t, prm[0])
        if fam == "affine":
            return prm[0] + prm[1] * t
        if fam == "rational":
            return t / (t + prm[0])
        if fam == "piecewise":
            xs = np.array([p[0] for p in prm])
            ys = np.array([p[1] for p in prm])
            # np.interp extends with the end values on both sides
            return np.interp(t, xs, ys)
        raise InvalidSelector(f"unknown function family {fam!r}")

    @property
    def vanishes_at_zero(self) -> bool:
        return float(self(0.0)) == 0.0

    @property
    def spec(self) -> str:
        if self.family == "power":
            head = "pow"
        else:
            head = self.family
        if self.family == "piecewise":
            body = ";".join(f"{x!r},{y!r}" for x, y in self.params)
        else:
            body = ",".join(repr(float(p)) for p in self.params)
        return f"{head}:{body}"

    def __str__(self) -> str:
        return self.spec


def _check_params(family: str, params: tuple) -> None:
    def positive(x):
        return math.isfinite(x) and x > 0

    ok = {
        "power": lambda: len(params) == 1 and positive(params[0]),
        "log1p": lambda: len(params) == 1 and positive(params[0]),
        "cap": lambda: len(params) == 1 and positive(params[0]),
        "rational": lambda: len(params) == 1 and positive(params[0]),
        "affine": lambda: len(params) == 2 and all(math.isfinite(p) and p >= 0 for p in params),
        "piecewise": lambda: len(params) >= 1 and all(len(p) == 2 for p in params),
    }
    if family not in ok:
        raise InvalidSelector(f"unknown function family {family!r}")
    if not ok[family]():
        raise InvalidSelector(f"parameters {params!r} out of range for {family}")


def _check_piecewise(points: tuple) -> None:
    xs = [p[0] for p in points]
    ys = [p[1] for p in points]
    if xs[0] != 0.0:
        raise NotConcave("piecewise function must start at x = 0")
    if any(x1 <= x0 for x0, x1 in zip(xs, xs[1:])):
        raise NotConcave("piecewise breakpoints must be strictly increasing")
    if any(y < 0 for y in ys):
        raise NotConcave("piecewise values must be nonnegative")
    slopes = [(y1 - y0) / (x1 - x0) for x0, x1, y0, y1 in zip(xs, xs[1:], ys, ys[1:])]
    # constant extension past the last point appends a zero slope
    slopes.append(0.0)
    if any(s1 > s0 for s0, s1 in zip(slopes, slopes[1:])):
        raise NotConcave("piecewise slopes must be nonincreasing and end nonnegative")


def validate_concave(f: ConcaveFunction, n_pairs: int = 1000, upper: float = 1e6) -> None:
    """Sampling-based checks: f(0) >= 0, monotone on a grid, midpoint concavity.

    Raises NotConcave on the first failed check.
    """
    f0 = float(f(0.0))
    if not (math.isfinite(f0) and f0 >= 0):
        raise NotConcave(f"f(0) = {f0} is negative")
    grid = np.concatenate([[0.0], np.logspace(-12, math.log10(upper), 2001)])
    vals = f(grid)
    if not np.all(np.isfinite(vals)) or np.any(vals < 0):
        raise NotConcave("f takes negative or non-finite values on [0, upper]")
    step_tol = 1e-12 * np.maximum(1.0, np.abs(vals[1:]))
    if np.any(np.diff(vals) < -step_tol):
        raise NotConcave("f is not nondecreasing on the sample grid")
    rng = np.random.default_rng(0)
    x = 10 ** rng.uniform(-12, math.log10(upper), n_pairs)
    y = 10 ** rng.uniform(-12, math.log10(upper), n_pairs)
    x[: n_pairs // 10] = 0.0
    fm = f((x + y) / 2)
    avg = (f(x) + f(y)) / 2
    tol = 1e-12 * np.maximum(1.0, np.abs(fm))
    if np.any(fm < avg - tol):
        raise NotConcave("midpoint concavity fails on sampled pairs")


def make_concave(family: str, *params) -> ConcaveFunction:
    """Build and validate a concave function.

    >>> make_concave("power", 0.5)(4.0)
    array(2.)
    """
    if family == "piecewise":
        if len(params) == 1 and not isinstance(params[0][0], (int, float)):
            params = tuple(params[0])
        params = tuple((float(x), float(y)) for x, y in params)
    else:
        params = tuple(float(p) for p in params)
    _check_params(family, params)
    if family == "piecewise":
        _check_piecewise(params)
    f = ConcaveFunction(family, params)
    validate_concave(f)
    return ConcaveFunction(family, params, validated=True)


IDENTITY = make_concave("power", 1.0)

_SPEC_HEADS = {"pow": "power", "power": "power", "log1p": "log1p", "cap": "cap",
               "affine": "affine", "rational": "rational", "piecewise": "piecewise"}


def parse_function_spec(text: str) -> ConcaveFunction:
    """Parse ``pow:0.5``, ``log1p:1.0``, ``cap:2.0``, ``affine:1.0,0.5``,
    ``rational:1.0`` or ``piecewise:x1,y1;x2,y2;...``."""
    head, _, body = text.strip().partition(":")
    if head not in _SPEC_HEADS or not body:
        raise InvalidSelector(f"bad function spec {text!r}")
    family = _SPEC_HEADS[head]
    try:
        if family == "piecewise":
            pts = [tuple(float(v) for v in chunk.split(",")) for chunk in body.split(";") if chunk]
            if any(len(p) != 2 for p in pts):
                raise ValueError
            return make_concave("piecewise", pts)
        return make_concave(family, *(float(v) for v in body.split(",")))
    except ValueError as exc:
        if isinstance(exc, (NotConcave, InvalidSelector)):
            raise
        raise InvalidSelector(f"bad function spec {text!r}") from exc
