"""Randomized verification campaigns, harness self-tests and curve output."""

from __future__ import annotations

import csv
import json
import math
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from typing import Iterable, Iterator

import numpy as np

from . import bounds as bd
from .errors import AngleTooSmall, InvalidInput, NotInSector, SchemaError, SectorBoundsError
from .inequalities import im_part_bound, modulus_bound
from .io import fmt
from .matrix import RNG_ALGORITHM, cartesian_decompose, eigvalsh_desc, make_rng, mix_seed, random_matrix
from .norms import IDENTITY, TRACE, parse_function_spec, parse_norm_spec
from .sectorial import NotSectorial, as_angle

ACCEPTANCE_F_SPECS = ["pow:0.3", "pow:1", "log1p:1", "cap:1", "affine:0.5,1", "rational:2"]

INSTANCE_KINDS = ("sectorial", "normal_sectorial", "psd")


@dataclass(frozen=True)
class SweepConfig:
    master_seed: int
    trials: int = 1000
    n_range: tuple = (2, 12)
    alpha_range: tuple = (0.01, 1.48)
    s_values: tuple = (0.25, 0.5, 1.0, 2.0, 4.0)
    f_specs: tuple = tuple(ACCEPTANCE_F_SPECS)
    norm_specs: tuple = ("kyfan:all",)
    kinds: tuple = ("main", "m2")
    instance_kind: str = "sectorial"
    alpha_source: str = "computed"
    witnesses: bool = True
    parallelism: int = 1

    def __post_init__(self):
        if self.trials < 0:
            raise InvalidInput("trials must be >= 0")
        lo, hi = self.n_range
        if not (2 <= lo <= hi <= 64):
            raise InvalidInput(f"n_range {self.n_range} must satisfy 2 <= min <= max <= 64")
        a0, a1 = self.alpha_range
        if not (0 <= a0 <= a1 < math.pi / 2):
            raise InvalidInput(f"alpha_range {self.alpha_range} must lie in [0, pi/2)")
        if any(not s > 0 for s in self.s_values):
            raise InvalidInput("s_values must be positive")
        if self.instance_kind not in INSTANCE_KINDS:
            raise InvalidInput(f"instance_kind must be one of {INSTANCE_KINDS}")
        if self.alpha_source not in ("computed", "generated"):
            raise InvalidInput("alpha_source must be 'computed' or 'generated'")
        if self.parallelism < 1:
            raise InvalidInput("parallelism must be >= 1")
        for spec in self.f_specs:
            parse_function_spec(spec)
        for spec in self.norm_specs:
            parse_norm_spec(spec, 64)
        for k in self.kinds:
            bd.parse_kind(k)

    @classmethod
    def from_obj(cls, obj: dict) -> "SweepConfig":
        if not isinstance(obj, dict):
            raise SchemaError("config must be a JSON object")
        if "master_seed" not in obj:
            raise SchemaError("config needs 'master_seed'")
        known = set(cls.__dataclass_fields__)
        extra = set(obj) - known
        if extra:
            raise SchemaError(f"unknown config fields {sorted(extra)}")
        kw = {k: (tuple(v) if isinstance(v, list) else v) for k, v in obj.items()}
        seed = kw["master_seed"]
        if isinstance(seed, bool) or not isinstance(seed, int):
            raise SchemaError("master_seed must be an integer")
        return cls(**kw)

    def to_obj(self) -> dict:
        return {k: (list(v) if isinstance(v, tuple) else v) for k, v in asdict(self).items()}


@dataclass
class TrialRecord:
    index: int
    seed: int
    instance: dict
    angle: float | None
    reports: list = field(default_factory=list)
    witnesses: dict = field(default_factory=dict)
    skipped: list = field(default_factory=list)
    error: str | None = None
    wall_time: float | None = None

    def to_dict(self) -> dict:
        d = asdict(self)
        d["reports"] = [r.to_dict() for r in self.reports]
        return d

    @classmethod
    def from_dict(cls, d: dict) -> "TrialRecord":
        d = dict(d)
        d["reports"] = [bd.BoundReport.from_dict(r) for r in d["reports"]]
        return cls(**d)

    def to_json(self, timing: bool = False) -> str:
        d = self.to_dict()
        if not timing:
            d["wall_time"] = None
        return json.dumps(d)

    @property
    def violations(self) -> list:
        return [r for r in self.reports if not r.holds]


def _expand_kinds(config: SweepConfig) -> list[bd.BoundKind]:
    out = []
    for k in config.kinds:
        name = k.partition(":")[0]
        if name in bd.S_KINDS and ":" not in k:
            out.extend(bd.BoundKind(name, float(s)) for s in config.s_values)
        else:
            out.append(bd.parse_kind(k))
    return out


def draw_instance(config: SweepConfig, index: int) -> dict:
    """Per-trial instance descriptor from ``mix_seed(master_seed, index)``."""
    seed = mix_seed(config.master_seed, index)
    rng = make_rng(seed)
    n = int(rng.integers(config.n_range[0], config.n_range[1] + 1))
    alpha = float(rng.uniform(*config.alpha_range))
    split = int(rng.integers(1, n))
    matrix_seed = int(rng.integers(0, 2**63))
    if config.instance_kind == "psd":
        alpha = 0.0
    return {"kind": config.instance_kind, "n": n, "alpha": alpha, "split": split, "seed": matrix_seed}


def build_instance(desc: dict) -> np.ndarray:
    alpha = desc["alpha"] if desc["kind"] != "psd" else None
    return random_matrix(desc["kind"], desc["n"], desc["seed"], alpha)


def _kyfan_report(P, a, f, kind, seed):
    """One report for the whole Ky Fan family: the index with the smallest
    relative margin, and ``holds`` only if every index holds."""
    lhs, rhs, ok = bd.verify_kyfan(P, a, f, kind)
    rel = (rhs - lhs) / np.maximum(1.0, np.abs(rhs))
    k = int(np.argmin(rel))
    rep = bd.make_report(kind, float(lhs[k]), float(rhs[k]), f"kyfan:{k + 1}", f, a.alpha, seed)
    if rep.holds != ok:
        rep = bd.BoundReport(**{**rep.to_dict(), "holds": ok})
    return rep


def run_trial(config: SweepConfig, index: int) -> TrialRecord:
    t0 = time.perf_counter()
    desc = draw_instance(config, index)
    rec = TrialRecord(index, mix_seed(config.master_seed, index), desc, None)
    try:
        A = build_instance(desc)
        P = bd.PartitionedMatrix(A, desc["split"])
        exact = P.angle
        if isinstance(exact, NotSectorial):
            raise NotInSector(exact.reason)
        rec.angle = exact.alpha
        a = exact if config.alpha_source == "computed" else as_angle(max(desc["alpha"], exact.alpha))
        fs = [parse_function_spec(s) for s in config.f_specs]
        for f in fs:
            for kind in _expand_kinds(config):
                if kind.name == "power_cor" and (f.family != "power" or f.params[0] != kind.param):
                    continue
                for spec in config.norm_specs:
                    try:
                        if spec == "kyfan:all":
                            rec.reports.append(_kyfan_report(P, a, f, kind, rec.seed))
                        else:
                            for norm in parse_norm_spec(spec, P.n):
                                rec.reports.append(bd.verify_bound(P, a, f, norm, kind, rec.seed))
                    except bd.NotApplicable:
                        rec.skipped.append(f"{kind.label}/{f.spec}/{spec}")
        if config.witnesses:
            for s in config.s_values:
                rec.witnesses[f"e1@{s!r}"] = im_part_bound(A, a, s).residual_min_eig
                rec.witnesses[f"e4.1@{s!r}"] = modulus_bound(A, a, s).residual_min_eig
    except SectorBoundsError as exc:
        rec.error = f"{type(exc).__name__}: {exc}"
    rec.wall_time = time.perf_counter() - t0
    return rec


def _trial_job(args):
    config, index = args
    return run_trial(config, index)


def run_sweep(config: SweepConfig, workers: int | None = None) -> Iterator[TrialRecord]:
    """Yield exactly ``config.trials`` records in trial-index order."""
    workers = config.parallelism if workers is None else workers
    if workers <= 1 or config.trials <= 1:
        for i in range(config.trials):
            yield run_trial(config, i)
        return
    with ProcessPoolExecutor(max_workers=workers) as pool:
        chunk = max(1, config.trials // (4 * workers))
        yield from pool.map(_trial_job, ((config, i) for i in range(config.trials)), chunksize=chunk)


def summarize(records: Iterable[TrialRecord]) -> dict:
    """Footer: record count, violations, in-band errors and the minimum
    relative margin per bound kind."""
    count = violations = errors = 0
    min_margin: dict[str, float] = {}
    for rec in records:
        count += 1
        errors += rec.error is not None
        for r in rec.reports:
            violations += not r.holds
            name = r.kind.partition("(")[0]
            rel = r.margin / max(1.0, abs(r.rhs))
            min_margin[name] = min(min_margin.get(name, math.inf), rel)
    return {
        "trials": count,
        "violations": violations,
        "errors": errors,
        "min_relative_margin": dict(sorted(min_margin.items())),
        "rng": RNG_ALGORITHM,
        "seed_mixing": "splitmix64(master_seed ^ splitmix64(index))",
    }


def write_sweep(config: SweepConfig, stream, workers: int | None = None, timing: bool = False) -> dict:
    """Write one JSON line per record, then a ``{"footer": ...}`` line."""
    records = []
    for rec in run_sweep(config, workers):
        stream.write(rec.to_json(timing) + "\n")
        records.append(rec)
    footer = summarize(records)
    stream.write(json.dumps({"footer": footer}) + "\n")
    return footer


def read_sweep(lines: Iterable[str]) -> tuple[list[TrialRecord], dict | None]:
    records, footer = [], None
    for line in lines:
        if not line.strip():
            continue
        obj = json.loads(line)
        if "footer" in obj:
            footer = obj["footer"]
        else:
            records.append(TrialRecord.from_dict(obj))
    return records, footer


# --------------------------------------------------------------------------
# Harness sensitivity
# --------------------------------------------------------------------------

RHS_SHRINK = 0.9


def shrink_flagged(report: bd.BoundReport, factor: float = RHS_SHRINK) -> bool:
    """Would the harness flag the report if its RHS were scaled by ``factor``?"""
    rhs = factor * report.rhs
    return rhs - report.lhs < -bd.hold_tolerance(rhs)


def _tally(flags: list[bool], applicable: list[bool]) -> dict:
    app = sum(applicable)
    hit = sum(f for f, a in zip(flags, applicable) if a)
    return {
        "applicable": app,
        "flagged": hit,
        "survived": len(flags) - hit,
        "rate": hit / app if app else None,
    }


def _non_sectorial(A: np.ndarray) -> np.ndarray:
    """Shift ``A`` so that ``Re A`` acquires a negative eigenvalue."""
    H, _ = cartesian_decompose(A)
    lam = eigvalsh_desc(H)
    delta = 0.1 * (1.0 + abs(lam[0]))
    return A - (lam[-1] + delta) * np.eye(A.shape[0])


def hunt_sensitivity(config: SweepConfig) -> dict:
    """Inject three defects and report how often the harness catches them.

    (a) every RHS scaled by 0.9: on tight instances (psd ``A``, identity
        ``f``, trace norm, where ``lee`` and ``main(s)`` at ``alpha = 0`` are
        equalities) at least 99% must be flagged; on the campaign instances a
        report is applicable only when the shrink produces a true violation.
    (b) ``alpha`` under-reported as half the sector angle: must be rejected.
    (c) a non-sectorial matrix injected: must be rejected.
    """
    tight_flags, tight_app = [], []
    camp_flags, camp_app = [], []
    under_flags, under_app = [], []
    nonsec_flags = []
    kinds = _expand_kinds(config)
    fs = [parse_function_spec(s) for s in config.f_specs]
    for i in range(config.trials):
        desc = draw_instance(config, i)
        A = build_instance(desc)
        P = bd.PartitionedMatrix(A, desc["split"])

        psd_desc = {**desc, "kind": "psd", "alpha": 0.0}
        T = bd.PartitionedMatrix(build_instance(psd_desc), desc["split"])
        tight = [bd.verify_bound(T, 0.0, IDENTITY, TRACE, bd.BoundKind("lee"))]
        tight += [bd.verify_bound(T, 0.0, IDENTITY, TRACE, bd.main(s)) for s in config.s_values]
        for r in tight:
            tight_flags.append(shrink_flagged(r))
            tight_app.append(True)

        exact = P.angle
        if isinstance(exact, NotSectorial):
            continue
        for f in fs:
            for kind in kinds:
                try:
                    lhs, rhs, _ = bd.verify_kyfan(P, exact, f, kind)
                except bd.NotApplicable:
                    continue
                for lv, rv in zip(lhs, rhs):
                    r = bd.make_report(kind, float(lv), float(rv), "kyfan", f, exact.alpha)
                    camp_flags.append(shrink_flagged(r))
                    camp_app.append(RHS_SHRINK * r.rhs < r.lhs - bd.hold_tolerance(RHS_SHRINK * r.rhs))

        under_app.append(exact.alpha > 2 * bd.ANGLE_TOL)
        try:
            rep = bd.verify_bound(P, 0.5 * exact.alpha, fs[0], TRACE, kinds[0])
            under_flags.append(not rep.holds)
        except AngleTooSmall:
            under_flags.append(True)

        try:
            Q = bd.PartitionedMatrix(_non_sectorial(A), desc["split"])
            rep = bd.verify_bound(Q, None, fs[0], TRACE, kinds[0])
            nonsec_flags.append(not rep.holds)
        except NotInSector:
            nonsec_flags.append(True)

    report = {
        "rhs_shrink_tight": _tally(tight_flags, tight_app),
        "rhs_shrink_campaign": _tally(camp_flags, camp_app),
        "alpha_under_report": _tally(under_flags, under_app),
        "non_sectorial": _tally(nonsec_flags, [True] * len(nonsec_flags)),
    }

    def ok(entry, need):
        return entry["rate"] is None or entry["rate"] >= need

    report["passed"] = (
        ok(report["rhs_shrink_tight"], 0.99)
        and ok(report["rhs_shrink_campaign"], 0.99)
        and ok(report["alpha_under_report"], 0.99)
        and ok(report["non_sectorial"], 1.0)
    )
    return report


# --------------------------------------------------------------------------
# Curves
# --------------------------------------------------------------------------

CURVE_HEADER = ["s", "kind", "norm", "lhs", "rhs", "margin"]
S_SENTINEL = "—"


def curve_rows(P, alpha, f, norm, kinds: Iterable[str], s_grid) -> list[list[str]]:
    """Rows sorted by (kind, s); s-free kinds appear once with the sentinel s."""
    rows = []
    lhs = float(bd.lhs_value(P, f, norm))
    for name in sorted(set(kinds)):
        if name in bd.S_KINDS:
            for s in sorted(float(x) for x in s_grid):
                rhs = float(bd.rhs_value(P, alpha, f, norm, bd.BoundKind(name, s)))
                rows.append([fmt(s), name, norm.label, fmt(lhs), fmt(rhs), fmt(rhs - lhs)])
        else:
            rhs = float(bd.rhs_value(P, alpha, f, norm, bd.parse_kind(name)))
            rows.append([S_SENTINEL, name, norm.label, fmt(lhs), fmt(rhs), fmt(rhs - lhs)])
    return rows


def emit_curve(P, alpha, f, norm, kinds, s_grid, out_path) -> int:
    """Write the comparison curve CSV and return the number of data rows."""
    rows = curve_rows(P, alpha, f, norm, kinds, s_grid)
    with open(out_path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(CURVE_HEADER)
        w.writerows(rows)
    return len(rows)


def log_grid(lo: float, hi: float, count: int) -> np.ndarray:
    return np.exp(np.linspace(math.log(lo), math.log(hi), count))
