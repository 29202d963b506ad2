"""Seeded Monte Carlo experiments on G_P 0 for random lattice points.

Coefficients are in continuous units on the unit square, so lattice-unit
normalisations of the form c / (s n^alpha) reduce to c / n^alpha here.
Per-trial seeds are derived from (base_seed, s, n, index) with a fixed
64-bit BLAKE2b hash; points are drawn with numpy's PCG64 generator.
"""

from __future__ import annotations

import csv
import hashlib
import io
import json
import math
import struct
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field

import numpy as np
from gmpy2 import mpq

from .core.arrangement import canonical_coefficient
from .core.series import RPoint, degree as series_degree
from .curve import genus as series_genus, is_generic_tree
from .errors import InputError, TropsandError
from .gp import solve_gp

RNG_NAME = "numpy.PCG64"
SEED_MIX = "blake2b-64(base_seed,s,n,index)"
CSV_SCHEMA = "trials/1"
AGGREGATE_SCHEMA = "aggregate/1"
ALPHAS = (0.45, 0.5, 0.55)
COEFFS = ((0, 0), (0, 1), (1, 0), (1, 1))


@dataclass(frozen=True)
class TrialConfig:
    s: int
    n: int
    seed: int = 0
    trials: int = 1

    def __post_init__(self):
        if self.s < 4:
            raise InputError("s must be >= 4")
        if not 1 <= self.n <= (self.s - 1) ** 2:
            raise InputError(f"n must be in [1, {(self.s - 1) ** 2}] for s={self.s}")
        if self.trials < 1:
            raise InputError("trials must be >= 1")


def trial_seed(base_seed: int, s: int, n: int, index: int) -> int:
    data = struct.pack("<qqqq", base_seed, s, n, index)
    return int.from_bytes(hashlib.blake2b(data, digest_size=8).digest(), "little")


def sample_points(s: int, n: int, seed: int) -> list[RPoint]:
    """n distinct points (x/s, y/s) with x, y uniform on 1..s-1, without replacement."""
    if s < 2:
        raise InputError("s must be >= 2")
    if n < 0 or n > (s - 1) ** 2:
        raise InputError(f"cannot draw {n} distinct interior points at s={s}")
    rng = np.random.Generator(np.random.PCG64(seed))
    cells = rng.choice((s - 1) ** 2, size=n, replace=False)
    return [RPoint(mpq(int(k) // (s - 1) + 1, s), mpq(int(k) % (s - 1) + 1, s)) for k in cells]


@dataclass
class TrialRecord:
    s: int
    n: int
    seed: int
    degree: int = 0
    genus: int = 0
    c00: mpq = mpq(0)
    c01: mpq = mpq(0)
    c10: mpq = mpq(0)
    c11: mpq = mpq(0)
    shrinks: int = 0
    ms: float = 0.0
    generic_tree: bool = True
    extended: dict = field(default_factory=dict)
    error: str = ""

    def coefficient(self, i: int, j: int):
        if (i, j) in COEFFS:
            return getattr(self, f"c{i}{j}")
        return self.extended[(i, j)]


def run_trial(s: int, n: int, seed: int, *, extended: bool = False, timing: bool = False,
              max_passes: int | None = None) -> TrialRecord:
    """Sample P, solve G_P 0 and record its invariants.

    Solver failures propagate with the seed attached to the message.
    """
    start = time.perf_counter()
    points = sample_points(s, n, seed)
    try:
        f, trace = solve_gp(points, max_passes=max_passes)
    except TropsandError as exc:
        raise type(exc)(f"trial s={s} n={n} seed={seed}: {exc}") from exc
    rec = TrialRecord(s, n, seed, series_degree(f), series_genus(f), shrinks=trace.total_shrinks)
    for i, j in COEFFS:
        setattr(rec, f"c{i}{j}", canonical_coefficient(f, i, j))
    rec.generic_tree = is_generic_tree(f, points)
    if extended:
        rec.extended = {(i, j): canonical_coefficient(f, i, j)
                        for i in range(-2, 3) for j in range(-2, 3)}
    if timing:
        rec.ms = round((time.perf_counter() - start) * 1000.0, 3)
    return rec


def _run_safe(args):
    s, n, seed, extended, timing, max_passes = args
    try:
        return run_trial(s, n, seed, extended=extended, timing=timing, max_passes=max_passes)
    except TropsandError as exc:
        return TrialRecord(s, n, seed, error=f"{type(exc).__name__}: {exc}")


def _mean(values):
    return sum(values, mpq(0)) / len(values)


def _sd(values) -> float:
    """Sample standard deviation; 0 for a single value."""
    if len(values) < 2:
        return 0.0
    m = _mean(values)
    var = sum(((v - m) ** 2 for v in values), mpq(0)) / (len(values) - 1)
    return math.sqrt(float(var))


@dataclass
class AggregateStats:
    s: int
    n: int
    trials: int
    failures: int
    degree_min: int
    degree_mean: float
    degree_sd: float
    genus_mean: float
    genus_rate: float
    tree_rate: float
    coefficient_mean: dict
    coefficient_mean_exact: dict
    coefficient_sd: dict
    normalized: dict
    sd_c00_over_n: float
    residual: float
    residual_exact: str
    residual_over_sqrt_n: float

    def to_dict(self) -> dict:
        return asdict(self)


def aggregate(records, s: int, n: int) -> AggregateStats:
    """Exact rational means, reduced in record order, then floats for the normalisations."""
    ok = [r for r in records if not r.error]
    if not ok:
        raise InputError(f"no successful records for s={s} n={n}")
    degrees = [mpq(r.degree) for r in ok]
    mean_deg = _mean(degrees)
    min_deg = min(r.degree for r in ok)
    means = {f"c{i}{j}": _mean([getattr(r, f"c{i}{j}") for r in ok]) for i, j in COEFFS}
    sds = {f"c{i}{j}": _sd([getattr(r, f"c{i}{j}") for r in ok]) for i, j in COEFFS}
    resid = means["c00"] + means["c11"] - means["c10"] - means["c01"]
    norm = {}
    for alpha in ALPHAS:
        scale = n ** alpha
        norm[str(alpha)] = {
            "mean_degree": float(mean_deg) / scale,
            "min_degree": min_deg / scale,
            **{f"mean_{k}": float(v) / scale for k, v in means.items()},
        }
    return AggregateStats(
        s=s, n=n, trials=len(ok), failures=len(records) - len(ok),
        degree_min=min_deg,
        degree_mean=float(mean_deg),
        degree_sd=_sd(degrees),
        genus_mean=float(_mean([mpq(r.genus) for r in ok])),
        genus_rate=sum(1 for r in ok if r.genus == n) / len(ok),
        tree_rate=sum(1 for r in ok if r.generic_tree) / len(ok),
        coefficient_mean={k: float(v) for k, v in means.items()},
        coefficient_mean_exact={k: f"{v.numerator}/{v.denominator}" for k, v in means.items()},
        coefficient_sd=sds,
        normalized=norm,
        sd_c00_over_n=sds["c00"] / n,
        residual=float(resid),
        residual_exact=f"{resid.numerator}/{resid.denominator}",
        residual_over_sqrt_n=float(resid) / math.sqrt(n),
    )


def flattest_alpha(stats: list[AggregateStats]) -> dict:
    """For each s, the exponent alpha whose normalised mean degree varies least across n."""
    out = {}
    for s in sorted({a.s for a in stats}):
        rows = [a for a in stats if a.s == s]
        if len(rows) < 2:
            continue
        spread = {}
        for alpha in ALPHAS:
            vals = [a.normalized[str(alpha)]["mean_degree"] for a in rows]
            spread[str(alpha)] = max(vals) / min(vals) if min(vals) > 0 else float("inf")
        out[str(s)] = {"spread": spread, "flattest": min(spread, key=spread.get)}
    return out


def sweep(grid, trials: int, base_seed: int = 0, jobs: int = 1, *, extended: bool = False,
          timing: bool = False, max_passes: int | None = None):
    """Run every (s, n, trial) combination; returns (records, aggregates).

    Results are ordered by (s, n, index) and do not depend on ``jobs``.
    """
    tasks = []
    for s, n in grid:
        TrialConfig(s, n, base_seed, trials)
        for index in range(trials):
            tasks.append((s, n, trial_seed(base_seed, s, n, index), extended, timing, max_passes))
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            records = list(pool.map(_run_safe, tasks, chunksize=max(1, len(tasks) // (4 * jobs))))
    else:
        records = [_run_safe(t) for t in tasks]
    aggregates = []
    for s, n in grid:
        group = [r for r in records if r.s == s and r.n == n]
        if any(not r.error for r in group):
            aggregates.append(aggregate(group, s, n))
    return records, aggregates


CSV_COLUMNS = ["s", "n", "seed", "degree", "genus", "c00", "c01", "c10", "c11", "shrinks", "ms",
               "c00_exact", "c01_exact", "c10_exact", "c11_exact", "generic_tree", "error"]


def records_to_csv(records) -> str:
    buf = io.StringIO()
    buf.write(f"# schema={CSV_SCHEMA} rng={RNG_NAME} seed_mix={SEED_MIX} units=unit-square\n")
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CSV_COLUMNS)
    for r in records:
        coeffs = [r.c00, r.c01, r.c10, r.c11]
        w.writerow([r.s, r.n, r.seed, r.degree, r.genus,
                    *(f"{float(c):.12g}" for c in coeffs), r.shrinks, r.ms,
                    *(f"{c.numerator}/{c.denominator}" for c in coeffs),
                    int(r.generic_tree), r.error])
    return buf.getvalue()


def aggregates_to_json(aggregates, extra: dict | None = None) -> str:
    doc = {
        "schema": AGGREGATE_SCHEMA,
        "rng": RNG_NAME,
        "seed_mix": SEED_MIX,
        "units": "unit-square (lattice-unit c/(s n^a) equals c/n^a here)",
        "cells": [a.to_dict() for a in aggregates],
        "flattest_alpha": flattest_alpha(aggregates),
    }
    if extra:
        doc.update(extra)
    return json.dumps(doc, indent=2, sort_keys=True)


def discussion_diagnostics(records) -> dict:
    """Residuals of mean(c_ij) + mean(c_i+1,j+1) - mean(c_i+1,j) - mean(c_i,j+1)
    for (i, j) in {-1, 0, 1}^2, and the ratio c_00 / degree.

    Needs records carrying ``extended`` coefficients for |i|, |j| <= 2.
    Purely descriptive.
    """
    ok = [r for r in records if not r.error]
    if not ok:
        raise InputError("no successful records")
    residuals = {}
    for i in (-1, 0, 1):
        for j in (-1, 0, 1):
            m = {d: _mean([r.coefficient(i + d[0], j + d[1]) for r in ok])
                 for d in ((0, 0), (1, 1), (1, 0), (0, 1))}
            res = m[(0, 0)] + m[(1, 1)] - m[(1, 0)] - m[(0, 1)]
            residuals[f"{i},{j}"] = {"exact": f"{res.numerator}/{res.denominator}",
                                     "value": float(res)}
    ratios = [r.c00 / r.degree for r in ok if r.degree > 0]
    mean_d = float(_mean([mpq(r.degree) for r in ok]))
    report = {
        "schema": "discussion/1",
        "records": len(ok),
        "identity_residuals": residuals,
        "c00_over_degree_mean": float(_mean(ratios)) if ratios else None,
        "c00_over_degree_sd": _sd(ratios) if ratios else None,
        "mean_degree": mean_d,
        # grid heuristic as printed, (d+1)d/(2d), and its simplification (d+1)/2
        "grid_heuristic_as_printed": (mean_d + 1) * mean_d / (2 * mean_d) if mean_d else None,
        "grid_heuristic_simplified": (mean_d + 1) / 2,
    }
    return report


def parse_config(text: str) -> dict:
    """``key = value`` lines; lists are comma separated; ``#`` starts a comment."""
    known = {"s": "list", "n": "list", "trials": "int", "seed": "int", "jobs": "int",
             "max_passes": "int", "extended": "bool", "timing": "bool"}
    out = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise InputError(f"config line {lineno}: expected 'key = value'")
        key, value = (part.strip() for part in line.split("=", 1))
        if key not in known:
            raise InputError(f"config line {lineno}: unknown key {key!r}")
        value = value.strip("[]").strip()
        try:
            if known[key] == "list":
                out[key] = [int(v) for v in value.split(",") if v.strip()]
            elif known[key] == "int":
                out[key] = int(value)
            else:
                if value.lower() not in ("true", "false"):
                    raise ValueError(value)
                out[key] = value.lower() == "true"
        except ValueError as exc:
            raise InputError(f"config line {lineno}: bad value for {key}: {value!r}") from exc
    for key in ("s", "n", "trials"):
        if key not in out:
            raise InputError(f"config is missing {key!r}")
    return out
