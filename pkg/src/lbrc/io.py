"""CSV ingestion, curve/report serialization, and experiment config parsing.

Numbers are serialized with shortest round-trip representation (repr), so a
written file parses back to bit-identical floats and identical inputs always
produce byte-identical files.  Curve files carry '#'-prefixed metadata lines
(estimator name, sample size, config hash) ahead of the header row.
"""

from __future__ import annotations

import csv
import hashlib
import os
from pathlib import Path

import numpy as np

from .data import Dataset
from .errors import ConfigError, InvalidDataError
from .stepfun import EvalGrid, StepFunction
from .truth import TruthModel, make_model

__all__ = [
    "parse_dataset",
    "write_dataset_csv",
    "write_curve_csv",
    "parse_rate_config",
    "write_rate_report_csv",
    "write_influence_csv",
    "config_hash",
]


def _fmt(x: float) -> str:
    return repr(float(x))


def config_hash(parts: dict) -> str:
    text = ";".join(f"{k}={parts[k]}" for k in sorted(parts))
    return hashlib.sha256(text.encode()).hexdigest()[:12]


def parse_dataset(path) -> Dataset:
    """Read observations from CSV with columns {a,v,delta} or {a,y,delta}.

    Rows violating the schema raise with the offending row number and column.
    """
    path = Path(path)
    if not path.exists():
        raise InvalidDataError(f"no such file: {path}")
    with path.open(newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise InvalidDataError(f"{path}: empty file, no observations") from None
        cols = [c.strip().lower() for c in header]
        if set(cols) == {"a", "v", "delta"}:
            uses_total = False
        elif set(cols) == {"a", "y", "delta"}:
            uses_total = True
        else:
            raise InvalidDataError(
                f"{path}: header must be a,v,delta or a,y,delta (got {','.join(cols)})"
            )
        pos = {name: cols.index(name) for name in cols}

        a_list, v_list, d_list = [], [], []
        for rownum, row in enumerate(reader, start=1):
            if not row or all(not cell.strip() for cell in row):
                continue
            if len(row) != 3:
                raise InvalidDataError(f"{path}: row {rownum}: expected 3 fields, got {len(row)}")

            def field(name):
                raw = row[pos[name]].strip()
                try:
                    return float(raw)
                except ValueError:
                    raise InvalidDataError(
                        f"{path}: row {rownum}: column '{name}': not a number: {raw!r}"
                    ) from None

            a = field("a")
            if not np.isfinite(a) or a < 0:
                raise InvalidDataError(f"{path}: row {rownum}: column 'a': must be >= 0, got {a}")
            dlt = field("delta")
            if dlt not in (0.0, 1.0):
                raise InvalidDataError(
                    f"{path}: row {rownum}: column 'delta': must be 0 or 1, got {dlt}"
                )
            if uses_total:
                y = field("y")
                if not np.isfinite(y) or y < a:
                    raise InvalidDataError(
                        f"{path}: row {rownum}: column 'y': must be >= a, got {y}"
                    )
                v = y - a
            else:
                v = field("v")
                if not np.isfinite(v) or v < 0:
                    raise InvalidDataError(
                        f"{path}: row {rownum}: column 'v': must be >= 0, got {v}"
                    )
            a_list.append(a)
            v_list.append(v)
            d_list.append(int(dlt))
    if not a_list:
        raise InvalidDataError(f"{path}: no observations")
    return Dataset(a_list, v_list, d_list)


def write_dataset_csv(path, d: Dataset) -> None:
    path = Path(path)
    with path.open("w", newline="", encoding="utf-8") as fh:
        fh.write("a,v,delta\n")
        for i in range(d.n):
            fh.write(f"{_fmt(d.a[i])},{_fmt(d.v[i])},{int(d.delta[i])}\n")


def write_curve_csv(
    path, step: StepFunction, name: str, n_obs: int, cfg_hash: str, extra_points=None
) -> None:
    """Write (t, value) rows at all jump points plus any requested points."""
    pts = step.jump_times
    if extra_points is not None:
        pts = np.union1d(pts, np.asarray(extra_points, dtype=float))
    path = Path(path)
    with path.open("w", newline="", encoding="utf-8") as fh:
        fh.write(f"# estimator={name}\n")
        fh.write(f"# n={n_obs}\n")
        fh.write(f"# config={cfg_hash}\n")
        fh.write("t,value\n")
        for t, val in zip(pts, step.at(pts)):
            fh.write(f"{_fmt(t)},{_fmt(val)}\n")


_CONFIG_KEYS = {
    "family",
    "rate",
    "shape",
    "scale",
    "censor_rate",
    "sizes",
    "reps",
    "which",
    "grid",
    "seed",
    "threads",
    "out",
}


def _parse_grid_spec(spec: str, model: TruthModel) -> EvalGrid:
    parts = spec.strip().split(":")
    if parts[0] == "quantiles" and len(parts) == 4:
        try:
            lo, hi, count = float(parts[1]), float(parts[2]), int(parts[3])
        except ValueError:
            raise ConfigError(f"grid: malformed quantile spec {spec!r}") from None
        if not (0 < lo < hi < 1) or count < 1:
            raise ConfigError(f"grid: need 0 < lo < hi < 1 and count >= 1 in {spec!r}")
        return model.default_grid(count=count, lo=lo, hi=hi)
    raise ConfigError(f"grid: expected quantiles:<lo>:<hi>:<count>, got {spec!r}")


def parse_rate_config(path) -> dict:
    """Parse a flat key=value experiment config; every error names its key."""
    path = Path(path)
    if not path.exists():
        raise ConfigError(f"no such config file: {path}")
    raw: dict[str, str] = {}
    for lineno, line in enumerate(path.read_text(encoding="utf-8").splitlines(), start=1):
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        if "=" not in line:
            raise ConfigError(f"{path}: line {lineno}: expected key=value, got {line!r}")
        key, _, value = line.partition("=")
        key = key.strip().lower()
        if key not in _CONFIG_KEYS:
            raise ConfigError(f"{path}: unknown config key: {key}")
        raw[key] = value.strip()

    for required in ("family", "sizes", "reps", "which", "seed"):
        if required not in raw:
            raise ConfigError(f"{path}: missing config key: {required}")

    censor = raw.get("censor_rate", "none")
    censor_rate = None if censor.lower() in ("none", "") else _to_float("censor_rate", censor)

    family = raw["family"].lower()
    params = {}
    if family == "exponential":
        params["rate"] = _to_float("rate", raw.get("rate", "1.0"))
        for bad in ("shape", "scale"):
            if bad in raw:
                raise ConfigError(f"{path}: key {bad} is not valid for family=exponential")
    elif family == "weibull":
        params["shape"] = _to_float("shape", raw.get("shape", "1.5"))
        params["scale"] = _to_float("scale", raw.get("scale", "1.0"))
        if "rate" in raw:
            raise ConfigError(f"{path}: key rate is not valid for family=weibull")
    else:
        raise ConfigError(f"{path}: family must be exponential or weibull, got {family!r}")
    model = make_model(family, censor_rate=censor_rate, **params)

    try:
        sizes = [int(tok) for tok in raw["sizes"].split(",") if tok.strip()]
    except ValueError:
        raise ConfigError(f"{path}: sizes: expected comma-separated integers") from None

    grid = _parse_grid_spec(raw.get("grid", "quantiles:0.10:0.90:25"), model)

    if "threads" in raw:
        threads = _to_int("threads", raw["threads"])
    else:
        threads = os.cpu_count() or 1

    return {
        "model": model,
        "sizes": sizes,
        "reps": _to_int("reps", raw["reps"]),
        "which": raw["which"],
        "grid": grid,
        "seed": _to_int("seed", raw["seed"]),
        "threads": threads,
        "out": raw.get("out"),
        "raw": raw,
    }


def _to_float(key: str, value: str) -> float:
    try:
        return float(value)
    except ValueError:
        raise ConfigError(f"config key {key}: not a number: {value!r}") from None


def _to_int(key: str, value: str) -> int:
    try:
        return int(value)
    except ValueError:
        raise ConfigError(f"config key {key}: not an integer: {value!r}") from None


def write_rate_report_csv(path, report, cfg_hash: str) -> None:
    path = Path(path)
    with path.open("w", newline="", encoding="utf-8") as fh:
        fh.write(f"# which={report.which}\n")
        fh.write(f"# config={cfg_hash}\n")
        fh.write(f"# seed={report.seed}\n")
        fh.write(f"# slope={_fmt(report.slope)}\n")
        fh.write(f"# target_exponent={_fmt(report.target_exponent)}\n")
        if report.convention is not None:
            fh.write(f"# convention={report.convention}\n")
            fh.write(f"# alt_slope={_fmt(report.alt_slope)}\n")
        for n, med in zip(report.sample_sizes, report.medians):
            fh.write(f"# median n={int(n)}: {_fmt(med)}\n")
        fh.write("n,rep,sup_residual\n")
        for si, n in enumerate(report.sample_sizes):
            for r in range(report.sup_residuals.shape[1]):
                fh.write(f"{int(n)},{r},{_fmt(report.sup_residuals[si, r])}\n")


def write_influence_csv(path, rows, n_obs: int, level: float, cfg_hash: str) -> None:
    """Rows of (t, cdf, se, ci_low, ci_high, d, v)."""
    path = Path(path)
    with path.open("w", newline="", encoding="utf-8") as fh:
        fh.write("# estimator=huang-qin\n")
        fh.write(f"# n={n_obs}\n")
        fh.write(f"# level={_fmt(level)}\n")
        fh.write(f"# config={cfg_hash}\n")
        fh.write("t,cdf,se,ci_low,ci_high,d,v\n")
        for row in rows:
            fh.write(",".join(_fmt(x) for x in row) + "\n")
