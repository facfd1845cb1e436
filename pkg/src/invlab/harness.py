"""Experiment configs, dispatch to the labs, and deterministic report files."""

from __future__ import annotations

import hashlib
import json
import math
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from pathlib import Path

import numpy as np

try:
    import tomllib
except ModuleNotFoundError:  # Python < 3.11
    import tomli as tomllib

from . import __version__
from .catalog import CATALOG, get_entry
from .fourier import uniform_inversion_experiment
from .functions import TestFunction
from .laplace import laplace_inversion_experiment
from .semigroup import SemigroupSystem, holder_constant_check, semigroup_inversion_experiment

SCHEMA_VERSION = 1
KINDS = ("fourier_uniform", "laplace_inversion", "cesaro", "semigroup_inversion")
ENGINES = ("radial", "direct", "decomposed")
FORMATS = ("csv", "json")
CSV_HEADER = "R,sup_error,grid_points,engine"


class ConfigError(ValueError):
    """Invalid experiment configuration; ``field`` names the offending key."""

    def __init__(self, field_name, message):
        super().__init__(f"{field_name}: {message}")
        self.field = field_name


@dataclass
class ExperimentConfig:
    kind: str
    function_id: str
    compact: list
    R_values: list
    threshold: float
    name: str = ""
    spacing: float = 0.01
    omega: float = 0.0
    engine: str = "radial"
    include_zero: bool | None = None
    mode: str = "plain"
    x: list = field(default_factory=lambda: [1.0, 0.0])
    alpha: float = 1.0
    favard_alphas: list = field(default_factory=list)
    seed: int = 0
    output: str = ""
    format: str = "json"

    def __post_init__(self):
        if not self.name:
            self.name = self.kind
        self.validate()

    def validate(self):
        if self.kind not in KINDS:
            raise ConfigError("kind", f"expected one of {KINDS}, got {self.kind!r}")
        if self.function_id not in CATALOG:
            raise ConfigError("function_id", f"unknown catalog id {self.function_id!r}")
        try:
            self.compact = [[float(lo), float(hi)] for lo, hi in self.compact]
        except (TypeError, ValueError):
            raise ConfigError("compact", "expected a list of [lo, hi] pairs") from None
        if not self.compact or any(not hi >= lo for lo, hi in self.compact):
            raise ConfigError("compact", "every interval needs lo <= hi")
        try:
            self.R_values = sorted(float(r) for r in self.R_values)
        except (TypeError, ValueError):
            raise ConfigError("R_values", "expected a list of numbers") from None
        if not self.R_values or any(not (r > 0 and math.isfinite(r)) for r in self.R_values):
            raise ConfigError("R_values", "values must be positive and finite")
        if len(set(self.R_values)) != len(self.R_values):
            raise ConfigError("R_values", "values must be distinct")
        for key in ("threshold", "spacing"):
            v = getattr(self, key)
            if not isinstance(v, (int, float)) or not (v > 0 and math.isfinite(v)):
                raise ConfigError(key, f"must be a positive number, got {v!r}")
        if not isinstance(self.omega, (int, float)) or not math.isfinite(self.omega):
            raise ConfigError("omega", f"must be a finite number, got {self.omega!r}")
        if self.engine not in ENGINES:
            raise ConfigError("engine", f"expected one of {ENGINES}, got {self.engine!r}")
        if self.mode not in ("plain", "with_zero"):
            raise ConfigError("mode", f"expected plain or with_zero, got {self.mode!r}")
        if not 0 < float(self.alpha) <= 1:
            raise ConfigError("alpha", "must lie in (0, 1]")
        if any(not 0 < float(a) < float(self.alpha) for a in self.favard_alphas):
            raise ConfigError("favard_alphas", "each value must lie in (0, alpha)")
        if not isinstance(self.seed, int) or self.seed < 0:
            raise ConfigError("seed", "must be a non-negative integer")
        if self.format not in FORMATS:
            raise ConfigError("format", f"expected one of {FORMATS}, got {self.format!r}")
        target = get_entry(self.function_id).function
        if self.kind == "semigroup_inversion":
            if not isinstance(target, SemigroupSystem):
                raise ConfigError("function_id", f"{self.function_id!r} is not a semigroup system")
            if len(self.x) != target.d:
                raise ConfigError("x", f"expected {target.d} components")
        else:
            if not isinstance(target, TestFunction):
                raise ConfigError("function_id", f"{self.function_id!r} is not a test function")
            if len(self.compact) != target.n:
                raise ConfigError("compact", f"expected {target.n} intervals for {self.function_id!r}")
            if self.kind != "fourier_uniform" and self.compact[0][0] < 0:
                raise ConfigError("compact", "time intervals must start at t >= 0")

    def echo(self):
        """Config as a plain dict, without output routing."""
        d = asdict(self)
        d.pop("output")
        d.pop("format")
        return d

    def digest(self):
        blob = json.dumps(self.echo(), sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(blob.encode()).hexdigest()[:16]


def config_from_dict(data):
    """Build a config from a parsed file: an [experiment] table plus an optional [output] table."""
    if "experiment" in data:
        exp = dict(data["experiment"])
        out = data.get("output", {})
    else:
        exp = dict(data)
        out = exp.pop("output") if isinstance(exp.get("output"), dict) else {}
    if "id" in exp and "function_id" not in exp:
        exp["function_id"] = exp.pop("id")
    if "path" in out:
        exp.setdefault("output", out["path"])
    if "format" in out:
        exp.setdefault("format", out["format"])
    known = set(ExperimentConfig.__dataclass_fields__)
    unknown = sorted(set(exp) - known)
    if unknown:
        raise ConfigError(unknown[0], "unknown field")
    missing = [k for k in ("kind", "function_id", "compact", "R_values", "threshold") if k not in exp]
    if missing:
        raise ConfigError(missing[0], "required field is missing")
    return ExperimentConfig(**exp)


def load_config(path):
    try:
        with open(path, "rb") as fh:
            data = tomllib.load(fh)
    except tomllib.TOMLDecodeError as exc:
        raise ConfigError("file", f"{path}: {exc}") from None
    return config_from_dict(data)


def catalog_config(entry_id, experiment=None, **overrides):
    """Default config of a catalog experiment (the first one if unnamed)."""
    entry = get_entry(entry_id)
    if not entry.experiments:
        raise ConfigError("experiment", f"{entry_id!r} declares no experiments")
    name = experiment or next(iter(entry.experiments))
    if name not in entry.experiments:
        raise ConfigError("experiment", f"{entry_id!r} has no experiment {name!r}")
    spec = dict(entry.experiments[name])
    spec.update(overrides)
    return ExperimentConfig(function_id=entry_id, name=name, **spec)


# ---------------------------------------------------------------------------
# Records
# ---------------------------------------------------------------------------


@dataclass
class ReportRecord:
    config: dict
    rows: list
    fitted_rate: float | None
    verdict: str
    expected: str | None
    version: str
    config_hash: str
    seed: int
    details: dict = field(default_factory=dict)
    runtime: float = field(default=0.0, compare=False)

    @property
    def matches_expectation(self):
        return self.expected is None or self.expected == self.verdict

    def to_dict(self):
        d = asdict(self)
        d.pop("runtime")  # wall-clock time would break byte-identical reruns
        d["schema_version"] = SCHEMA_VERSION
        return d

    @classmethod
    def from_dict(cls, data):
        data = dict(data)
        version = data.pop("schema_version", None)
        if version != SCHEMA_VERSION:
            raise ValueError(f"unsupported schema_version {version!r}")
        return cls(**data)


def classify(sup_errors, threshold):
    """pass: final error within threshold; contrast: never within it; fail otherwise."""
    if sup_errors[-1] <= threshold:
        return "pass"
    if min(sup_errors) >= threshold:
        return "contrast"
    return "fail"


def _experiment_report(cfg):
    target = get_entry(cfg.function_id).function
    extras = {}
    if cfg.kind == "fourier_uniform":
        rep = uniform_inversion_experiment(
            target, cfg.compact, cfg.R_values, engine=cfg.engine, spacing=cfg.spacing, threshold=cfg.threshold
        )
    elif cfg.kind in ("laplace_inversion", "cesaro"):
        rep = laplace_inversion_experiment(
            target,
            cfg.compact[0],
            cfg.omega,
            R_values=cfg.R_values,
            spacing=cfg.spacing,
            threshold=cfg.threshold,
            fejer=cfg.kind == "cesaro",
            include_zero=cfg.include_zero,
            experiment=cfg.kind,
        )
    else:
        rep = semigroup_inversion_experiment(
            target,
            cfg.x,
            cfg.alpha,
            cfg.omega,
            cfg.compact[0],
            R_values=cfg.R_values,
            mode=cfg.mode,
            spacing=cfg.spacing,
            threshold=cfg.threshold,
            favard_alphas=tuple(cfg.favard_alphas),
        )
        if target.spectral_abscissa < 0 and cfg.alpha > 0.5:
            hc = holder_constant_check(target, cfg.x, cfg.alpha, 0.5 * cfg.alpha, cfg.compact[0], seed=cfg.seed)
            extras["holder"] = asdict(hc)
    return rep, extras


def run_experiment(cfg):
    """Run one experiment and return its record (verdict from the declared threshold only)."""
    start = time.perf_counter()
    rep, extras = _experiment_report(cfg)
    entry = get_entry(cfg.function_id)
    rows = [
        {"R": float(R), "sup_error": float(e), "grid_points": int(rep.grid_points), "engine": rep.engine}
        for R, e in zip(rep.R_values, rep.sup_errors)
    ]
    details = {
        "argmax": rep.argmax,
        "grid_gaps": rep.grid_gaps,
        "grid_spacing": rep.grid_spacing,
        "compact_set": rep.compact_set,
        "threshold": rep.threshold,
        "extras": _plain(rep.extras),
    }
    details.update(_plain(extras))
    return ReportRecord(
        config=cfg.echo(),
        rows=rows,
        fitted_rate=rep.fitted_rate,
        verdict=classify(rep.sup_errors, cfg.threshold),
        expected=entry.expected_verdicts.get(cfg.name),
        version=__version__,
        config_hash=cfg.digest(),
        seed=cfg.seed,
        details=details,
        runtime=time.perf_counter() - start,
    )


def run_many(configs, jobs=1):
    """Run independent experiments, up to ``jobs`` at a time; results keep input order."""
    if jobs <= 1 or len(configs) <= 1:
        return [run_experiment(c) for c in configs]
    with ProcessPoolExecutor(max_workers=jobs) as pool:
        return list(pool.map(run_experiment, configs))


# ---------------------------------------------------------------------------
# Serialization
# ---------------------------------------------------------------------------


def _plain(obj):
    """Convert numpy containers and scalars to built-in Python types."""
    if isinstance(obj, dict):
        return {str(k): _plain(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_plain(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return _plain(obj.tolist())
    if isinstance(obj, np.bool_):
        return bool(obj)
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, np.floating):
        return float(obj)
    return obj


def format_float(x):
    x = float(x)
    if math.isnan(x):
        return "NaN"
    if math.isinf(x):
        return "Infinity" if x > 0 else "-Infinity"
    text = format(x, ".17g")
    # keep floats recognizable as floats when read back
    return text if any(c in text for c in ".en") else text + ".0"


def _dump(obj, indent, level=0):
    pad = " " * (indent * (level + 1))
    end = " " * (indent * level)
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = [f"{pad}{json.dumps(str(k))}: {_dump(obj[k], indent, level + 1)}" for k in sorted(obj)]
        return "{\n" + ",\n".join(items) + "\n" + end + "}"
    if isinstance(obj, (list, tuple)):
        if not obj:
            return "[]"
        return "[\n" + ",\n".join(pad + _dump(v, indent, level + 1) for v in obj) + "\n" + end + "]"
    if isinstance(obj, bool) or obj is None or isinstance(obj, (int, str)):
        return json.dumps(obj)
    if isinstance(obj, float):
        return format_float(obj)
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def dumps_json(obj, indent=2):
    """JSON with sorted keys and every float printed with 17 significant digits."""
    return _dump(_plain(obj), indent) + "\n"


def render_csv(record):
    lines = [CSV_HEADER]
    for row in record.rows:
        lines.append(f"{format_float(row['R'])},{format_float(row['sup_error'])},{row['grid_points']},{row['engine']}")
    return "\n".join(lines) + "\n"


def render(record, fmt="json"):
    if fmt == "json":
        return dumps_json(record.to_dict())
    if fmt == "csv":
        return render_csv(record)
    raise ValueError(f"unknown format {fmt!r}")


def emit_report(record, path, fmt="json"):
    """Write the record; the bytes depend only on the config and library version."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    text = render(record, fmt)
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(text)
    return path


def load_report(path):
    with open(path, encoding="utf-8") as fh:
        return ReportRecord.from_dict(json.load(fh))
