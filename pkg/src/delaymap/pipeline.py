"""The end-to-end run: load, pick T, pick n, embed, measure S(r), fit D_I.

Each stage writes its artifact as soon as it completes, so a run that
stops early still leaves every diagnostic computed up to that point on
disk.  Three outcomes are results, not errors, and are carried in the
report's status instead of raising: the delay falling back to the global
minimum, no dimension reaching the false-neighbor threshold, and too few
scaling points for the dimension fit.  Anything else propagates as an
exception tagged with the stage name.
"""

from __future__ import annotations

import json
import os
from dataclasses import asdict, dataclass
from datetime import datetime, timezone
from typing import TextIO

import numpy as np

from ._version import __version__
from .boxdim import DimensionEstimate, EntropyScaling, entropy_scaling, information_dimension, partition_boxes, shannon_entropy
from .embedding import EmbeddingParams, PointCloud, delay_embed
from .errors import ScalingFitError
from .mutual import MICurve, ami_curve, first_local_minimum
from .neighbors import FnnCurve, FnnParams, embedding_dimension
from .series import TimeSeries, load_csv, stats

__all__ = [
    "PipelineConfig",
    "PipelineReport",
    "run_pipeline",
    "parse_key_value_config",
    "coerce_config_value",
    "STATUS_OK",
    "STATUS_NO_DIMENSION",
    "STATUS_INSUFFICIENT_SCALING",
]

STATUS_OK = "ok"
STATUS_NO_DIMENSION = "no_dimension_found"
STATUS_INSUFFICIENT_SCALING = "insufficient_scaling_points"

REPORT_SCHEMA_VERSION = 1


@dataclass(frozen=True)
class PipelineConfig:
    """Every knob that can influence a number in the report.

    fixed_delay / fixed_dimension skip the corresponding estimator stage
    entirely (no curve artifact is produced for a skipped stage).  The
    r ladder is specified as divisors of the data range: edges run
    geometrically from range/r_coarse_div down to range/r_fine_div in
    ladder_steps steps, and the headline entropy is read at
    range/r_ref_div.
    """

    input_path: str
    column: int | str = 0
    skip_header: bool = False
    missing_policy: str = "forward_fill"
    j_bins: int = 16
    t_max: int | None = None
    m_max: int = 20
    r_tol: float = 10.0
    theiler_window: int | None = None
    fnn_threshold: float = 0.01
    ladder_steps: int = 16
    r_coarse_div: float = 4.0
    r_fine_div: float = 512.0
    r_ref_div: float = 256.0
    fit_r_lo: float | None = None
    fit_r_hi: float | None = None
    fixed_delay: int | None = None
    fixed_dimension: int | None = None
    output_dir: str = "."
    timestamp: bool = False

    def __post_init__(self):
        if self.ladder_steps < 2:
            raise ValueError("ladder_steps must be >= 2")
        if not 0 < self.r_coarse_div < self.r_fine_div:
            raise ValueError("need 0 < r_coarse_div < r_fine_div (coarse to fine)")
        if self.r_ref_div <= 0:
            raise ValueError("r_ref_div must be positive")
        if (self.fit_r_lo is None) != (self.fit_r_hi is None):
            raise ValueError("fit_r_lo and fit_r_hi must be given together")
        if self.fixed_delay is not None and self.fixed_delay < 1:
            raise ValueError("fixed_delay must be >= 1")
        if self.fixed_dimension is not None and self.fixed_dimension < 1:
            raise ValueError("fixed_dimension must be >= 1")


@dataclass
class PipelineReport:
    status: str
    config: PipelineConfig
    n_samples: int
    series_label: str
    selected_delay: int | None
    delay_fallback_used: bool
    delay_source: str
    selected_dimension: int | None
    dimension_found: bool
    dimension_source: str
    entropy_bits: float | None
    r_ref: float | None
    estimate: DimensionEstimate | None
    artifacts: dict[str, str]
    timestamp: str | None

    def to_json(self) -> str:
        est = None
        if self.estimate is not None:
            est = {
                "D_I": float(self.estimate.d_i),
                "intercept": float(self.estimate.intercept),
                "r_squared": float(self.estimate.r_squared),
                "fit_range": [float(v) for v in self.estimate.fit_range],
                "points_used": int(self.estimate.points_used),
            }
        doc = {
            "schema_version": REPORT_SCHEMA_VERSION,
            "toolkit_version": __version__,
            "status": self.status,
            "input": {
                "path": self.config.input_path,
                "column": self.config.column,
                "n_samples": self.n_samples,
                "label": self.series_label,
            },
            "config": _jsonable(asdict(self.config)),
            "delay": {
                "selected": self.selected_delay,
                "fallback_used": self.delay_fallback_used,
                "source": self.delay_source,
            },
            "dimension": {
                "selected": self.selected_dimension,
                "found": self.dimension_found,
                "source": self.dimension_source,
            },
            "entropy": {
                "r_ref": self.r_ref,
                "bits": self.entropy_bits,
            },
            "information_dimension": est,
            "artifacts": self.artifacts,
        }
        if self.timestamp is not None:
            doc["generated_at"] = self.timestamp
        return json.dumps(doc, sort_keys=True, indent=2) + "\n"


def _jsonable(value):
    """Recursively turn numpy scalars into plain Python numbers."""
    if isinstance(value, dict):
        return {k: _jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_jsonable(v) for v in value]
    if isinstance(value, np.integer):
        return int(value)
    if isinstance(value, np.floating):
        return float(value)
    return value


def _fmt(v) -> str:
    """CSV cell: shortest round-trip decimal for floats, plain for ints."""
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    return repr(float(v))


def write_mi_csv(out: TextIO, curve: MICurve, j_bins: int, n_samples: int) -> None:
    out.write(f"# delaymap ami: j_bins={j_bins} t_max={curve.lags[-1]} n_samples={n_samples}\n")
    out.write("lag,bits\n")
    for lag, bits in curve.entries():
        out.write(f"{lag},{_fmt(bits)}\n")


def write_fnn_csv(out: TextIO, curve: FnnCurve, delay: int, params: FnnParams, w: int) -> None:
    out.write(
        f"# delaymap fnn: delay={delay} r_tol={_fmt(params.r_tol)} "
        f"theiler_window={w} threshold={_fmt(params.fnn_threshold)}\n"
    )
    out.write("m,fraction,tested,skipped\n")
    for e in curve.entries:
        out.write(f"{e.m},{_fmt(e.fraction)},{e.tested_points},{e.skipped_points}\n")


def write_cloud_csv(out: TextIO, cloud: PointCloud, axes: tuple[int, ...]) -> None:
    p = cloud.params
    out.write(
        f"# delaymap embed: delay={p.delay} dimension={p.dimension} "
        f"count={len(cloud)} axes={','.join(str(a) for a in axes)}\n"
    )
    block = cloud.points[:, list(axes)]
    for row in block:
        out.write(",".join(_fmt(v) for v in row) + "\n")


def write_scaling_csv(out: TextIO, scaling: EntropyScaling, dimension: int) -> None:
    out.write(f"# delaymap entropy: dimension={dimension} total={scaling.total}\n")
    out.write("r,log2_inv_r,S_bits\n")
    for r, s in scaling.entries:
        out.write(f"{_fmt(r)},{_fmt(-np.log2(r))},{_fmt(s)}\n")


def _write_artifact(directory: str, name: str, writer) -> str:
    path = os.path.join(directory, name)
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer(fh)
    return name


class _Stage:
    """Context manager that tags escaping exceptions with the stage name."""

    def __init__(self, name: str):
        self.name = name

    def __enter__(self):
        return self

    def __exit__(self, exc_type, exc, tb):
        if exc is not None and not hasattr(exc, "stage"):
            try:
                exc.stage = self.name
            except AttributeError:
                pass
        return False


def run_pipeline(config: PipelineConfig) -> PipelineReport:
    """Run every stage the config asks for and write all artifacts.

    Returns a report whose ``status`` distinguishes a clean run from the
    two early stops (no embedding dimension found, not enough scaling
    points).  Load failures and unexpected stage errors raise; the
    exception carries a ``stage`` attribute naming where it happened.
    """
    os.makedirs(config.output_dir, exist_ok=True)
    artifacts: dict[str, str] = {}
    stamp = (
        datetime.now(timezone.utc).isoformat(timespec="seconds")
        if config.timestamp
        else None
    )

    with _Stage("load"):
        series = load_csv(
            config.input_path,
            column=config.column,
            skip_header=config.skip_header,
            missing_policy=config.missing_policy,
        )
        series_stats = stats(series)

    delay_fallback = False
    if config.fixed_delay is not None:
        delay = config.fixed_delay
        delay_source = "fixed"
    else:
        with _Stage("delay"):
            curve = ami_curve(series, t_max=config.t_max, bins=config.j_bins)
            selection = first_local_minimum(curve)
            delay = selection.lag
            delay_fallback = selection.fallback_used
            artifacts["mi_curve"] = _write_artifact(
                config.output_dir,
                "mi_curve.csv",
                lambda fh: write_mi_csv(fh, curve, config.j_bins, len(series)),
            )
        delay_source = "ami"

    def report(status, dimension=None, dim_found=False, dim_source="fnn",
               entropy_bits=None, r_ref=None, estimate=None):
        return PipelineReport(
            status=status,
            config=config,
            n_samples=len(series),
            series_label=series.label,
            selected_delay=delay,
            delay_fallback_used=delay_fallback,
            delay_source=delay_source,
            selected_dimension=dimension,
            dimension_found=dim_found,
            dimension_source=dim_source,
            entropy_bits=entropy_bits,
            r_ref=r_ref,
            estimate=estimate,
            artifacts=artifacts,
            timestamp=stamp,
        )

    def finish(rep: PipelineReport) -> PipelineReport:
        artifacts["report"] = "report.json"
        path = os.path.join(config.output_dir, "report.json")
        with open(path, "w", encoding="utf-8", newline="") as fh:
            fh.write(rep.to_json())
        return rep

    theiler = delay if config.theiler_window is None else config.theiler_window
    fnn_params = FnnParams(
        r_tol=config.r_tol,
        theiler_window=theiler,
        fnn_threshold=config.fnn_threshold,
        m_max=config.m_max,
    )

    if config.fixed_dimension is not None:
        dimension = config.fixed_dimension
        dim_source = "fixed"
    else:
        with _Stage("dimension"):
            selection = embedding_dimension(series, delay, fnn_params)
            artifacts["fnn_curve"] = _write_artifact(
                config.output_dir,
                "fnn_curve.csv",
                lambda fh: write_fnn_csv(fh, selection.curve, delay, fnn_params, theiler),
            )
            if not selection.found:
                return finish(report(STATUS_NO_DIMENSION))
            dimension = selection.m_selected
        dim_source = "fnn"

    with _Stage("embed"):
        cloud = delay_embed(series, EmbeddingParams(delay, dimension))
        axes = tuple(range(min(dimension, 3)))
        artifacts["attractor"] = _write_artifact(
            config.output_dir,
            "attractor.csv",
            lambda fh: write_cloud_csv(fh, cloud, axes),
        )

    with _Stage("entropy"):
        vr = series_stats.value_range
        ladder = np.geomspace(
            vr / config.r_coarse_div, vr / config.r_fine_div, config.ladder_steps
        )
        scaling = entropy_scaling(cloud, ladder)
        artifacts["entropy_scaling"] = _write_artifact(
            config.output_dir,
            "entropy_scaling.csv",
            lambda fh: write_scaling_csv(fh, scaling, dimension),
        )
        r_ref = vr / config.r_ref_div
        entropy_bits = shannon_entropy(partition_boxes(cloud, r_ref))

    with _Stage("dimension_fit"):
        fit_range = None
        if config.fit_r_lo is not None:
            fit_range = (config.fit_r_lo, config.fit_r_hi)
        try:
            estimate = information_dimension(scaling, fit_range)
        except ScalingFitError:
            return finish(
                report(
                    STATUS_INSUFFICIENT_SCALING,
                    dimension=dimension,
                    dim_found=True,
                    dim_source=dim_source,
                    entropy_bits=entropy_bits,
                    r_ref=r_ref,
                )
            )

    return finish(
        report(
            STATUS_OK,
            dimension=dimension,
            dim_found=True,
            dim_source=dim_source,
            entropy_bits=entropy_bits,
            r_ref=r_ref,
            estimate=estimate,
        )
    )


_BOOL_FIELDS = {"skip_header", "timestamp"}
_INT_FIELDS = {
    "j_bins", "t_max", "m_max", "theiler_window", "ladder_steps",
    "fixed_delay", "fixed_dimension",
}
_FLOAT_FIELDS = {
    "r_tol", "fnn_threshold", "r_coarse_div", "r_fine_div", "r_ref_div",
    "fit_r_lo", "fit_r_hi",
}
_STR_FIELDS = {"input_path", "missing_policy", "output_dir"}


def coerce_config_value(name: str, text: str):
    """Parse one key=value right-hand side into the config field's type.

    ``column`` accepts either a nonnegative integer index or a header
    name; plain digits mean the index.
    """
    text = text.strip()
    if name == "column":
        return int(text) if text.isdigit() else text
    if name in _BOOL_FIELDS:
        low = text.lower()
        if low in ("1", "true", "yes", "on"):
            return True
        if low in ("0", "false", "no", "off"):
            return False
        raise ValueError(f"{name}: expected a boolean, got {text!r}")
    if name in _INT_FIELDS:
        return int(text)
    if name in _FLOAT_FIELDS:
        return float(text)
    if name in _STR_FIELDS:
        return text
    raise ValueError(f"unknown config key {name!r}")


def parse_key_value_config(path: str) -> dict:
    """Read a key=value config file ('#' starts a comment) into typed values."""
    out = {}
    with open(path, encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, 1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise ValueError(f"{path}:{lineno}: expected key=value, got {raw.strip()!r}")
            key, _, value = line.partition("=")
            key = key.strip()
            try:
                out[key] = coerce_config_value(key, value)
            except ValueError as e:
                raise ValueError(f"{path}:{lineno}: {e}") from None
    return out
