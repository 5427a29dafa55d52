"""Versioned experiment records and their JSON/CSV serialization.

Records are written with sorted keys and shortest-repr floats, so two runs
with the same experiment id, seed and version produce byte-identical files
once the ``timestamps`` entry is removed.
"""

import csv
import dataclasses
import json
import zlib
from datetime import datetime, timezone
from fractions import Fraction
from pathlib import Path

import numpy as np

from . import __version__
from .constants import PiMultiple
from .exact import GaussianRational

SCHEMA_VERSION = 1
VERDICTS = ("pass", "fail", "finding")


def jsonable(x):
    """Convert nested results to JSON-ready data without losing exactness.

    Fractions become ``"num/den"`` strings, Gaussian rationals
    ``{"re", "im"}``, complex numbers ``[re, im]`` and pi-multiples
    ``{"rational", "pi_power"}``.
    """
    if isinstance(x, bool) or x is None or isinstance(x, str):
        return x
    if isinstance(x, (int, np.integer)):
        return int(x)
    if isinstance(x, (float, np.floating)):
        return float(x)
    if isinstance(x, Fraction):
        return f"{x.numerator}/{x.denominator}"
    if isinstance(x, (complex, np.complexfloating)):
        return [float(x.real), float(x.imag)]
    if isinstance(x, GaussianRational):
        return {"re": jsonable(x.re), "im": jsonable(x.im)}
    if isinstance(x, PiMultiple):
        return x.to_json_obj()
    if isinstance(x, np.ndarray):
        return [jsonable(v) for v in x.tolist()] if x.ndim else jsonable(x.item())
    if isinstance(x, dict):
        return {str(k): jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [jsonable(v) for v in x]
    if hasattr(x, "to_json_obj"):
        return jsonable(x.to_json_obj())
    if dataclasses.is_dataclass(x):
        return jsonable(dataclasses.asdict(x))
    raise TypeError(f"cannot serialize {type(x).__name__}")


def experiment_rng(experiment, seed):
    """Generator whose stream depends only on the experiment id and the seed."""
    ss = np.random.SeedSequence(entropy=int(seed), spawn_key=(zlib.crc32(experiment.encode()),))
    return np.random.default_rng(ss)


def _now():
    return datetime.now(timezone.utc).isoformat(timespec="seconds")


@dataclasses.dataclass
class ExperimentResult:
    """One experiment: inputs, estimates, reference bounds and a verdict.

    ``verdict`` is ``"pass"``, ``"fail"`` (a proved bound or identity did not
    hold numerically) or ``"finding"`` (a conjectured statement failed).
    """

    experiment: str
    claim: str
    params: dict
    seed: int
    estimates: dict = dataclasses.field(default_factory=dict)
    bounds: dict = dataclasses.field(default_factory=dict)
    verdict: str = "pass"
    version: str = __version__
    schema: int = SCHEMA_VERSION
    timestamps: dict = dataclasses.field(default_factory=lambda: {"started": _now()})

    def finish(self, verdict=None):
        if verdict is not None:
            self.verdict = verdict
        if self.verdict not in VERDICTS:
            raise ValueError(f"bad verdict {self.verdict!r}")
        self.timestamps["finished"] = _now()
        return self

    @property
    def exit_code(self):
        return 0 if self.verdict == "pass" else 2

    def to_json_obj(self, timestamps=True):
        out = {
            "experiment": self.experiment,
            "claim": self.claim,
            "params": jsonable(self.params),
            "seed": self.seed,
            "estimates": jsonable(self.estimates),
            "bounds": jsonable(self.bounds),
            "verdict": self.verdict,
            "version": self.version,
            "schema": self.schema,
        }
        if timestamps:
            out["timestamps"] = dict(self.timestamps)
        return out

    def dumps(self, timestamps=True):
        return json.dumps(self.to_json_obj(timestamps), sort_keys=True, indent=2) + "\n"

    @classmethod
    def from_json_obj(cls, obj):
        return cls(
            experiment=obj["experiment"],
            claim=obj["claim"],
            params=obj["params"],
            seed=obj["seed"],
            estimates=obj["estimates"],
            bounds=obj["bounds"],
            verdict=obj["verdict"],
            version=obj["version"],
            schema=obj["schema"],
            timestamps=obj.get("timestamps", {}),
        )


def canonical_json(text):
    """Result JSON with the timestamps removed, for determinism checks."""
    obj = json.loads(text)
    obj.pop("timestamps", None)
    return json.dumps(obj, sort_keys=True, indent=2)


def write_result(outdir, result):
    outdir = Path(outdir)
    outdir.mkdir(parents=True, exist_ok=True)
    path = outdir / "result.json"
    path.write_text(result.dumps())
    return path


def read_result(path):
    return ExperimentResult.from_json_obj(json.loads(Path(path).read_text()))


SWEEP_COLUMNS = ("n", "m", "statistic", "estimate", "ci_lo", "ci_hi", "paper_bound", "pass")


def write_sweep_csv(path, estimates):
    """Rows of :class:`supq.haar.TVEstimate` as ``sweep.csv``."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(SWEEP_COLUMNS)
        for e in estimates:
            w.writerow([e.n, e.m, e.statistic, repr(e.estimate), repr(e.ci_lo), repr(e.ci_hi),
                        repr(e.theorem_bound), int(e.passed)])
    return path


def write_plotdata(path, xs, ys, errs=None):
    """``plotdata.csv`` with columns ``x, y, err``."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    errs = [0.0] * len(xs) if errs is None else errs
    with path.open("w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(("x", "y", "err"))
        for x, y, e in zip(xs, ys, errs):
            w.writerow([repr(float(x)), repr(float(y)), repr(float(e))])
    return path
