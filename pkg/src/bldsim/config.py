"""Experiment configuration: JSON file with a strict, documented key set.

Required keys
    dim            problem dimension (>= 1)
    ensemble_size  particles per run (>= 2)
    block_counts   list of block counts b to sweep
    lams           list of uniform block durations to sweep (> 0)
    seeds          list of run seeds
    cycles         whole-problem cycles per run (>= 1)

Optional keys (defaults in parentheses)
    beta (1.0)                 inverse temperature
    algorithms (["rbld","cbld"])  any of rbld, cbld, rblmc, cblmc
    deltas ([0.0])             perturbation strengths to sweep
    em_step (null)             inner step; null means lam / 100
    probe_cadence (30)         inner steps between probes
    entry_range ([-5.0, 5.0])  uniform entry range for target generation
    pd_margin (1.2)            diagonal shift multiplier for definiteness
    target_seed (0)            seed of the shared generated target
    target_file (null)         load a pinned target instead of generating
    init_mean (0.0)            initial-law mean (scalar broadcast)
    init_var (0.25)            initial-law isotropic variance
    device_scale (1.55e-8)     seconds of device time per simulation unit
    divergence_threshold (1e6) max |coordinate| before a run is abandoned
    cadence_unit ("steps")     "steps" (inner steps) or "cycles"

Unknown keys are rejected so typos fail loudly.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

__all__ = ["ExperimentConfig", "load_config"]

_ALGORITHMS = ("rbld", "cbld", "rblmc", "cblmc")

_REQUIRED = ("dim", "ensemble_size", "block_counts", "lams", "seeds", "cycles")

_DEFAULTS = {
    "beta": 1.0,
    "algorithms": ["rbld", "cbld"],
    "deltas": [0.0],
    "em_step": None,
    "probe_cadence": 30,
    "entry_range": [-5.0, 5.0],
    "pd_margin": 1.2,
    "target_seed": 0,
    "target_file": None,
    "init_mean": 0.0,
    "init_var": 0.25,
    "device_scale": 1.55e-8,
    "divergence_threshold": 1e6,
    "cadence_unit": "steps",
}


@dataclass(frozen=True)
class ExperimentConfig:
    dim: int
    ensemble_size: int
    block_counts: tuple[int, ...]
    lams: tuple[float, ...]
    seeds: tuple[int, ...]
    cycles: int
    beta: float = 1.0
    algorithms: tuple[str, ...] = ("rbld", "cbld")
    deltas: tuple[float, ...] = (0.0,)
    em_step: float | None = None
    probe_cadence: int = 30
    entry_range: tuple[float, float] = (-5.0, 5.0)
    pd_margin: float = 1.2
    target_seed: int = 0
    target_file: str | None = None
    init_mean: float = 0.0
    init_var: float = 0.25
    device_scale: float = 1.55e-8
    divergence_threshold: float = 1e6
    cadence_unit: str = "steps"

    def canonical(self) -> dict:
        """JSON-ready dict with every key resolved, for hashing."""
        return {
            "dim": self.dim,
            "ensemble_size": self.ensemble_size,
            "block_counts": list(self.block_counts),
            "lams": list(self.lams),
            "seeds": list(self.seeds),
            "cycles": self.cycles,
            "beta": self.beta,
            "algorithms": list(self.algorithms),
            "deltas": list(self.deltas),
            "em_step": self.em_step,
            "probe_cadence": self.probe_cadence,
            "entry_range": list(self.entry_range),
            "pd_margin": self.pd_margin,
            "target_seed": self.target_seed,
            "target_file": self.target_file,
            "init_mean": self.init_mean,
            "init_var": self.init_var,
            "device_scale": self.device_scale,
            "divergence_threshold": self.divergence_threshold,
            "cadence_unit": self.cadence_unit,
        }


def _fail(key: str, why: str):
    raise ValueError(f"config key '{key}': {why}")


def _validate(cfg: ExperimentConfig) -> ExperimentConfig:
    if cfg.dim < 1:
        _fail("dim", "must be at least 1")
    if cfg.ensemble_size < 2:
        _fail("ensemble_size", "must be at least 2")
    if not cfg.block_counts or any(b < 1 or b > cfg.dim for b in cfg.block_counts):
        _fail("block_counts", f"entries must lie in 1..dim ({cfg.dim})")
    if not cfg.lams or any(l <= 0 for l in cfg.lams):
        _fail("lams", "entries must be positive")
    if not cfg.seeds:
        _fail("seeds", "must list at least one seed")
    if cfg.cycles < 1:
        _fail("cycles", "must be at least 1")
    if cfg.beta <= 0:
        _fail("beta", "must be positive")
    bad = [a for a in cfg.algorithms if a not in _ALGORITHMS]
    if bad or not cfg.algorithms:
        _fail("algorithms", f"must be a nonempty subset of {list(_ALGORITHMS)}")
    if any(d < 0 for d in cfg.deltas):
        _fail("deltas", "entries must be nonnegative")
    if cfg.em_step is not None and cfg.em_step <= 0:
        _fail("em_step", "must be positive (or null for lam / 100)")
    if cfg.em_step is not None and cfg.em_step > min(cfg.lams):
        _fail("em_step", "must not exceed the shortest block duration")
    if cfg.probe_cadence < 1:
        _fail("probe_cadence", "must be at least 1")
    if not cfg.entry_range[0] < cfg.entry_range[1]:
        _fail("entry_range", "must be a nonempty interval [lo, hi]")
    if cfg.pd_margin <= 1.0:
        _fail("pd_margin", "must exceed 1")
    if not 0 < cfg.init_var < 0.5:
        _fail("init_var", "must lie in (0, 0.5) so the initial law is admissible")
    if cfg.device_scale <= 0:
        _fail("device_scale", "must be positive")
    if cfg.divergence_threshold <= 0:
        _fail("divergence_threshold", "must be positive")
    if cfg.cadence_unit not in ("steps", "cycles"):
        _fail("cadence_unit", "must be 'steps' or 'cycles'")
    return cfg


def config_from_dict(raw: dict) -> ExperimentConfig:
    unknown = sorted(set(raw) - set(_REQUIRED) - set(_DEFAULTS))
    if unknown:
        raise ValueError(f"unknown config keys: {', '.join(unknown)}")
    missing = sorted(set(_REQUIRED) - set(raw))
    if missing:
        raise ValueError(f"missing required config keys: {', '.join(missing)}")
    merged = {**_DEFAULTS, **raw}
    cfg = ExperimentConfig(
        dim=int(merged["dim"]),
        ensemble_size=int(merged["ensemble_size"]),
        block_counts=tuple(int(b) for b in merged["block_counts"]),
        lams=tuple(float(l) for l in merged["lams"]),
        seeds=tuple(int(s) for s in merged["seeds"]),
        cycles=int(merged["cycles"]),
        beta=float(merged["beta"]),
        algorithms=tuple(str(a) for a in merged["algorithms"]),
        deltas=tuple(float(d) for d in merged["deltas"]),
        em_step=None if merged["em_step"] is None else float(merged["em_step"]),
        probe_cadence=int(merged["probe_cadence"]),
        entry_range=(float(merged["entry_range"][0]), float(merged["entry_range"][1])),
        pd_margin=float(merged["pd_margin"]),
        target_seed=int(merged["target_seed"]),
        target_file=None if merged["target_file"] is None else str(merged["target_file"]),
        init_mean=float(merged["init_mean"]),
        init_var=float(merged["init_var"]),
        device_scale=float(merged["device_scale"]),
        divergence_threshold=float(merged["divergence_threshold"]),
        cadence_unit=str(merged["cadence_unit"]),
    )
    return _validate(cfg)


def load_config(path: str | Path) -> ExperimentConfig:
    """Parse and validate a JSON config file."""
    text = Path(path).read_text().strip()
    if not text:
        raise ValueError(
            f"{path} is empty; required keys: {', '.join(_REQUIRED)}"
        )
    raw = json.loads(text)
    if not isinstance(raw, dict):
        raise ValueError(f"{path}: top level must be a JSON object")
    return config_from_dict(raw)
