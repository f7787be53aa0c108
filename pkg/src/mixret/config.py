"""Experiment configuration: YAML files with model, targets, schedule and run blocks.

See ``configs/`` for annotated examples. A result JSON written by ``mixret run``
can be passed back as a config; its embedded ``config`` block is used.
"""

from __future__ import annotations

import copy
import json
import math
import re
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any

import yaml

from mixret.cylinders import TargetSet, periodic, thue_morse
from mixret.errors import InputError
from mixret.models import ProcessModel, sample_stream
from mixret.schedules import Schedule

MODES = ("poisson", "geometric")
DEFAULTS = {
    "M": 100_000,
    "master_seed": 20240601,
    "workers": 1,
    "epsilon": 0.5,
    "budget": 1 << 22,
    "exact": "auto",
}


def build_model(block: dict) -> ProcessModel:
    try:
        alphabet = block["alphabet"]
        kind = str(block.get("kind", "iid")).lower()
    except (KeyError, TypeError):
        raise InputError("model block needs an 'alphabet' list") from None
    if kind == "iid":
        if "probs" not in block:
            raise InputError("iid model needs 'probs'")
        return ProcessModel.iid(alphabet, block["probs"])
    if kind == "markov":
        if "transition" not in block:
            raise InputError("markov model needs 'transition'")
        return ProcessModel.markov(alphabet, block["transition"])
    raise InputError(f"unknown model kind {kind!r}")


def build_schedule(block: dict, base: Path | None = None) -> Schedule:
    kind = str(block.get("kind", "linear")).lower()
    if kind == "linear":
        return Schedule.linear(int(block.get("offset", 0)))
    if kind in ("polynomial", "polynomial_plus_g"):
        return Schedule.polynomial(block["coeffs"], str(block.get("g", "0")))
    if kind == "bilinear":
        return Schedule.bilinear()
    if kind == "table":
        if "table" in block:
            return Schedule.from_table({int(k): v for k, v in block["table"].items()})
        files = {int(N): (base / p if base and not Path(p).is_absolute() else Path(p)) for N, p in block["files"].items()}
        return Schedule.load_csv(files)
    raise InputError(f"unknown schedule kind {kind!r}")


_LEN_RE = re.compile(r"^\s*L\s*(?:([+-])\s*(\d+))?\s*$")


def _length(value, L: int | None) -> int:
    if isinstance(value, int):
        return value
    if value is None:
        value = "L"
    m = _LEN_RE.match(str(value))
    if not m:
        raise InputError(f"bad target length {value!r}; use an integer or 'L', 'L+c', 'L-c'")
    if L is None:
        raise InputError("target length refers to L outside a family sweep")
    off = int(m.group(2) or 0)
    return L + off if m.group(1) != "-" else L - off


def resolve_target(block, model: ProcessModel, L: int | None = None, separator: str | None = None) -> TargetSet | None:
    """Turn a target block (word list or generator) into a TargetSet."""
    if block is None:
        return None
    if isinstance(block, (str, list, tuple)):
        target = TargetSet.parse(block, separator)
    elif isinstance(block, dict):
        gen = str(block.get("generator", "")).lower()
        n = _length(block.get("length"), L)
        if n < 1:
            raise InputError(f"target length must be >= 1, got {n}")
        if gen == "thue-morse":
            syms = block.get("symbols") or model.alphabet.symbols[:2]
            seq = thue_morse(n, syms)
        elif gen == "periodic":
            seq = periodic(_split(block["pattern"], separator), n)
        elif gen == "sequence":
            seq = _split(block["sequence"], separator)
        elif gen == "sampled":
            idx = sample_stream(model, int(block.get("seed", 0))).take(n)
            seq = tuple(model.alphabet.symbols[i] for i in idx)
        else:
            raise InputError(f"unknown target generator {gen!r}")
        target = TargetSet.prefix(seq, n)
    else:
        raise InputError(f"cannot interpret target block {block!r}")
    for w in target.words:
        model.alphabet.encode(w)
    return target


def _split(value, separator):
    if isinstance(value, str):
        return tuple(value.split(separator)) if separator else tuple(value)
    return tuple(str(x) for x in value)


def family_N(rule: dict, L: int, pV: float, pW: float | None) -> int:
    kind = str(rule.get("kind", "lambda")).lower()
    if kind == "lambda":
        return max(1, math.ceil(float(rule.get("lambda", 1.0)) / pV - 1e-9))
    if kind == "fixed":
        return int(rule["N"])
    if kind == "power":
        return max(1, math.ceil(float(rule.get("scale", 1.0)) * float(rule.get("base", 2.0)) ** L - 1e-9))
    if kind == "target_power":
        p = pW if pW is not None else pV
        return max(1, math.ceil(float(rule.get("scale", 1.0)) * p ** (-float(rule.get("exponent", 1.0))) - 1e-9))
    raise InputError(f"unknown N rule {kind!r}")


@dataclass
class ExperimentConfig:
    model: ProcessModel
    V_spec: Any
    W_spec: Any
    schedule: Schedule
    mode: str
    N: int | None
    M: int
    master_seed: int
    workers: int
    epsilon: float
    budget: int
    exact: str | bool
    separator: str | None = None
    family: dict | None = None
    audit_Ns: list[int] | None = None
    raw: dict = field(default_factory=dict)
    base: Path | None = None

    @property
    def geometric(self) -> bool:
        return self.mode == "geometric"

    def targets(self, L: int | None = None) -> tuple[TargetSet, TargetSet | None]:
        V = resolve_target(self.V_spec, self.model, L, self.separator)
        W = resolve_target(self.W_spec, self.model, L, self.separator) if self.geometric else None
        return V, W

    def family_range(self) -> list[int]:
        if not self.family:
            raise InputError("config has no family block")
        lo, hi = (int(x) for x in self.family["L"])
        if lo > hi:
            raise InputError(f"empty family range L={lo}..{hi}")
        return list(range(lo, hi + 1))


def parse_config(data: dict, base: Path | None = None) -> ExperimentConfig:
    if not isinstance(data, dict):
        raise InputError("config must be a mapping")
    if data.get("schema", "").startswith("mixret-result/"):
        data = data["config"]
    raw = copy.deepcopy(data)
    for k, v in DEFAULTS.items():
        raw.setdefault(k, v)
    for block in ("model", "targets", "schedule"):
        if block not in raw:
            raise InputError(f"config is missing the '{block}' block")
    mode = str(raw.get("mode", "poisson")).lower()
    if mode not in MODES:
        raise InputError(f"mode must be one of {MODES}")
    targets = raw["targets"]
    if "V" not in targets:
        raise InputError("targets block needs V")
    if mode == "geometric" and targets.get("W") is None:
        raise InputError("geometric mode requires a W target")
    family = raw.get("family")
    N = raw.get("N")
    if N is None and family is None:
        raise InputError("config needs N or a family block")
    exact = raw["exact"]
    if exact not in ("auto", True, False):
        raise InputError("exact must be auto, true or false")
    cfg = ExperimentConfig(
        model=build_model(raw["model"]),
        V_spec=targets["V"],
        W_spec=targets.get("W"),
        schedule=build_schedule(raw["schedule"], base),
        mode=mode,
        N=None if N is None else int(N),
        M=int(raw["M"]),
        master_seed=int(raw["master_seed"]),
        workers=int(raw["workers"]),
        epsilon=float(raw["epsilon"]),
        budget=int(raw["budget"]),
        exact=exact,
        separator=targets.get("separator"),
        family=family,
        audit_Ns=raw.get("audit_Ns"),
        raw=raw,
        base=base,
    )
    if cfg.M < 1:
        raise InputError("M must be >= 1")
    if cfg.N is not None and cfg.N < 1:
        raise InputError("N must be >= 1")
    if not 0 < cfg.epsilon < 1:
        raise InputError("epsilon must lie in (0, 1)")
    return cfg


def load_config(path: str | Path) -> ExperimentConfig:
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as e:
        raise InputError(f"cannot read config {path}: {e}") from None
    try:
        data = json.loads(text) if path.suffix == ".json" else yaml.safe_load(text)
    except (yaml.YAMLError, json.JSONDecodeError) as e:
        raise InputError(f"cannot parse config {path}: {e}") from None
    return parse_config(data, path.parent)


def with_overrides(cfg: ExperimentConfig, **overrides) -> ExperimentConfig:
    """Copy of ``cfg`` with run-level fields replaced (None values are ignored)."""
    raw = copy.deepcopy(cfg.raw)
    for k, v in overrides.items():
        if v is not None:
            raw[k] = v
    return parse_config(raw, cfg.base)
