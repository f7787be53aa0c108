"""Experiment orchestration: audit, simulate, compare with limit laws, bound, enumerate."""

from __future__ import annotations

import importlib.resources
import json
import logging
import math
import time
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from mixret import __version__, rng
from mixret.bounds import BoundReport, ConditionTable, corollary_conditions, geometric_bound_for, poisson_bound_for
from mixret.config import ExperimentConfig, family_N
from mixret.counting import EmpiricalDistribution, monte_carlo
from mixret.cylinders import TargetSet, are_disjoint, return_floors, self_overlap_pi
from mixret.errors import CapabilityError, InputError, PreconditionError
from mixret.laws import LAMBDA_NOTE, DiscreteLaw, LimitParams, limit_params, tv_distance, tv_distance_with_tail
from mixret.models import MixingProfile, target_prob
from mixret.oracle import EnumerationBudget, ExactResult, estimated_work, exact_distribution
from mixret.schedules import TABLE, AuditReport, audit_schedule

log = logging.getLogger(__name__)

SCHEMA = "mixret-result/1"
SEED_SPLIT = "sample_seed(i) = mix64(master_seed + (i+1) * 0xD1B54A32D192ED03); symbol(t) from mix64(sample_seed + (t+1) * 0x9E3779B97F4A7C15)"
# automatic exact enumeration only below this many node visits
AUTO_EXACT_WORK = 5e6

AUDIT_BANNER = (
    "WARNING: schedule fails the multiplicity audit (value collisions grow with N); "
    "Poisson/geometric limits are not expected for this schedule"
)


def result_schema() -> dict:
    """JSON Schema that every ``result.json`` conforms to."""
    return json.loads(importlib.resources.files("mixret").joinpath("schema/result.schema.json").read_text())


@dataclass
class ExperimentResult:
    config: dict
    mode: str
    N: int
    V: TargetSet
    W: TargetSet | None
    pV: float
    pW: float | None
    params: LimitParams | None
    limit_law: DiscreteLaw | None
    empirical: EmpiricalDistribution
    tv_empirical: float | None
    tv_tail: float
    exact: ExactResult | None
    exact_note: str | None
    tv_exact: float | None
    tv_exact_empirical: float | None
    bound: BoundReport | None
    M_N: int | None
    audit: AuditReport
    floors: dict
    warnings: list[str] = field(default_factory=list)
    runtime_s: float = 0.0
    L: int | None = None

    @property
    def master_seed(self) -> int:
        return int(self.config["master_seed"])

    def histogram_csv(self) -> str:
        return self.empirical.to_csv(self.master_seed)

    def to_dict(self) -> dict:
        emp = self.empirical
        d = {
            "schema": SCHEMA,
            "config": self.config,
            "mode": self.mode,
            "L": self.L,
            "N": self.N,
            "M": emp.M,
            "targets": {
                "V": self.V.format(self.config["targets"].get("separator") or ""),
                "W": None if self.W is None else self.W.format(self.config["targets"].get("separator") or ""),
                "n": self.V.length,
                "m": None if self.W is None else self.W.length,
            },
            "probabilities": {"pV": self.pV, "pW": self.pW},
            "limit_params": None if self.params is None else self.params.to_dict(),
            "limit_law": None if self.limit_law is None else self.limit_law.describe(),
            "empirical": {
                "counts": {str(k): v for k, v in emp.counts.items()},
                "M": emp.M,
                "censored_count": emp.censored_count,
            },
            "tv_empirical": {
                "value": self.tv_empirical,
                "tail_uncertainty": self.tv_tail,
                "mc_standard_error": emp.standard_error,
            },
            "exact": None,
            "bound": None,
            "audit": self.audit.to_dict(),
            "floors": self.floors,
            "warnings": self.warnings,
            "provenance": {
                "master_seed": self.master_seed,
                "rng": rng.RNG_NAME,
                "seed_split": SEED_SPLIT,
                "workers": int(self.config["workers"]),
                "runtime_s": self.runtime_s,
                "version": __version__,
            },
        }
        if self.exact is not None:
            d["exact"] = {
                "pmf": [float(x) for x in self.exact.law.table],
                "censored_mass": self.exact.censored_mass,
                "pruned_mass": self.exact.pruned_mass,
                "trajectory_length": self.exact.trajectory_length,
                "tv_exact": self.tv_exact,
                "tv_exact_vs_empirical": self.tv_exact_empirical,
            }
        elif self.exact_note:
            d["exact"] = {"skipped": self.exact_note}
        if self.bound is not None:
            d["bound"] = self.bound.to_dict() | {"M_N": self.M_N, "epsilon": float(self.config["epsilon"])}
        return d

    def write(self, out: str | Path) -> None:
        out = Path(out)
        out.mkdir(parents=True, exist_ok=True)
        (out / "result.json").write_text(json.dumps(self.to_dict(), indent=2, default=_json_default) + "\n")
        (out / "histogram.csv").write_text(self.histogram_csv())
        if self.exact is not None:
            (out / "exact.csv").write_text(self.exact.to_csv())


def _json_default(o):
    if isinstance(o, (np.integer,)):
        return int(o)
    if isinstance(o, (np.floating,)):
        return float(o)
    if isinstance(o, np.ndarray):
        return o.tolist()
    raise TypeError(f"not JSON serializable: {type(o)}")


def _audit_Ns(cfg: ExperimentConfig, N: int) -> list[int]:
    if cfg.audit_Ns:
        return sorted(set(int(x) for x in cfg.audit_Ns) | {N})
    if cfg.schedule.kind == TABLE:
        return sorted(cfg.schedule.table)
    # collisions are a large-N phenomenon; look a couple of decades ahead
    return [N, 10 * N, 100 * N]


def run_experiment(cfg: ExperimentConfig, L: int | None = None) -> ExperimentResult:
    t0 = time.perf_counter()
    model = cfg.model
    V, W = cfg.targets(L)
    if W is not None and not are_disjoint(V, W):
        raise PreconditionError(
            f"targets V={V.format()} and W={W.format()} intersect; the geometric limit is stated for any disjoint sets"
        )
    pV = target_prob(model, V)
    pW = None if W is None else target_prob(model, W)
    if cfg.N is not None and L is None:
        N = cfg.N
    elif cfg.family is not None and L is not None:
        N = family_N(cfg.family.get("N_rule", {}), L, pV, pW)
    else:
        N = cfg.N
    warnings: list[str] = []

    audit = audit_schedule(cfg.schedule, _audit_Ns(cfg, N))
    at_N = next((a for a in audit if a.N == N), None)
    K = max(1, at_N.K1, at_N.K2) if at_N else audit.K
    if not audit.passed:
        warnings.append(AUDIT_BANNER)

    params = law = None
    try:
        params = limit_params(pV, pW, N)
        law = DiscreteLaw.geometric(params.rho) if W is not None else DiscreteLaw.poisson(params.lam)
    except InputError as e:
        warnings.append(f"no reference law: {e}")

    emp = monte_carlo(model, V, W, cfg.schedule, N, cfg.M, cfg.master_seed, cfg.workers)
    tv_emp, tv_tail = (None, 0.0) if law is None else tv_distance_with_tail(emp, law)

    exact = None
    note = None
    tv_exact = tv_exact_emp = None
    want = cfg.exact
    if want == "auto" and estimated_work(model, V, W, cfg.schedule, N) > AUTO_EXACT_WORK:
        note = "instance too large for automatic enumeration"
        want = False
    if want:
        try:
            exact = exact_distribution(model, V, W, cfg.schedule, N, EnumerationBudget(cfg.budget))
        except CapabilityError as e:
            if cfg.exact is True:
                raise
            note = str(e)
    if exact is not None:
        tv_exact_emp = tv_distance(exact.law, emp)
        if law is not None:
            tv_exact = tv_distance(exact.law, law)

    profile = MixingProfile.from_model(model)
    bound = mn = None
    if law is not None:
        try:
            if W is None:
                bound, rec = poisson_bound_for(model, V, profile, N, K, cfg.epsilon)
            else:
                bound, rec = geometric_bound_for(model, V, W, profile, N, K, cfg.epsilon)
            mn = rec.M_N
        except CapabilityError as e:
            warnings.append(f"bound not evaluated: {e}")

    if W is None:
        floors = {"pi_V": self_overlap_pi(V)}
    else:
        f = return_floors(V, W)
        floors = {"pi_V": f.pi_V, "pi_W": f.pi_W, "pi_VW": f.pi_VW, "kappa": f.kappa}

    return ExperimentResult(
        config=_json_safe(cfg.raw),
        mode=cfg.mode,
        N=N,
        V=V,
        W=W,
        pV=pV,
        pW=pW,
        params=params,
        limit_law=law,
        empirical=emp,
        tv_empirical=tv_emp,
        tv_tail=tv_tail,
        exact=exact,
        exact_note=note,
        tv_exact=tv_exact,
        tv_exact_empirical=tv_exact_emp,
        bound=bound,
        M_N=mn,
        audit=audit,
        floors=floors,
        warnings=warnings,
        runtime_s=time.perf_counter() - t0,
        L=L,
    )


def _json_safe(d):
    return json.loads(json.dumps(d, default=_json_default))


@dataclass
class SweepResult:
    results: list[ExperimentResult]
    conditions: ConditionTable
    slope_tv: float | None
    slope_log_tv: float | None
    verdict: str

    def summary_rows(self) -> list[dict]:
        rows = []
        for res, cond in zip(self.results, self.conditions.rows):
            row = {
                "L": res.L,
                "n": res.V.length,
                "N": res.N,
                "tv_empirical": res.tv_empirical,
                "tv_exact": res.tv_exact,
                "bound_total": None if res.bound is None else res.bound.total,
            }
            for k, v in cond.items():
                row.setdefault(k, v)
            rows.append(row)
        return rows

    def summary_csv(self) -> str:
        rows = self.summary_rows()
        cols = list(rows[0])
        lines = [",".join(cols)]
        for r in rows:
            lines.append(",".join("" if r[c] is None else repr(r[c]) if isinstance(r[c], float) else str(r[c]) for c in cols))
        return "\n".join(lines) + "\n"

    def to_dict(self) -> dict:
        return {
            "schema": SCHEMA,
            "sweep": True,
            "verdict": self.verdict,
            "slope_tv": self.slope_tv,
            "slope_log_tv": self.slope_log_tv,
            "conditions": self.conditions.to_dict(),
            "summary": self.summary_rows(),
        }

    def write(self, out: str | Path) -> None:
        out = Path(out)
        out.mkdir(parents=True, exist_ok=True)
        for res in self.results:
            res.write(out / f"L{res.L}")
        (out / "convergence.csv").write_text(self.summary_csv())
        (out / "sweep.json").write_text(json.dumps(self.to_dict(), indent=2, default=_json_default) + "\n")


def _slope(xs, ys) -> float | None:
    pts = [(x, y) for x, y in zip(xs, ys) if y is not None and math.isfinite(y)]
    if len(pts) < 2:
        return None
    x, y = np.array(pts, dtype=float).T
    return float(np.polyfit(x, y, 1)[0])


def sweep(cfg: ExperimentConfig) -> SweepResult:
    Ls = cfg.family_range()
    results = [run_experiment(cfg, L) for L in Ls]
    family = [{"L": r.L, "V": r.V, "W": r.W, "N": r.N} for r in results]
    conditions = corollary_conditions(family, cfg.model, MixingProfile.from_model(cfg.model), cfg.epsilon)
    tvs = [r.tv_empirical for r in results]
    slope = _slope(Ls, tvs)
    slope_log = _slope(Ls, [math.log(t) if t and t > 0 else None for t in tvs])
    violated = [c for c, v in conditions.verdicts.items() if v == "violated"]
    if violated:
        verdict = "no convergence verdict: conditions violated (" + ", ".join(violated) + ")"
    elif slope_log is not None and slope_log < 0:
        verdict = "converging: tv decreases with L"
    else:
        verdict = "not converging at this scale"
    return SweepResult(results, conditions, slope, slope_log, verdict)


__all__ = ["ExperimentResult", "SweepResult", "run_experiment", "sweep", "result_schema", "LAMBDA_NOTE", "SCHEMA"]
