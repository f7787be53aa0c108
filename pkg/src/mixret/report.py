"""Plain-text summaries of experiment and sweep results."""

from __future__ import annotations

from typing import Sequence

from mixret.experiment import ExperimentResult, SweepResult
from mixret.laws import LAMBDA_NOTE


def fmt(x) -> str:
    if x is None:
        return "-"
    if isinstance(x, bool):
        return str(x).lower()
    if isinstance(x, int):
        return str(x)
    if isinstance(x, float):
        return f"{x:.6g}"
    return str(x)


def _table(rows: Sequence[Sequence], header: Sequence[str]) -> list[str]:
    cells = [list(header)] + [[fmt(c) for c in r] for r in rows]
    widths = [max(len(r[i]) for r in cells) for i in range(len(header))]
    out = ["  ".join(c.rjust(w) for c, w in zip(cells[0], widths))]
    out.append("  ".join("-" * w for w in widths))
    out.extend("  ".join(c.rjust(w) for c, w in zip(r, widths)) for r in cells[1:])
    return out


def _single(res: ExperimentResult) -> list[str]:
    lines = [f"mode: {res.mode}   N: {res.N}   M: {res.empirical.M}   seed: {res.master_seed}"]
    lines += [w for w in res.warnings]
    rows = [
        ("V", ",".join(res.V.format()) if len(res.V) <= 4 else f"{len(res.V)} words of length {res.V.length}"),
        ("P(V)", res.pV),
    ]
    if res.W is not None:
        rows += [("W", ",".join(res.W.format()) if len(res.W) <= 4 else f"{len(res.W)} words"), ("P(W)", res.pW)]
    if res.params is not None:
        rows.append(("lambda", res.params.lam))
        if res.params.rho is not None:
            rows += [("rho", res.params.rho), ("varrho", res.params.varrho)]
    rows += [(k, v) for k, v in res.floors.items()]
    rows += [
        ("tv(empirical, limit)", res.tv_empirical),
        ("mc standard error", res.empirical.standard_error),
        ("censored samples", res.empirical.censored_count),
        ("tv(exact, limit)", res.tv_exact),
        ("tv(exact, empirical)", res.tv_exact_empirical),
    ]
    if res.exact is None and res.exact_note:
        rows.append(("exact", res.exact_note))
    if res.bound is not None:
        rows += [("R", res.bound.R), ("K", res.bound.K), ("M_N", res.M_N)]
        rows += [(f"bound {k}", v) for k, v in res.bound.terms.items()]
        rows += [("bound total", res.bound.total), ("bound vacuous", res.bound.vacuous)]
    a = res.audit
    rows.append(("schedule audit", f"{a.verdict} (K={a.K})"))
    lines += _table(rows, ("quantity", "value"))
    if res.bound is not None:
        lines += [f"note: {n}" for n in res.bound.notes]
    if res.params is not None:
        lines.append(f"note: {LAMBDA_NOTE}")
    return lines


def emit_report(results: ExperimentResult | SweepResult | Sequence[ExperimentResult]) -> str:
    if isinstance(results, SweepResult):
        rows = results.summary_rows()
        cols = ["L", "n", "N", "tv_empirical", "tv_exact", "bound_total"]
        extra = [c for c in rows[0] if c not in cols and c not in ("pV", "pW")]
        lines = _table([[r[c] for c in cols + extra] for r in rows], cols + extra)
        lines.append("trends: " + ", ".join(f"{c}={t} ({results.conditions.verdicts[c]})" for c, t in results.conditions.trends.items()))
        lines.append(f"slope tv/L: {fmt(results.slope_tv)}   slope log(tv)/L: {fmt(results.slope_log_tv)}")
        lines.append(f"verdict: {results.verdict}")
        lines.append(f"note: {LAMBDA_NOTE}")
        return "\n".join(lines) + "\n"
    if isinstance(results, ExperimentResult):
        results = [results]
    blocks = ["\n".join(_single(r)) for r in results]
    return "\n\n".join(blocks) + "\n"
