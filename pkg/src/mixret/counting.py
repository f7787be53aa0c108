"""Monte Carlo engine for scheduled hit counts.

Sample ``i`` of an experiment uses the SplitMix64 stream seeded with
``split_seeds(master_seed, i)``, so histograms do not depend on batching or
on the number of worker processes.
"""

from __future__ import annotations

import csv
import io
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Sequence

import numpy as np

from mixret import rng
from mixret.cylinders import TargetSet, are_disjoint
from mixret.errors import InputError, PreconditionError
from mixret.models import ProcessModel
from mixret.schedules import Schedule, positions

# upper bound on symbols held per batch (samples x needed positions)
BATCH_CELLS = 1 << 22


@dataclass
class HitVector:
    x0: np.ndarray
    x1: np.ndarray | None
    N: int


@dataclass(frozen=True)
class CountSummary:
    S: int
    tau: int | None  # None: W never hit among k = 1..N (censored)
    Sigma_capped: int | None
    censored: bool


@dataclass
class EmpiricalDistribution:
    counts: dict[int, int]
    M: int
    censored_count: int = 0
    exact: bool = False

    def __post_init__(self):
        self.counts = {int(k): int(v) for k, v in sorted(self.counts.items()) if v}
        if sum(self.counts.values()) != self.M:
            raise InputError("histogram counts do not sum to M")

    @classmethod
    def from_bincount(cls, bins: np.ndarray, censored: int = 0) -> "EmpiricalDistribution":
        nz = np.flatnonzero(bins)
        return cls({int(k): int(bins[k]) for k in nz}, int(bins.sum()), int(censored))

    def probabilities(self) -> dict[int, float]:
        return {k: c / self.M for k, c in self.counts.items()}

    def pmf(self, k: int) -> float:
        return self.counts.get(k, 0) / self.M

    @property
    def support_max(self) -> int:
        return max(self.counts)

    @property
    def standard_error(self) -> float:
        return 1.0 / math.sqrt(self.M)

    def to_csv(self, seed: int | None = None) -> str:
        buf = io.StringIO()
        buf.write(f"# censored_count,{self.censored_count}\n")
        buf.write(f"# M,{self.M}\n")
        buf.write(f"# seed,{'' if seed is None else seed}\n")
        buf.write(f"# rng,{rng.RNG_NAME}\n")
        if self.exact:
            buf.write("# exact,true\n")
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["value", "count", "probability"])
        for k, c in self.counts.items():
            w.writerow([k, c, repr(c / self.M)])
        return buf.getvalue()

    def write_csv(self, path: str | Path, seed: int | None = None) -> None:
        Path(path).write_text(self.to_csv(seed))

    @classmethod
    def read_csv(cls, path: str | Path) -> "EmpiricalDistribution":
        meta, counts = {}, {}
        with open(path, newline="") as fh:
            for row in csv.reader(fh):
                if not row:
                    continue
                if row[0].startswith("#"):
                    meta[row[0][1:].strip()] = row[1] if len(row) > 1 else ""
                elif row[0] != "value":
                    counts[int(row[0])] = int(row[1])
        return cls(counts, int(meta["M"]), int(meta.get("censored_count", 0)))


class HitPlan:
    """Everything about (model, targets, schedule, N) that is shared by all samples."""

    def __init__(self, model: ProcessModel, V: TargetSet, W: TargetSet | None, schedule: Schedule, N: int):
        if N < 1:
            raise InputError(f"N must be >= 1, got {N}")
        self.model = model
        self.N = N
        self.V = V
        self.W = W
        self.v_words = np.array([model.alphabet.encode(w) for w in V.words], dtype=np.int8)
        self.w_words = None if W is None else np.array([model.alphabet.encode(w) for w in W.words], dtype=np.int8)
        self.q = positions(schedule, N)
        width = max(V.length, 0 if W is None else W.length)
        self.width = width
        if model.is_iid:
            # only positions covered by some window are ever drawn
            self.pos = np.unique((self.q[:, None] + np.arange(width)[None, :]).ravel())
        else:
            self.pos = np.arange(int(self.q.max()) + width, dtype=np.int64)
        # window symbols are consecutive in self.pos, so a window starting at
        # self.pos[i] occupies columns i .. i + width - 1
        self.start = np.searchsorted(self.pos, self.q)
        if model.is_iid:
            self.cdf = np.cumsum(model.probs)[:-1]
        else:
            self.cdf0 = np.cumsum(model.stationary)[:-1]
            self.cdf_rows = np.cumsum(model.transition, axis=1)[:, :-1]

    @property
    def trajectory_length(self) -> int:
        return int(self.q.max()) + self.width

    def batch_size(self) -> int:
        return max(1, BATCH_CELLS // max(1, len(self.pos)))

    def symbols(self, seeds: np.ndarray) -> np.ndarray:
        u = rng.uniforms(seeds, self.pos)
        if self.model.is_iid:
            sym = np.zeros(u.shape, dtype=np.int8)
            for c in self.cdf:
                sym += u >= c
            return sym
        sym = np.empty(u.shape, dtype=np.int8)
        state = (u[:, 0][:, None] >= self.cdf0[None, :]).sum(axis=1).astype(np.int8)
        sym[:, 0] = state
        for t in range(1, u.shape[1]):
            state = (u[:, t][:, None] >= self.cdf_rows[state]).sum(axis=1).astype(np.int8)
            sym[:, t] = state
        return sym

    def _match(self, sym: np.ndarray, words: np.ndarray) -> np.ndarray:
        n = words.shape[1]
        span = sym.shape[1] - n + 1
        hit = np.zeros((sym.shape[0], span), dtype=bool)
        for word in words:
            m = sym[:, 0:span] == word[0]
            for j in range(1, n):
                m &= sym[:, j:j + span] == word[j]
            hit |= m
        return hit[:, self.start]

    def hits(self, sym: np.ndarray) -> tuple[np.ndarray, np.ndarray | None]:
        x0 = self._match(sym, self.v_words)
        x1 = None if self.w_words is None else self._match(sym, self.w_words)
        return x0, x1


def hits_from_trajectory(
    trajectory: Sequence[str],
    model: ProcessModel,
    V: TargetSet,
    W: TargetSet | None,
    schedule: Schedule,
    N: int,
) -> HitVector:
    """Hit bits for a given symbol sequence (per-k window reads)."""
    q = positions(schedule, N)
    need = int(q.max()) + max(V.length, 0 if W is None else W.length)
    if len(trajectory) < need:
        raise InputError(f"trajectory of length {len(trajectory)} is shorter than the required {need}")
    traj = tuple(trajectory)
    vset = set(V.words)
    x0 = np.array([traj[p:p + V.length] in vset for p in q], dtype=bool)
    x1 = None
    if W is not None:
        wset = set(W.words)
        x1 = np.array([traj[p:p + W.length] in wset for p in q], dtype=bool)
    return HitVector(x0, x1, N)


def evaluate_hits(
    model: ProcessModel,
    V: TargetSet,
    W: TargetSet | None,
    schedule: Schedule,
    N: int,
    seed: int,
) -> HitVector:
    """Hit bits for the trajectory drawn from ``sample_stream(model, seed)``."""
    plan = HitPlan(model, V, W, schedule, N)
    x0, x1 = plan.hits(plan.symbols(np.array([rng.as_seed(seed)])))
    return HitVector(x0[0], None if x1 is None else x1[0], N)


def summarize_counts(h: HitVector) -> CountSummary:
    S = int(np.count_nonzero(h.x0))
    if h.x1 is None:
        return CountSummary(S, None, None, False)
    idx = np.flatnonzero(h.x1)
    if idx.size == 0:
        return CountSummary(S, None, S, True)
    tau = int(idx[0]) + 1
    return CountSummary(S, tau, int(np.count_nonzero(h.x0[:tau])), False)


def _summarize_batch(x0: np.ndarray, x1: np.ndarray | None) -> tuple[np.ndarray, np.ndarray]:
    """Vectorized summarize_counts: statistic per sample and censoring flags."""
    if x1 is None:
        return x0.sum(axis=1), np.zeros(x0.shape[0], dtype=bool)
    hit = x1.any(axis=1)
    last = np.where(hit, np.argmax(x1, axis=1), x0.shape[1] - 1)
    cs = np.cumsum(x0, axis=1, dtype=np.int32)
    return cs[np.arange(x0.shape[0]), last], ~hit


def _run_range(plan: HitPlan, master_seed: int, lo: int, hi: int) -> tuple[np.ndarray, int]:
    bins = np.zeros(plan.N + 1, dtype=np.int64)
    censored = 0
    step = plan.batch_size()
    for a in range(lo, hi, step):
        b = min(hi, a + step)
        seeds = rng.split_seeds(master_seed, np.arange(a, b, dtype=np.uint64))
        x0, x1 = plan.hits(plan.symbols(seeds))
        stat, cens = _summarize_batch(x0, x1)
        bins += np.bincount(stat, minlength=plan.N + 1)
        censored += int(cens.sum())
    return bins, censored


def _worker(args):
    model, V, W, schedule, N, master_seed, lo, hi = args
    return _run_range(HitPlan(model, V, W, schedule, N), master_seed, lo, hi)


def monte_carlo(
    model: ProcessModel,
    V: TargetSet,
    W: TargetSet | None,
    schedule: Schedule,
    N: int,
    M: int,
    master_seed: int,
    workers: int = 1,
) -> EmpiricalDistribution:
    """Empirical law of S_N (``W is None``) or of Sigma_N capped at N.

    Censored samples are recorded at their capped value and also counted in
    ``censored_count``.
    """
    if M < 1:
        raise InputError("M must be >= 1")
    if W is not None and not are_disjoint(V, W):
        raise PreconditionError(
            "geometric mode requires disjoint targets V and W; the geometric limit is stated for any disjoint sets"
        )
    plan = HitPlan(model, V, W, schedule, N)
    if workers <= 1 or M < 2 * workers:
        bins, censored = _run_range(plan, master_seed, 0, M)
        return EmpiricalDistribution.from_bincount(bins, censored)
    edges = np.linspace(0, M, workers + 1).astype(int)
    jobs = [(model, V, W, schedule, N, master_seed, int(lo), int(hi)) for lo, hi in zip(edges, edges[1:])]
    bins = np.zeros(N + 1, dtype=np.int64)
    censored = 0
    with ProcessPoolExecutor(max_workers=workers) as pool:
        for b, c in pool.map(_worker, jobs):
            bins += b
            censored += c
    return EmpiricalDistribution.from_bincount(bins, censored)
