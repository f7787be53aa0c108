"""Exact laws of S_N and of capped Sigma_N by enumerating trajectories.

The enumeration walks the positions covered by some window in increasing
order, branching on every symbol. Two partial trajectories are merged when
they agree on everything the rest of the walk can still observe: the last
``max(n, m) - 1`` symbols and the running statistic. Positions no window
covers are marginalized (for Markov sources through ``transition ** gap``).
Hits are read straight off the word sets and do not share code with the
Monte Carlo engine.
"""

from __future__ import annotations

import io
from collections import defaultdict
from dataclasses import dataclass

import numpy as np

from mixret.cylinders import TargetSet, are_disjoint
from mixret.errors import CapabilityError, InputError, PreconditionError
from mixret.laws import DiscreteLaw, Distribution, tv_distance
from mixret.models import ProcessModel
from mixret.schedules import Schedule, positions

PRUNE_BELOW = 1e-18


@dataclass(frozen=True)
class EnumerationBudget:
    """Cap on simultaneously live (merged) enumeration nodes."""

    max_states: int = 1 << 22

    def __post_init__(self):
        if self.max_states < 1:
            raise InputError("enumeration budget must be positive")


@dataclass
class ExactResult:
    law: DiscreteLaw
    censored_mass: float
    pruned_mass: float
    trajectory_length: int
    peak_states: int

    def to_csv(self) -> str:
        buf = io.StringIO()
        buf.write(f"# censored_mass,{self.censored_mass!r}\n")
        buf.write(f"# pruned_mass,{self.pruned_mass!r}\n")
        buf.write("# exact,true\n")
        buf.write("value,count,probability\n")
        for k, p in enumerate(self.law.table):
            if p > 0:
                buf.write(f"{k},,{p!r}\n")
        return buf.getvalue()


def _branch_probs(model: ProcessModel, prev: int | None, gap: int) -> np.ndarray:
    if model.is_iid:
        return model.probs
    if prev is None:
        return model.stationary
    return model.transition_power(gap)[prev]


def exact_distribution(
    model: ProcessModel,
    V: TargetSet,
    W: TargetSet | None,
    schedule: Schedule,
    N: int,
    budget: EnumerationBudget | None = None,
) -> ExactResult:
    budget = budget or EnumerationBudget()
    if W is not None and not are_disjoint(V, W):
        raise PreconditionError("geometric mode requires disjoint targets V and W (any disjoint sets)")
    q = positions(schedule, N)
    n = V.length
    m = 0 if W is None else W.length
    w = max(n, m)
    L = int(q.max()) + w
    vset = {model.alphabet.encode(x) for x in V.words}
    wset = set() if W is None else {model.alphabet.encode(x) for x in W.words}

    # windows completing at each position
    v_end: dict[int, list[int]] = defaultdict(list)
    w_end: dict[int, list[int]] = defaultdict(list)
    for k, p in enumerate(q.tolist(), start=1):
        v_end[p + n - 1].append(k)
        if W is not None:
            w_end[p + m - 1].append(k)
    needed = sorted({p + j for p in q.tolist() for j in range(w)})
    # smallest k whose W window is still open after each step
    pend_w = [N + 1] * len(needed)
    if W is not None:
        remaining = sorted(range(1, N + 1), key=lambda k: int(q[k - 1]) + m - 1)
        i = 0
        for j, p in enumerate(needed):
            while i < len(remaining) and int(q[remaining[i] - 1]) + m - 1 <= p:
                i += 1
            pend_w[j] = min(remaining[i:], default=N + 1)

    keep = max(w - 1, 0 if model.is_iid else 1)
    geometric = W is not None
    # state: (recent symbols, summary); Poisson summary = count,
    # geometric summary = (tau so far, settled count, unsettled V-hit ks)
    init = (0,) if not geometric else (N + 1, 0, ())
    states: dict = {((), init): 1.0}
    pruned = 0.0
    peak = 1
    prev_pos = None
    for j, p in enumerate(needed):
        gap = 0 if prev_pos is None else p - prev_pos
        ends_v = v_end.get(p, ())
        ends_w = w_end.get(p, ())
        nxt: dict = defaultdict(float)
        for (recent, summ), prob in states.items():
            probs = _branch_probs(model, recent[-1] if recent else None, gap)
            for a, pa in enumerate(probs):
                if pa == 0.0:
                    continue
                pr = prob * pa
                if pr < PRUNE_BELOW:
                    pruned += pr
                    continue
                window = recent + (a,)
                v_hit = bool(ends_v) and window[-n:] in vset
                w_hit = bool(ends_w) and window[-m:] in wset
                if not geometric:
                    new = (summ[0] + (len(ends_v) if v_hit else 0),)
                else:
                    tau, settled, open_ks = summ
                    if w_hit:
                        tau = min(tau, min(ends_w))
                    ks = open_ks + (tuple(ends_v) if v_hit else ())
                    safe = min(tau, pend_w[j])
                    settled += sum(1 for k in ks if k <= safe)
                    open_ks = tuple(sorted(k for k in ks if safe < k <= tau))
                    new = (tau, settled, open_ks)
                nxt[(window[-keep:] if keep else (), new)] += pr
        states = nxt
        peak = max(peak, len(states))
        if len(states) > budget.max_states:
            raise CapabilityError(
                f"exact enumeration needs more than {budget.max_states} live states "
                f"(trajectory length L={L}); raise the budget or shrink the instance"
            )
        prev_pos = p

    table = np.zeros(N + 1)
    censored = 0.0
    for (_, summ), prob in states.items():
        if not geometric:
            table[summ[0]] += prob
        else:
            tau, settled, open_ks = summ
            table[settled + sum(1 for k in open_ks if k <= tau)] += prob
            if tau == N + 1:
                censored += prob
    law = DiscreteLaw.explicit(table, tail_mass=pruned)
    return ExactResult(law, censored, pruned, L, peak)


def exact_tv(
    model: ProcessModel,
    V: TargetSet,
    W: TargetSet | None,
    schedule: Schedule,
    N: int,
    law: Distribution,
    budget: EnumerationBudget | None = None,
) -> float:
    return tv_distance(exact_distribution(model, V, W, schedule, N, budget).law, law)


def estimated_work(model: ProcessModel, V: TargetSet, W: TargetSet | None, schedule: Schedule, N: int) -> float:
    """Rough node-visit count, used to decide whether an automatic exact run is cheap."""
    w = max(V.length, 0 if W is None else W.length)
    keep = max(w - 1, 0 if model.is_iid else 1)
    return float(N * w) * model.size ** (keep + 1) * min(N + 1, 64)
