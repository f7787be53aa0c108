"""Explicit total-variation error bounds with proof-level constants.

``poisson_bound`` bounds d_TV(L(S_N), Pois(N P(V))) by ``b1 + b2 + b3``;
``geometric_bound`` bounds d_TV(L(Sigma_N), Geo(rho)) by the censoring term,
the coupling term ``2 P(W)`` and twice the Chen–Stein distance ``D``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from mixret.cylinders import TargetSet, are_disjoint, return_floors, self_overlap_pi, shift_target
from mixret.errors import CapabilityError, InputError, PreconditionError
from mixret.models import MixingProfile, ProcessModel, max_cylinder_prob, target_prob

SuffixProb = Callable[[int], float]

# linear scan for M_N stops here
MAX_MN = 10**6

GEOMETRIC_NOTE = (
    "correlation sum taken over r = kappa..R with phi(floor(r/2)+1) (resp. phi(r-max(n,m)+1)); "
    "the shorter headline sum over r < max(n,m) with phi(r) is not used"
)


@dataclass
class BoundReport:
    mode: str
    R: int
    K: int
    terms: dict[str, float]
    total: float
    vacuous: bool
    notes: list[str] = field(default_factory=list)

    def to_dict(self) -> dict:
        return {
            "mode": self.mode,
            "R": self.R,
            "K": self.K,
            "terms": dict(self.terms),
            "total": self.total,
            "vacuous": self.vacuous,
            "notes": list(self.notes),
        }


@dataclass(frozen=True)
class MNRecord:
    epsilon: float
    M_N: int
    R: int
    phi: MixingProfile = field(repr=False, compare=False)

    def gamma(self, n: int) -> float:
        return n * self.phi(n)


def _mn(phi: MixingProfile, N: int, epsilon: float) -> int:
    for n in range(1, MAX_MN + 1):
        g = n * phi(n)
        if g == 0.0 or n / g**epsilon >= N:
            return n
    raise CapabilityError(f"M_N exceeds {MAX_MN}; the mixing profile decays too slowly for N={N}")


def choose_R(phi: MixingProfile, N: int, window: int, epsilon: float = 0.5) -> MNRecord:
    """``R = M_N + window`` with ``M_N = min{n >= 1 : n / gamma(n)^eps >= N}`` and n/0 = inf."""
    if N < 1 or window < 1:
        raise InputError("choose_R needs N >= 1 and window >= 1")
    if not 0 < epsilon < 1:
        raise InputError(f"epsilon must lie in (0, 1), got {epsilon}")
    m = _mn(phi, N, epsilon)
    return MNRecord(epsilon, m, m + window, phi)


def _suffix_term(suffix: SuffixProb, length: int, p: float, r: int) -> float:
    """P(T^{n - floor(r/2)} U) below the window length, P(U) at or above it."""
    if r < length:
        return suffix(length - r // 2)
    return p


def poisson_bound(
    pV: float,
    suffixprob: SuffixProb,
    phi: MixingProfile,
    piV: int,
    n: int,
    N: int,
    R: int,
    K: int,
) -> BoundReport:
    if R <= n:
        raise InputError(f"R={R} must exceed the window length n={n}")
    if piV < 1 or K < 1:
        raise InputError("need pi(V) >= 1 and K >= 1")
    b1 = 2 * K * R * N * pV**2
    total_r = 0.0
    for r in range(piV, R + 1):
        if r < n:
            total_r += phi(r // 2 + 1) + suffixprob(n - r // 2)
        else:
            total_r += phi(r - n + 1) + pV
    b2 = 4 * K * N * pV * total_r
    b3 = 3 * N * phi(R - n)
    total = b1 + b2 + b3
    return BoundReport("poisson", R, K, {"b1": b1, "b2": b2, "b3": b3}, total, total >= 1)


def geometric_bound(
    pV: float,
    pW: float,
    suffixV: SuffixProb,
    suffixW: SuffixProb,
    phi: MixingProfile,
    kappa: int,
    n: int,
    m: int,
    N: int,
    R: int,
    K: int,
    disjoint: bool = True,
) -> BoundReport:
    if not disjoint:
        raise PreconditionError("the geometric bound holds for any disjoint sets V, W; these targets intersect")
    w = max(n, m)
    if R <= w:
        raise InputError(f"R={R} must exceed max(n, m)={w}")
    if kappa < 1 or K < 1:
        raise InputError("need kappa >= 1 and K >= 1")
    sq = pV**2 + pW**2
    b1 = 6 * K * R * N * sq
    total_r = 0.0
    for r in range(kappa, R + 1):
        phi_part = phi(r // 2 + 1) if r < w else phi(r - w + 1)
        total_r += phi_part + _suffix_term(suffixV, n, pV, r) + _suffix_term(suffixW, m, pW, r)
    b2 = 4 * K * N * (pV + pW) * total_r
    b3 = 6 * N * phi(R - w)
    psq = 2 * N * sq
    D = 2 * b1 + 2 * b2 + b3 + psq
    a_censor = 2 * (1 - pW) ** N
    a4 = 2 * pW
    total = a_censor + a4 + 2 * D
    terms = {"b1": b1, "b2": b2, "b3": b3, "psq": psq, "D": D, "A_censor": a_censor, "A4": a4}
    return BoundReport("geometric", R, K, terms, total, total >= 1, [GEOMETRIC_NOTE])


def suffix_probabilities(model: ProcessModel, U: TargetSet) -> SuffixProb:
    """``s -> P(T^s U)`` with shifts beyond the word length meaning the whole space."""
    cache: dict[int, float] = {}

    def f(s: int) -> float:
        s = min(s, U.length)
        if s not in cache:
            cache[s] = target_prob(model, shift_target(U, s))
        return cache[s]

    return f


def poisson_bound_for(
    model: ProcessModel, V: TargetSet, phi: MixingProfile, N: int, K: int, epsilon: float = 0.5
) -> tuple[BoundReport, MNRecord]:
    rec = choose_R(phi, N, V.length, epsilon)
    rep = poisson_bound(
        target_prob(model, V), suffix_probabilities(model, V), phi, self_overlap_pi(V), V.length, N, rec.R, K
    )
    return rep, rec


def geometric_bound_for(
    model: ProcessModel,
    V: TargetSet,
    W: TargetSet,
    phi: MixingProfile,
    N: int,
    K: int,
    epsilon: float = 0.5,
) -> tuple[BoundReport, MNRecord]:
    rec = choose_R(phi, N, max(V.length, W.length), epsilon)
    rep = geometric_bound(
        target_prob(model, V),
        target_prob(model, W),
        suffix_probabilities(model, V),
        suffix_probabilities(model, W),
        phi,
        return_floors(V, W).kappa,
        V.length,
        W.length,
        N,
        rec.R,
        K,
        disjoint=are_disjoint(V, W),
    )
    return rep, rec


# required limit behaviour of each condition column
_TO_ZERO = "->0"
_TO_INF = "->inf"
_BOUNDED = "bounded"

POISSON_COLUMNS = {
    "n_pV": _TO_ZERO,
    "suffix_sum": _TO_ZERO,
    "pi_V": _TO_INF,
    "lambda": _BOUNDED,
}
GEOMETRIC_COLUMNS = {
    "w_psum": _TO_ZERO,
    "kappa": _TO_INF,
    "alpha_L": _TO_ZERO,
    "ratio_pV_pW": _BOUNDED,
    "N_pW": _TO_INF,
    "N_term": _TO_ZERO,
    "gap14": _TO_INF,
    "gap15": _TO_INF,
}


def trend(values: Sequence[float]) -> str:
    v = np.asarray([x for x in values if x is not None], dtype=float)
    if len(v) < 2:
        return "constant"
    d = np.diff(v)
    if np.all(d == 0):
        return "constant"
    if np.all(d <= 0):
        return "decreasing"
    if np.all(d >= 0):
        return "increasing"
    slope = np.polyfit(np.arange(len(v)), v, 1)[0]
    return "mixed-decreasing" if slope < 0 else "mixed-increasing"


def _verdict(direction: str, required: str) -> str:
    if required == _BOUNDED:
        return "ok"
    want = "decreasing" if required == _TO_ZERO else "increasing"
    if direction == want:
        return "ok"
    if direction == "mixed-" + want:
        return "weak"
    return "violated"


@dataclass
class ConditionTable:
    mode: str
    rows: list[dict]
    trends: dict[str, str]
    verdicts: dict[str, str]

    def to_dict(self) -> dict:
        return {"mode": self.mode, "rows": self.rows, "trends": self.trends, "verdicts": self.verdicts}


def _upsilon(model: ProcessModel, upto: int) -> float:
    return min(max_cylinder_prob(model, k)[1] for k in range(1, upto + 1))


def corollary_conditions(
    family: Sequence[dict],
    model: ProcessModel,
    phi: MixingProfile,
    epsilon: float = 0.5,
) -> ConditionTable:
    """Evaluate every limit condition per family member and report trends.

    ``family`` entries are dicts with keys ``V``, ``N`` and optionally ``W``.
    """
    if not family:
        raise InputError("empty family")
    geometric = family[0].get("W") is not None
    rows = []
    for i, member in enumerate(family):
        V, W, N = member["V"], member.get("W"), int(member["N"])
        if (W is not None) != geometric:
            raise InputError("family mixes Poisson and geometric members")
        pV = target_prob(model, V)
        sV = suffix_probabilities(model, V)
        n = V.length
        row: dict = {"L": member.get("L", i), "n": n, "N": N, "pV": pV}
        if not geometric:
            piV = self_overlap_pi(V)
            row.update(
                n_pV=n * pV,
                pi_V=piV,
                suffix_sum=sum(sV(n - r) for r in range(piV, n)),
                **{"lambda": N * pV},
            )
        else:
            m = W.length
            w = max(n, m)
            pW = target_prob(model, W)
            sW = suffix_probabilities(model, W)
            kappa = return_floors(V, W).kappa
            alpha_L = sum(sV(w - r) + sW(w - r) for r in range(kappa, w))
            mn = _mn(phi, N, epsilon)
            lo = min(n, m)
            ups = _upsilon(model, w)
            row.update(
                m=m,
                pW=pW,
                w_psum=w * (pV + pW),
                kappa=kappa,
                alpha_L=alpha_L,
                ratio_pV_pW=pV / pW,
                N_pW=N * pW,
                M_N=mn,
                N_term=N * (mn + w + alpha_L) * pW**2,
                gap14=lo + kappa - w,
                gap15=2 * lo - w - 3 * ups * math.log(lo),
            )
        rows.append(row)
    columns = GEOMETRIC_COLUMNS if geometric else POISSON_COLUMNS
    trends = {c: trend([r[c] for r in rows]) for c in columns}
    verdicts = {c: _verdict(trends[c], req) for c, req in columns.items()}
    return ConditionTable("geometric" if geometric else "poisson", rows, trends, verdicts)
