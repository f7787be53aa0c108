"""Poisson and geometric reference laws, their parameters, and total variation."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Mapping, Union

import numpy as np
from scipy import stats

from mixret.counting import EmpiricalDistribution
from mixret.errors import InputError

POISSON = "poisson"
GEOMETRIC = "geometric"
EXPLICIT = "explicit"

TAIL_EPS = 1e-12
MAX_SUPPORT = 10**6

# the count parameter uses N * P(V); see the README note on the exponent
LAMBDA_NOTE = "lambda_N = N * P(V) (exponent l = 1 in N * P(V)^l)"


@dataclass(frozen=True, eq=False)
class DiscreteLaw:
    kind: str
    param: float | None = None
    table: np.ndarray | None = None
    tail_mass: float = 0.0

    @classmethod
    def poisson(cls, lam: float) -> "DiscreteLaw":
        if not lam > 0:
            raise InputError(f"Poisson parameter must be positive, got {lam}")
        return cls(POISSON, float(lam))

    @classmethod
    def geometric(cls, rho: float) -> "DiscreteLaw":
        if not 0 < rho < 1:
            raise InputError(f"geometric parameter must lie in (0, 1), got {rho}")
        return cls(GEOMETRIC, float(rho))

    @classmethod
    def explicit(cls, pmf: Mapping[int, float] | np.ndarray | list, tail_mass: float = 0.0) -> "DiscreteLaw":
        if isinstance(pmf, Mapping):
            size = max(pmf) + 1 if pmf else 1
            table = np.zeros(size)
            for k, p in pmf.items():
                if k < 0:
                    raise InputError("explicit laws live on the nonnegative integers")
                table[k] = p
        else:
            table = np.asarray(pmf, dtype=float).copy()
        if np.any(table < 0):
            raise InputError("pmf entries must be nonnegative")
        total = table.sum() + tail_mass
        if abs(total - 1.0) > 1e-10:
            raise InputError(f"explicit pmf sums to {total!r}")
        table.setflags(write=False)
        return cls(EXPLICIT, None, table, float(tail_mass))

    @classmethod
    def binomial(cls, n: int, p: float) -> "DiscreteLaw":
        return cls.explicit(stats.binom.pmf(np.arange(n + 1), n, p))

    @classmethod
    def from_empirical(cls, emp: EmpiricalDistribution) -> "DiscreteLaw":
        table = np.zeros(emp.support_max + 1)
        for k, c in emp.counts.items():
            table[k] = c / emp.M
        return cls(EXPLICIT, None, table, 0.0)

    def truncation_point(self) -> int:
        """Smallest k whose upper tail P(X > k) is below TAIL_EPS, capped at MAX_SUPPORT."""
        if self.kind == EXPLICIT:
            return len(self.table) - 1
        if self.kind == POISSON:
            k = int(stats.poisson.isf(TAIL_EPS, self.param))
            while k > 0 and stats.poisson.sf(k - 1, self.param) < TAIL_EPS:
                k -= 1
            while stats.poisson.sf(k, self.param) >= TAIL_EPS:
                k += 1
            return min(k, MAX_SUPPORT)
        # P(X > k) = (1 - rho)^(k + 1)
        k = math.ceil(math.log(TAIL_EPS) / math.log1p(-self.param)) - 1
        return min(max(k, 0), MAX_SUPPORT)

    def pmf_array(self, upto: int) -> np.ndarray:
        k = np.arange(upto + 1)
        if self.kind == POISSON:
            return stats.poisson.pmf(k, self.param)
        if self.kind == GEOMETRIC:
            return np.exp(math.log(self.param) + k * math.log1p(-self.param))
        out = np.zeros(upto + 1)
        m = min(len(self.table), upto + 1)
        out[:m] = self.table[:m]
        return out

    def describe(self) -> dict:
        if self.kind == EXPLICIT:
            return {"kind": EXPLICIT, "pmf": [float(x) for x in self.table], "tail_mass": self.tail_mass}
        return {"kind": self.kind, "param": self.param}


def law_pmf(law: DiscreteLaw, k: int) -> float:
    if k < 0:
        raise InputError("pmf is defined for k >= 0")
    if law.kind == POISSON:
        lam = law.param
        return math.exp(-lam + k * math.log(lam) - math.lgamma(k + 1))
    if law.kind == GEOMETRIC:
        return math.exp(math.log(law.param) + k * math.log1p(-law.param))
    return float(law.table[k]) if k < len(law.table) else 0.0


Distribution = Union[DiscreteLaw, EmpiricalDistribution]


def _as_law(d: Distribution) -> DiscreteLaw:
    return DiscreteLaw.from_empirical(d) if isinstance(d, EmpiricalDistribution) else d


def tv_distance_with_tail(a: Distribution, b: Distribution) -> tuple[float, float]:
    """Half the l1 distance over a common truncated support, and the tail uncertainty."""
    la, lb = _as_law(a), _as_law(b)
    K = max(la.truncation_point(), lb.truncation_point())
    pa, pb = la.pmf_array(K), lb.pmf_array(K)
    value = 0.5 * float(np.abs(pa - pb).sum())
    tail_a = max(0.0, 1.0 - float(pa.sum())) if la.kind != EXPLICIT else la.tail_mass
    tail_b = max(0.0, 1.0 - float(pb.sum())) if lb.kind != EXPLICIT else lb.tail_mass
    return min(1.0, value), 0.5 * (tail_a + tail_b)


def tv_distance(a: Distribution, b: Distribution) -> float:
    return tv_distance_with_tail(a, b)[0]


@dataclass(frozen=True)
class LimitParams:
    lam: float
    rho: float | None = None
    varrho: float | None = None

    def to_dict(self) -> dict:
        return {"lambda": self.lam, "rho": self.rho, "varrho": self.varrho, "lambda_note": LAMBDA_NOTE}


def limit_params(pV: float, pW: float | None, N: int) -> LimitParams:
    if not 0 < pV < 1:
        raise InputError(f"P(V) must lie in (0, 1), got {pV}")
    if N < 1:
        raise InputError(f"N must be >= 1, got {N}")
    lam = N * pV
    if pW is None:
        return LimitParams(lam)
    if not 0 < pW < 1:
        raise InputError(f"P(W) must lie in (0, 1), got {pW}")
    rho = pW / (pV + pW)
    varrho = pW / (pW + pV * (1 - pW))
    return LimitParams(lam, rho, varrho)
