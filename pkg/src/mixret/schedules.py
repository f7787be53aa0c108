"""Return-time schedules q_N(k) and their multiplicity audit."""

from __future__ import annotations

import csv
import math
from collections import Counter
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterator, Sequence

import numpy as np

from mixret.errors import CapabilityError, InputError

LINEAR = "linear"
POLYNOMIAL = "polynomial"
BILINEAR = "bilinear"
TABLE = "table"

G_FORMS = ("0", "N", "sqrt", "half")

# positions are handled as int64 and shifted by window lengths downstream
MAX_VALUE = 2**62


def _g(form: str, N: int) -> int:
    if form == "0":
        return 0
    if form == "N":
        return N
    if form == "sqrt":
        return math.isqrt(N)
    if form == "half":
        return N // 2
    raise InputError(f"unknown g(N) form {form!r}; expected one of {G_FORMS}")


@dataclass(frozen=True)
class Schedule:
    """A family of return times ``q_N(k)``, ``0 <= k <= N``.

    kinds:
      * ``linear``: ``k + offset``
      * ``polynomial``: ``r(k) + g(N)`` with integer coefficients of ``r``
        in ascending order and ``g`` one of ``0, N, sqrt, half``
      * ``bilinear``: ``k (N - k)``
      * ``table``: explicit arrays per N
    """

    kind: str
    offset: int = 0
    coeffs: tuple[int, ...] = ()
    g: str = "0"
    table: dict[int, dict[int, int]] = field(default_factory=dict, compare=False)
    name: str = ""

    def __post_init__(self):
        if self.kind not in (LINEAR, POLYNOMIAL, BILINEAR, TABLE):
            raise InputError(f"unknown schedule kind {self.kind!r}")
        if self.kind == LINEAR and self.offset < 0:
            raise InputError("linear schedule offset must be nonnegative")
        if self.kind == POLYNOMIAL:
            coeffs = tuple(int(c) for c in self.coeffs)
            if any(c != orig for c, orig in zip(coeffs, self.coeffs)):
                raise InputError("polynomial coefficients must be integers")
            while len(coeffs) > 1 and coeffs[-1] == 0:
                coeffs = coeffs[:-1]
            if len(coeffs) < 2:
                raise InputError("r must be a nonconstant polynomial")
            object.__setattr__(self, "coeffs", coeffs)
            _g(self.g, 1)
        if not self.name:
            object.__setattr__(self, "name", self._default_name())

    @classmethod
    def linear(cls, offset: int = 0) -> "Schedule":
        return cls(LINEAR, offset=offset)

    @classmethod
    def polynomial(cls, coeffs: Sequence[int], g: str = "0") -> "Schedule":
        return cls(POLYNOMIAL, coeffs=tuple(coeffs), g=g)

    @classmethod
    def bilinear(cls) -> "Schedule":
        return cls(BILINEAR)

    @classmethod
    def from_table(cls, table: dict[int, Sequence[int] | dict[int, int]], name: str = "table") -> "Schedule":
        """``table[N]`` is either a dict ``k -> q`` or a list indexed by k from 0."""
        norm = {}
        for N, vals in table.items():
            entries = dict(vals) if isinstance(vals, dict) else dict(enumerate(vals))
            norm[int(N)] = {int(k): int(q) for k, q in entries.items()}
            if any(q < 0 for q in norm[int(N)].values()):
                raise InputError(f"table schedule has negative values at N={N}")
        return cls(TABLE, table=norm, name=name)

    @classmethod
    def load_csv(cls, paths: dict[int, str | Path]) -> "Schedule":
        """One two-column ``k,q`` CSV file per N; a header row is optional."""
        table = {}
        for N, path in paths.items():
            rows = {}
            with open(path, newline="") as fh:
                for row in csv.reader(fh):
                    if not row or row[0].strip().startswith("#"):
                        continue
                    try:
                        rows[int(row[0])] = int(row[1])
                    except ValueError:
                        if rows:
                            raise InputError(f"bad schedule row {row!r} in {path}") from None
            table[int(N)] = rows
        return cls.from_table(table, name="table")

    def write_csv(self, N: int, path: str | Path) -> None:
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["k", "q"])
            for k in range(0, N + 1):
                if self.kind != TABLE or k in self.table.get(N, {}):
                    w.writerow([k, eval_schedule(self, N, k)])

    def _default_name(self) -> str:
        if self.kind == LINEAR:
            return f"k+{self.offset}" if self.offset else "k"
        if self.kind == POLYNOMIAL:
            terms = [f"{c}*k^{i}" for i, c in enumerate(self.coeffs) if c]
            return "+".join(terms) + ("" if self.g == "0" else f"+g_{self.g}(N)")
        if self.kind == BILINEAR:
            return "k(N-k)"
        return "table"

    def to_dict(self) -> dict:
        d: dict = {"kind": self.kind, "name": self.name}
        if self.kind == LINEAR:
            d["offset"] = self.offset
        elif self.kind == POLYNOMIAL:
            d["coeffs"] = list(self.coeffs)
            d["g"] = self.g
        elif self.kind == TABLE:
            d["table"] = {str(N): {str(k): q for k, q in sorted(v.items())} for N, v in sorted(self.table.items())}
        return d

    def _raw(self, N: int, k: int) -> int:
        if self.kind == LINEAR:
            return k + self.offset
        if self.kind == POLYNOMIAL:
            val = 0
            for c in reversed(self.coeffs):
                val = val * k + c
            return val + _g(self.g, N)
        if self.kind == BILINEAR:
            return k * (N - k)
        try:
            return self.table[N][k]
        except KeyError:
            raise InputError(f"table schedule has no value for N={N}, k={k}") from None

    def domain(self, N: int) -> list[int]:
        """k values in [0, N] at which the schedule is defined."""
        if self.kind == TABLE:
            if N not in self.table:
                raise InputError(f"table schedule has no entries for N={N}")
            return sorted(k for k in self.table[N] if 0 <= k <= N)
        return list(range(N + 1))


def eval_schedule(s: Schedule, N: int, k: int) -> int:
    if N < 1:
        raise InputError(f"N must be >= 1, got {N}")
    if not 0 <= k <= N:
        raise InputError(f"k={k} outside [0, {N}]")
    val = s._raw(N, k)
    if val < 0:
        raise InputError(f"schedule {s.name} is negative at N={N}, k={k}")
    if val >= MAX_VALUE:
        raise CapabilityError(f"schedule {s.name} overflows at N={N}, k={k}")
    return val


def positions(s: Schedule, N: int) -> np.ndarray:
    """``q_N(k)`` for k = 1..N as an int64 array (index 0 holds k = 1)."""
    return np.array([eval_schedule(s, N, k) for k in range(1, N + 1)], dtype=np.int64)


def delta(s: Schedule, N: int, k: int, l: int) -> int:
    return abs(eval_schedule(s, N, k) - eval_schedule(s, N, l))


@dataclass(frozen=True)
class ScheduleAudit:
    N: int
    K1: int
    K2: int
    monotone_tail_n0: int | None


@dataclass
class AuditReport:
    """Per-N audits plus the heuristic verdict; iterates like a list of audits."""

    audits: list[ScheduleAudit]
    verdict: str
    K: int
    growth: dict[str, bool]

    def __iter__(self) -> Iterator[ScheduleAudit]:
        return iter(self.audits)

    def __len__(self) -> int:
        return len(self.audits)

    def __getitem__(self, i) -> ScheduleAudit:
        return self.audits[i]

    @property
    def passed(self) -> bool:
        return self.verdict == "pass"

    def to_dict(self) -> dict:
        return {
            "verdict": self.verdict,
            "K": self.K,
            "growth": self.growth,
            "audits": [a.__dict__ for a in self.audits],
        }


def _audit_one(s: Schedule, N: int) -> ScheduleAudit:
    ks = s.domain(N)
    qs = [eval_schedule(s, N, k) for k in ks]
    counts = Counter(qs)
    K1 = max(counts.values())
    K2 = sum(c * (c - 1) for c in counts.values())
    n0 = None
    if qs:
        i = len(qs) - 1
        while i > 0 and qs[i - 1] < qs[i]:
            i -= 1
        n0 = ks[i]
    return ScheduleAudit(N, K1, K2, n0)


def audit_schedule(s: Schedule, Ns: Sequence[int]) -> AuditReport:
    """Exact multiplicity counts per N and a pass/fail verdict on their growth.

    The verdict can only sample finitely many N: growth is flagged when a count
    at the largest N exceeds twice the count at the smallest N plus 4.
    """
    Ns = sorted(set(int(N) for N in Ns))
    if not Ns or Ns[0] < 1:
        raise InputError("audit needs at least one N >= 1")
    audits = [_audit_one(s, N) for N in Ns]
    lo, hi = audits[0], audits[-1]
    growth = {
        "K1": hi.K1 > 2 * lo.K1 + 4,
        "K2": hi.K2 > 2 * lo.K2 + 4,
    }
    K = max(max(a.K1, a.K2) for a in audits)
    return AuditReport(audits, "fail" if any(growth.values()) else "pass", max(K, 1), growth)
