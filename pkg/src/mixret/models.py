"""Stationary finite-alphabet sources: sampling, cylinder probabilities, mixing coefficients."""

from __future__ import annotations

import itertools
import logging
import math
from dataclasses import dataclass, field
from typing import TYPE_CHECKING, Callable, Iterator, Sequence

import numpy as np
from scipy.sparse.csgraph import connected_components

from mixret import rng
from mixret.errors import CapabilityError, InputError

if TYPE_CHECKING:
    from mixret.cylinders import TargetSet

log = logging.getLogger(__name__)

IID = "iid"
MARKOV = "markov"

# subset enumeration in alpha_coefficient is 2^|A|
ALPHA_MAX_SYMBOLS = 20


@dataclass(frozen=True)
class Alphabet:
    symbols: tuple[str, ...]

    def __post_init__(self):
        syms = tuple(str(s) for s in self.symbols)
        object.__setattr__(self, "symbols", syms)
        if len(syms) < 2:
            raise InputError("alphabet must have at least two symbols")
        if len(set(syms)) != len(syms):
            raise InputError(f"alphabet symbols are not distinct: {syms}")
        if len(syms) > 127:
            raise CapabilityError("alphabets are limited to 127 symbols")

    def __len__(self) -> int:
        return len(self.symbols)

    def index(self, symbol: str) -> int:
        try:
            return self.symbols.index(symbol)
        except ValueError:
            raise InputError(f"unknown symbol {symbol!r} for alphabet {self.symbols}") from None

    def encode(self, word: Sequence[str]) -> tuple[int, ...]:
        return tuple(self.index(s) for s in word)

    @property
    def needs_separator(self) -> bool:
        return any(len(s) != 1 for s in self.symbols)


def _stationary(transition: np.ndarray) -> np.ndarray:
    k = transition.shape[0]
    ncomp, _ = connected_components(transition > 0, directed=True, connection="strong")
    if ncomp != 1:
        raise InputError("transition matrix is not irreducible; stationary vector is not unique")
    a = np.vstack([transition.T - np.eye(k), np.ones((1, k))])
    b = np.zeros(k + 1)
    b[-1] = 1.0
    pi, *_ = np.linalg.lstsq(a, b, rcond=None)
    if np.max(np.abs(pi @ transition - pi)) > 1e-10:
        raise InputError("failed to solve for the stationary vector")
    return pi


@dataclass(frozen=True, eq=False)
class ProcessModel:
    """An i.i.d. or stationary Markov source over a finite alphabet.

    Build instances with :meth:`iid` or :meth:`markov`.
    """

    alphabet: Alphabet
    kind: str
    probs: np.ndarray | None = None
    transition: np.ndarray | None = None
    stationary: np.ndarray = field(default=None)
    _powers: dict = field(default_factory=dict, repr=False)

    @classmethod
    def iid(cls, symbols: Sequence[str], probs: Sequence[float]) -> "ProcessModel":
        alphabet = symbols if isinstance(symbols, Alphabet) else Alphabet(tuple(symbols))
        p = np.asarray(probs, dtype=float)
        if p.shape != (len(alphabet),):
            raise InputError(f"expected {len(alphabet)} probabilities, got shape {p.shape}")
        if abs(p.sum() - 1.0) > 1e-12:
            raise InputError(f"probabilities sum to {p.sum()!r}, not 1")
        if np.any(p <= 0):
            raise InputError("every symbol probability must be positive")
        p.setflags(write=False)
        return cls(alphabet, IID, probs=p, stationary=p)

    @classmethod
    def markov(cls, symbols: Sequence[str], transition) -> "ProcessModel":
        alphabet = symbols if isinstance(symbols, Alphabet) else Alphabet(tuple(symbols))
        t = np.asarray(transition, dtype=float)
        k = len(alphabet)
        if t.shape != (k, k):
            raise InputError(f"transition must be {k}x{k}, got {t.shape}")
        if np.any(t < 0):
            raise InputError("transition entries must be nonnegative")
        if np.max(np.abs(t.sum(axis=1) - 1.0)) > 1e-12:
            raise InputError("transition rows must sum to 1")
        pi = _stationary(t)
        if np.any(pi <= 0):
            raise InputError("stationary distribution has a zero entry")
        t.setflags(write=False)
        pi.setflags(write=False)
        return cls(alphabet, MARKOV, transition=t, stationary=pi)

    @property
    def size(self) -> int:
        return len(self.alphabet)

    @property
    def is_iid(self) -> bool:
        return self.kind == IID

    def transition_power(self, n: int) -> np.ndarray:
        """``transition ** n`` via memoized repeated squaring."""
        if self.is_iid:
            return np.tile(self.probs, (self.size, 1))
        if n == 0:
            return np.eye(self.size)
        result = None
        bit = 0
        while n >> bit:
            if (n >> bit) & 1:
                p2 = self._power_of_two(bit)
                result = p2 if result is None else _renormalize(result @ p2)
            bit += 1
        return result

    def _power_of_two(self, bit: int) -> np.ndarray:
        cached = self._powers.get(bit)
        if cached is None:
            if bit == 0:
                cached = np.array(self.transition)
            else:
                half = self._power_of_two(bit - 1)
                cached = _renormalize(half @ half)
            self._powers[bit] = cached
        return cached

    def word_prob(self, word: Sequence[int]) -> float:
        if self.is_iid:
            return float(np.prod(self.probs[list(word)]))
        p = float(self.stationary[word[0]])
        for a, b in zip(word, word[1:]):
            p *= self.transition[a, b]
        return p

    def to_dict(self) -> dict:
        d = {"alphabet": list(self.alphabet.symbols), "kind": self.kind}
        if self.is_iid:
            d["probs"] = [float(x) for x in self.probs]
        else:
            d["transition"] = [[float(x) for x in row] for row in self.transition]
        return d


def _renormalize(m: np.ndarray) -> np.ndarray:
    sums = m.sum(axis=1)
    if np.max(np.abs(sums - 1.0)) > 1e-12:
        m = m / sums[:, None]
    return m


def target_prob(model: ProcessModel, target: "TargetSet") -> float:
    """Exact probability of a union of equal-length cylinders."""
    if target is None or len(target.words) == 0:
        return 0.0
    if target.length == 0:
        return 1.0
    return float(sum(model.word_prob(model.alphabet.encode(w)) for w in target.words))


class SymbolStream:
    """Deterministic stream of symbol indices ``omega_0, omega_1, ...``."""

    def __init__(self, model: ProcessModel, seed: int):
        self.model = model
        self.seed = rng.as_seed(seed)
        self.position = 0
        self._state = -1
        if model.is_iid:
            self._cdf = np.cumsum(model.probs)[:-1]
        else:
            self._cdf0 = np.cumsum(model.stationary)[:-1]
            self._cdf_rows = np.cumsum(model.transition, axis=1)[:, :-1]

    def take(self, count: int) -> np.ndarray:
        pos = np.arange(self.position, self.position + count, dtype=np.uint64)
        u = rng.uniforms(np.array([self.seed]), pos)[0]
        self.position += count
        if self.model.is_iid:
            return np.searchsorted(self._cdf, u, side="right").astype(np.int8)
        out = np.empty(count, dtype=np.int8)
        state = self._state
        for i, ui in enumerate(u):
            cdf = self._cdf0 if state < 0 else self._cdf_rows[state]
            state = int(np.searchsorted(cdf, ui, side="right"))
            out[i] = state
        self._state = state
        return out

    def __iter__(self) -> Iterator[int]:
        while True:
            yield from (int(x) for x in self.take(4096))


def sample_stream(model: ProcessModel, seed: int) -> SymbolStream:
    return SymbolStream(model, seed)


def phi_coefficient(model: ProcessModel, n: int) -> float:
    """phi(n) = max over states of TV(transition^n(a, .), stationary); 0 for i.i.d."""
    if n < 1:
        raise InputError("phi coefficient needs n >= 1")
    if model.is_iid:
        return 0.0
    pn = model.transition_power(n)
    tv = 0.5 * np.abs(pn - model.stationary[None, :]).sum(axis=1)
    return float(min(1.0, tv[model.stationary > 0].max()))


def alpha_coefficient(model: ProcessModel, n: int) -> float:
    """alpha(n) for the stationary chain, exact by enumerating row subsets."""
    if n < 1:
        raise InputError("alpha coefficient needs n >= 1")
    if model.is_iid:
        return 0.0
    k = model.size
    if k > ALPHA_MAX_SYMBOLS:
        raise CapabilityError(
            f"alpha coefficient enumerates 2^{k} subsets; use phi_coefficient as an upper bound (alpha <= phi)"
        )
    pi = model.stationary
    dev = pi[:, None] * (model.transition_power(n) - pi[None, :])
    best = 0.0
    for mask in range(1, 1 << k):
        rows = [a for a in range(k) if mask >> a & 1]
        col = dev[rows].sum(axis=0)
        best = max(best, col[col > 0].sum(), -col[col < 0].sum())
    return float(best)


def max_cylinder_prob(model: ProcessModel, n: int) -> tuple[float, float]:
    """Largest n-cylinder probability and the exponent ``-ln(p) / n``."""
    if n < 1:
        raise InputError("cylinder length must be >= 1")
    if model.is_iid:
        logp = n * math.log(model.probs.max())
    else:
        with np.errstate(divide="ignore"):
            logt = np.log(model.transition)
            best = np.log(model.stationary)
        for _ in range(n - 1):
            best = np.max(best[:, None] + logt, axis=0)
        logp = float(best.max())
    return math.exp(logp), -logp / n


def all_words(size: int, n: int) -> Iterator[tuple[int, ...]]:
    return itertools.product(range(size), repeat=n)


class MixingProfile:
    """Evaluable phi(n), n >= 1, either exact from a model or user supplied.

    User-supplied decays are clamped to [0, 1] and made nonincreasing by a
    running minimum; a warning is logged whenever that changes a value.
    """

    def __init__(self, func: Callable[[int], float], source: str, model: ProcessModel | None = None):
        self._func = func
        self.source = source
        self.model = model
        self._memo: list[float] = []
        self._warned = False

    @classmethod
    def from_model(cls, model: ProcessModel) -> "MixingProfile":
        return cls(lambda n: phi_coefficient(model, n), "exact-from-model", model)

    @classmethod
    def from_values(cls, values: Sequence[float], tail: float | None = None) -> "MixingProfile":
        """phi(1..len(values)) from ``values``; beyond that ``tail`` (default: the last value)."""
        vals = [float(v) for v in values]
        if not vals:
            raise InputError("mixing profile needs at least one value")
        rest = vals[-1] if tail is None else float(tail)
        return cls(lambda n: vals[n - 1] if n <= len(vals) else rest, "user-supplied-decay")

    @classmethod
    def from_function(cls, func: Callable[[int], float]) -> "MixingProfile":
        return cls(func, "user-supplied-decay")

    @classmethod
    def zero(cls) -> "MixingProfile":
        return cls(lambda n: 0.0, "user-supplied-decay")

    def __call__(self, n: int) -> float:
        if n < 1:
            raise InputError(f"phi is defined for n >= 1, got {n}")
        while len(self._memo) < n:
            k = len(self._memo) + 1
            raw = float(self._func(k))
            v = min(1.0, max(0.0, raw))
            if self._memo:
                v = min(v, self._memo[-1])
            if v != raw and self.source != "exact-from-model" and not self._warned:
                log.warning("mixing profile modified at n=%d (%.6g -> %.6g) to stay in [0,1] and nonincreasing", k, raw, v)
                self._warned = True
            self._memo.append(v)
        return self._memo[n - 1]
