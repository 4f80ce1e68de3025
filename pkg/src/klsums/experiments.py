"""Prime-ladder experiments for the square-root cancellation trends.

For a fixed (k, l) and an increasing ladder of primes, sample b-tuples with
all-distinct coordinates sitting on the generic stratum (z_count equal to
the scan maximum), record

    R_I(q)  = max_b |Sigma_I(K, b)|  / q,
    R_II(q) = max_b |Sigma_II(K, b)| / q^{3/2},

and check that neither ratio grows along the ladder beyond a noise
allowance (qmax/qmin)^0.15.  Subgeneric, non-diagonal b are sampled
separately and held against the weaker middle-stratum bounds
|Sigma_II| <= 10 q^2 and |Sigma_I| <= 10 q^{3/2}.

Sampling is deterministic: each prime uses PCG64 seeded with
(seed, q, k, l).
"""

from __future__ import annotations

from dataclasses import dataclass, field as dc_field

import numpy as np

from .chartuples import CharTuple
from .errors import DegenerateFiberError, PreconditionError
from .field import PrimeField, build_field
from .kloosterman import kl_table_fast
from .sums import sigma_II
from .strata import is_diagonal, stratum_scan, z_fiber_count

TREND_EXPONENT = 0.15
SUBGENERIC_CONSTANT = 10.0


def _rng_for(seed: int, q: int, k: int, l: int) -> np.random.Generator:
    return np.random.Generator(np.random.PCG64([seed, q, k, l]))


def generic_z_value(field: PrimeField, k: int, l: int, seed: int, samples: int = 200) -> int:
    """The generic |Z_b| for (q, k, l), i.e. the maximum over a seeded scan."""
    return stratum_scan(field, k, l, samples=samples, seed=seed).generic


def sample_generic_b(
    field: PrimeField, k: int, l: int, count: int, rng: np.random.Generator, generic: int
) -> list[np.ndarray]:
    """b with pairwise-distinct coordinates and z_count equal to the generic value."""
    out: list[np.ndarray] = []
    q = field.q
    attempts = 0
    while len(out) < count:
        attempts += 1
        if attempts > 100 * count + 1000:
            raise PreconditionError(
                f"could not sample {count} generic b at q={q}: generic stratum too thin"
            )
        b = rng.integers(0, q, size=2 * l, dtype=np.int64)
        if len(set(b.tolist())) != 2 * l:
            continue
        try:
            if z_fiber_count(field, k, b).z_count == generic:
                out.append(b)
        except DegenerateFiberError:
            continue
    return out


def sample_subgeneric_b(
    field: PrimeField, k: int, l: int, count: int, rng: np.random.Generator, generic: int
) -> list[np.ndarray]:
    """Non-diagonal b with z_count strictly below generic (one repeated pair
    forces a root collision; membership is verified, not assumed)."""
    out: list[np.ndarray] = []
    q = field.q
    attempts = 0
    while len(out) < count:
        attempts += 1
        if attempts > 100 * count + 1000:
            raise PreconditionError(
                f"could not sample {count} subgeneric b at q={q}"
            )
        b = rng.integers(0, q, size=2 * l, dtype=np.int64)
        b[1] = b[0]  # collide one pair; remaining coordinates keep it off-diagonal
        if len(set(b[1:].tolist())) != 2 * l - 1 or is_diagonal(b):
            continue
        try:
            if z_fiber_count(field, k, b).z_count < generic:
                out.append(b.copy())
        except DegenerateFiberError:
            continue
    return out


@dataclass
class PrimePoint:
    q: int
    generic_z: int
    n_generic: int
    r_I: float  # max |Sigma_I| / q over generic samples
    r_II: float  # max |Sigma_II| / q^{3/2} over generic samples
    n_subgeneric: int
    sub_max_I: float  # max |Sigma_I| / q^{3/2} over subgeneric samples
    sub_max_II: float  # max |Sigma_II| / q^2 over subgeneric samples

    def to_json(self) -> dict:
        return self.__dict__.copy()


@dataclass
class LadderReport:
    k: int
    l: int
    chars: tuple[int, ...]
    seed: int
    points: list[PrimePoint] = dc_field(default_factory=list)

    @property
    def trend_allowance(self) -> float:
        qs = [p.q for p in self.points]
        return (max(qs) / min(qs)) ** TREND_EXPONENT

    @property
    def trend_ratio_I(self) -> float:
        first, last = self.points[0], self.points[-1]
        return last.r_I / first.r_I

    @property
    def trend_ratio_II(self) -> float:
        first, last = self.points[0], self.points[-1]
        return last.r_II / first.r_II

    @property
    def trend_pass_I(self) -> bool:
        return self.trend_ratio_I <= self.trend_allowance

    @property
    def trend_pass_II(self) -> bool:
        return self.trend_ratio_II <= self.trend_allowance

    @property
    def subgeneric_pass(self) -> bool:
        return all(
            p.sub_max_I <= SUBGENERIC_CONSTANT and p.sub_max_II <= SUBGENERIC_CONSTANT
            for p in self.points
        )

    def to_json(self) -> dict:
        return {
            "k": self.k,
            "l": self.l,
            "chars": list(self.chars),
            "seed": self.seed,
            "points": [p.to_json() for p in self.points],
            "trend_allowance": self.trend_allowance,
            "trend_ratio_I": self.trend_ratio_I,
            "trend_ratio_II": self.trend_ratio_II,
            "trend_pass_I": self.trend_pass_I,
            "trend_pass_II": self.trend_pass_II,
            "subgeneric_pass": self.subgeneric_pass,
        }


def bound_ladder(
    primes: list[int],
    k: int = 2,
    l: int = 2,
    chars: tuple[int, ...] | None = None,
    samples: int = 100,
    subgeneric_samples: int = 20,
    seed: int = 0,
) -> LadderReport:
    """Run the full generic/subgeneric Sigma_I / Sigma_II ratio experiment."""
    if len(primes) < 2:
        raise PreconditionError("need at least two primes for a trend")
    if sorted(primes) != list(primes):
        raise PreconditionError("primes must be increasing")
    chars = tuple(chars) if chars is not None else (0,) * k
    if len(chars) != k:
        raise PreconditionError("need exactly k character indices")
    report = LadderReport(k=k, l=l, chars=chars, seed=seed)
    for q in primes:
        field = build_field(q)
        if (q - 1) % k != 0:
            raise PreconditionError(f"ladder prime {q} is not 1 mod k={k}")
        table = kl_table_fast(field, CharTuple(field, chars))
        rng = _rng_for(seed, q, k, l)
        generic = generic_z_value(field, k, l, seed)
        max_i = max_ii = 0.0
        gen_bs = sample_generic_b(field, k, l, samples, rng, generic)
        for b in gen_bs:
            rep = sigma_II(table, b)
            max_i = max(max_i, rep.ratio_I)
            max_ii = max(max_ii, rep.ratio_II)
        sub_i = sub_ii = 0.0
        sub_bs = sample_subgeneric_b(field, k, l, subgeneric_samples, rng, generic)
        for b in sub_bs:
            rep = sigma_II(table, b)
            sub_i = max(sub_i, abs(rep.sigma_I) / q**1.5)
            sub_ii = max(sub_ii, abs(rep.sigma_II) / q**2)
        report.points.append(
            PrimePoint(
                q=q,
                generic_z=generic,
                n_generic=len(gen_bs),
                r_I=max_i,
                r_II=max_ii,
                n_subgeneric=len(sub_bs),
                sub_max_I=sub_i,
                sub_max_II=sub_ii,
            )
        )
    return report
