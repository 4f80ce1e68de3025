"""Singular-support stratification of the parameter space of b-tuples.

The singular set of the r-family attached to a 2l-tuple b is the hypersurface
cut out (over F_q containing the k-th roots of unity) by

    P_b(r) = prod over zeta in mu_k^{2l} of
             ( sum_{i<=l} zeta_i x_i  -  sum_{i>l} zeta_i x_i ),

computed in F_q[r][x_1..x_{2l}] modulo the relations x_i^k = r + b_i.  The
product is invariant under every substitution x_i -> zeta x_i, so after full
reduction only monomials with all x-exponents divisible by k survive; the
operation asserts this collapse and returns the resulting polynomial in r.

The full singular set adds the hyperplanes r = -b_i:

    F_b(r) = P_b(r) * prod_i (r + b_i),

and the geometric fiber count z(b) = |Z_b| is the number of distinct roots
of F_b over the algebraic closure, obtained as deg of the squarefree part
F/gcd(F, F') (valid because q > deg F is a precondition).  Strata are the
loci {b : z(b) <= j}; "generic" b are those attaining the maximum observed
z, and b with subgeneric z serve as the empirical proxy for the
low-dimensional exceptional locus (a superset of it, restricted to rational
points, since the strata are closed).

Note the product above is always a perfect k-th power (the factors fall in
orbits of size k under zeta -> c*zeta), and the factors whose leading
coefficients sum_{i<=l} zeta_i - sum_{i>l} zeta_i vanish lose a degree each,
so deg P_b sits well below the factor-count bound k^{2l-1} for every b; the
squarefree reduction makes z(b) insensitive to that multiplicity.
"""

from __future__ import annotations

import itertools
from collections import Counter
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from . import polyfq
from .errors import (
    DegenerateFiberError,
    InternalConsistencyError,
    PreconditionError,
    ResourceLimitError,
)
from .field import PrimeField

MAX_FORM_COUNT = 10_000  # k^(2l) bound for the resolvent product
MAX_EXHAUSTIVE = 10_000_000  # q^(2l) bound for exhaustive scans / box enumerations


def is_diagonal(b) -> bool:
    """b lies on the diagonal variety: every coordinate value repeats."""
    counts = Counter(int(x) for x in b)
    return all(c >= 2 for c in counts.values())


def _check_preconditions(field: PrimeField, k: int, b) -> tuple[np.ndarray, int]:
    b = np.asarray(b, dtype=np.int64) % field.q
    if b.ndim != 1 or len(b) % 2 != 0 or len(b) < 2:
        raise PreconditionError("b must have even length 2l >= 2")
    l = len(b) // 2
    if k < 2:
        raise PreconditionError("need k >= 2")
    if (field.q - 1) % k != 0:
        raise PreconditionError(f"q = {field.q} is not 1 mod k = {k}: mu_k not in F_q")
    if k ** (2 * l) > MAX_FORM_COUNT:
        raise ResourceLimitError(
            f"k^(2l) = {k ** (2 * l)} exceeds the {MAX_FORM_COUNT} resolvent-factor bound"
        )
    if field.q <= 2 * l + k ** (2 * l - 1):
        raise PreconditionError(
            f"q = {field.q} <= 2l + k^(2l-1) = {2 * l + k ** (2 * l - 1)}: "
            "no separability headroom"
        )
    return b, l


def _mul_linear_form(state: np.ndarray, coeffs, b: np.ndarray, q: int) -> np.ndarray:
    """Multiply a reduced element by sum_i coeffs[i] * x_i.

    state has shape (k,)*2l + (D,); exponents reduce via x_i^k -> (r + b_i),
    so the result has r-degree headroom D+1.
    """
    n = state.ndim - 1
    out = np.zeros(state.shape[:-1] + (state.shape[-1] + 1,), dtype=np.int64)
    for i in range(n):
        c = int(coeffs[i]) % q
        if c == 0:
            continue
        shifted = np.roll(state, 1, axis=i)
        contrib = c * shifted % q
        wsl = tuple(slice(0, 1) if j == i else slice(None) for j in range(n))
        wrapped = contrib[wsl].copy()
        contrib[wsl] = 0
        out[..., :-1] += contrib
        out[wsl + (slice(None, -1),)] += wrapped * int(b[i]) % q
        out[wsl + (slice(1, None),)] += wrapped
        out %= q
    return out


def singular_polynomial(field: PrimeField, k: int, b) -> np.ndarray:
    """P_b as coefficients over F_q (ascending degree; empty array if P_b = 0)."""
    b, l = _check_preconditions(field, k, b)
    q = field.q
    zeta = pow(field.g, (q - 1) // k, q)
    zpow = [pow(zeta, t, q) for t in range(k)]
    n = 2 * l
    state = np.zeros((k,) * n + (1,), dtype=np.int64)
    state[(0,) * n + (0,)] = 1
    for ts in itertools.product(range(k), repeat=n):
        coeffs = [zpow[t] if i < l else q - zpow[t] for i, t in enumerate(ts)]
        state = _mul_linear_form(state, coeffs, b, q)
    flat = state.reshape(-1, state.shape[-1])
    p = flat[0].copy()
    if np.any(flat[1:]):
        raise InternalConsistencyError(
            "residual x-dependence after reduction: Galois cancellation failed"
        )
    return polyfq.trim(p)


@dataclass
class StratumReport:
    b: tuple[int, ...]
    on_diagonal: bool
    deg_P: int  # -1 when P_b = 0
    z_count: int
    generic: bool | None = None  # filled once a scan establishes the generic maximum

    def row(self) -> list:
        return [*self.b, self.deg_P, self.z_count, self.generic]


def z_fiber_count(field: PrimeField, k: int, b) -> StratumReport:
    """Distinct geometric points of Z_b = {P_b = 0} union {r = -b_i}."""
    bt, l = _check_preconditions(field, k, b)
    q = field.q
    p = singular_polynomial(field, k, bt)
    diag = is_diagonal(bt)
    if len(p) == 0:
        raise DegenerateFiberError(
            f"P_b vanishes identically at b = {tuple(int(x) for x in bt)}"
            + (" (b is diagonal)" if diag else "")
        )
    hyper = np.ones(1, dtype=np.int64)
    for bi in bt:
        hyper = polyfq.mul(hyper, np.array([bi % q, 1], dtype=np.int64), q)
    full = polyfq.mul(p, hyper, q)
    sf = polyfq.squarefree_part(full, q)
    z = polyfq.deg(sf)
    n_hyper = len({int(-bi) % q for bi in bt})
    if not n_hyper <= z <= polyfq.deg(p) + 2 * l:
        raise InternalConsistencyError(f"z_count {z} outside [{n_hyper}, {polyfq.deg(p) + 2 * l}]")
    return StratumReport(
        b=tuple(int(x) for x in bt),
        on_diagonal=diag,
        deg_P=polyfq.deg(p),
        z_count=z,
    )


@dataclass
class ScanResult:
    histogram: dict[int, int]  # z_count -> frequency; key -1 collects degenerate fibers
    generic: int  # maximum z_count observed
    reports: list[StratumReport]

    def generic_fraction(self) -> float:
        total = sum(self.histogram.values())
        return self.histogram.get(self.generic, 0) / total if total else 0.0


def _scan_one(field: PrimeField, k: int, b) -> StratumReport:
    try:
        return z_fiber_count(field, k, b)
    except DegenerateFiberError:
        return StratumReport(
            b=tuple(int(x) for x in np.asarray(b) % field.q),
            on_diagonal=is_diagonal(np.asarray(b) % field.q),
            deg_P=-1,
            z_count=-1,
        )


def stratum_scan(
    field: PrimeField,
    k: int,
    l: int,
    samples: int | None = None,
    seed: int = 0,
    exhaustive: bool = False,
    threads: int = 1,
) -> ScanResult:
    """Histogram of z_count over b, exhaustive or seeded-random (PCG64(seed)).

    Degenerate fibers (P_b = 0) land in the -1 bucket and never define the
    generic value.  Results are independent of thread count: the b list is
    fixed up front and reports are merged in list order.
    """
    q = field.q
    if exhaustive:
        if q ** (2 * l) > MAX_EXHAUSTIVE:
            raise ResourceLimitError(f"q^(2l) = {q ** (2 * l)} exceeds the exhaustive-scan bound")
        bs = [np.array(t, dtype=np.int64) for t in itertools.product(range(q), repeat=2 * l)]
    else:
        if not samples or samples < 1:
            raise PreconditionError("random scan needs samples >= 1")
        rng = np.random.Generator(np.random.PCG64(seed))
        bs = list(rng.integers(0, q, size=(samples, 2 * l), dtype=np.int64))
    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            reports = list(pool.map(lambda b: _scan_one(field, k, b), bs))
    else:
        reports = [_scan_one(field, k, b) for b in bs]
    hist: dict[int, int] = {}
    for rep in reports:
        hist[rep.z_count] = hist.get(rep.z_count, 0) + 1
    generic = max((z for z in hist if z >= 0), default=-1)
    for rep in reports:
        if rep.z_count >= 0:
            rep.generic = rep.z_count == generic
    return ScanResult(histogram=hist, generic=generic, reports=reports)


def _partitions_min_block2(items: tuple[int, ...]):
    """Set partitions of items with every block of size >= 2."""
    if not items:
        yield []
        return
    first, rest = items[0], items[1:]
    for rsize in range(1, len(rest) + 1):
        for mates in itertools.combinations(rest, rsize):
            block = (first, *mates)
            remaining = tuple(x for x in rest if x not in mates)
            for sub in _partitions_min_block2(remaining):
                yield [block, *sub]


def diagonal_box_count(B: int, l: int) -> int:
    """|V_diag ∩ [B,2B)^{2l}| exactly: tuples whose equality pattern has all
    blocks of size >= 2, counted by summing falling factorials over patterns."""
    n = 2 * l
    total = 0
    for part in _partitions_min_block2(tuple(range(n))):
        m = len(part)
        ways = 1
        for j in range(m):
            ways *= B - j
        if ways > 0:
            total += ways
    return total


def box_count_variety(field: PrimeField, predicate, B: int, l: int) -> int:
    """Exact count of points of [B, 2B)^{2l} (integer coordinates, reduced
    mod q) on a variety.

    predicate is "diagonal" (pruned combinatorial count), an empty list (no
    equations: B^{2l}), or a list of callables F_q^{2l} -> F_q whose common
    zero locus is counted by enumeration.
    """
    q = field.q
    if not 0 <= B < q / 2:
        raise PreconditionError("need 0 <= B < q/2 so the box injects into F_q")
    n = 2 * l
    if predicate == "diagonal":
        return diagonal_box_count(B, l)
    if not predicate:
        return B**n
    if B**n > MAX_EXHAUSTIVE:
        raise ResourceLimitError(
            f"box has {B**n} points, over the enumeration bound; "
            "use the pruned 'diagonal' mode or a smaller box"
        )
    count = 0
    for tup in itertools.product(range(B, 2 * B), repeat=n):
        bmod = tuple(x % q for x in tup)
        if all(f(bmod) % q == 0 for f in predicate):
            count += 1
    return count
