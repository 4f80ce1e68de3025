"""Bilinear forms with Kloosterman coefficients, bound formulas, the
shift-reduction diagnostic harness, the Gauss-sum / Kl_3 moment identity,
and averaged comparisons over constrained b-families.

The moment identity is implemented in the exact form the direct two-sided
oracle validates at prime modulus: with the sum running over ALL even
characters (the trivial one included) and normalized by their number
(q-1)/2,

    (2/(q-1)) * sum over even chi of eps_chi^2 eps_{chi xi} conj(chi)(n)
        = ( Kl_3(n; (1,1,xi), q) + Kl_3(-n; (1,1,xi), q) ) / sqrt(q),

for xi even and n != 0.  This holds to machine precision; restricting to
primitive (nontrivial) characters or dropping the 1/2 breaks exactness.
eps of the trivial character is tau(1)/sqrt(q) = -1/sqrt(q).
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field as dc_field

import numpy as np

from .errors import DegenerateFiberError, PreconditionError
from .field import MultChar, PrimeField, additive_char_vector, gauss_sum
from .kloosterman import KlTable
from .sums import kr_matrix, sigma_II
from .strata import is_diagonal, stratum_scan, z_fiber_count


@dataclass
class CoeffSeq:
    """Complex coefficient sequence on a support of integer indices."""

    support: np.ndarray
    values: np.ndarray
    l1: float = dc_field(init=False)
    l2: float = dc_field(init=False)

    def __post_init__(self):
        self.support = np.asarray(self.support, dtype=np.int64)
        self.values = np.asarray(self.values, dtype=np.complex128)
        if self.support.shape != self.values.shape or self.support.ndim != 1:
            raise PreconditionError("support and values must be flat arrays of equal length")
        if len(set(self.support.tolist())) != len(self.support):
            raise PreconditionError("support indices must be distinct")
        absv = np.abs(self.values)
        self.l1 = float(np.sum(absv))
        self.l2 = float(math.sqrt(np.sum(absv**2)))

    @classmethod
    def ones(cls, n: int) -> "CoeffSeq":
        return cls(np.arange(1, n + 1), np.ones(n))

    @classmethod
    def indicator(cls, indices) -> "CoeffSeq":
        idx = np.asarray(indices, dtype=np.int64)
        return cls(idx, np.ones(len(idx)))

    @property
    def m_plus(self) -> int:
        return int(self.support.max())


def bilinear_form(table: KlTable, alpha: CoeffSeq, beta: CoeffSeq) -> complex:
    """B(K, alpha, beta) = sum_{m,n} alpha_m beta_n K(m n mod q)."""
    q = table.field.q
    for seq in (alpha, beta):
        if seq.support.min() < 1 or seq.support.max() > q - 1:
            raise PreconditionError("coefficient support must lie within [1, q-1]")
    prod_idx = (alpha.support[:, None] * beta.support[None, :]) % q
    kvals = table.values[prod_idx]
    return complex(np.einsum("m,n,mn->", alpha.values, beta.values, kvals))


@dataclass
class BoundReport:
    kind: str  # "I" or "II"
    q: int
    M: int
    N: int
    l: int
    trivial: float
    theorem: float
    cond_interval: bool  # first displayed range condition
    cond_mplus: bool | None  # M^+ variant; None when M^+ was not supplied
    computed: float | None = None

    @property
    def in_range(self) -> bool:
        return self.cond_interval or bool(self.cond_mplus)

    @property
    def ratio_trivial(self) -> float | None:
        return None if self.computed is None else self.computed / self.trivial

    @property
    def ratio_theorem(self) -> float | None:
        return None if self.computed is None else self.computed / self.theorem

    def to_json(self) -> dict:
        return {
            "kind": self.kind,
            "q": self.q,
            "M": self.M,
            "N": self.N,
            "l": self.l,
            "trivial_bound": self.trivial,
            "theorem_bound": self.theorem,
            "cond_interval": self.cond_interval,
            "cond_mplus": self.cond_mplus,
            "in_range": self.in_range,
            "computed": self.computed,
            "ratio_trivial": self.ratio_trivial,
            "ratio_theorem": self.ratio_theorem,
        }


def theorem_bounds(
    q: int,
    M: int,
    N: int,
    l: int,
    *,
    k: int,
    alpha_l1: float,
    alpha_l2: float,
    beta_l2: float,
    m_plus: int | None = None,
    kind: str = "II",
) -> BoundReport:
    """Evaluate the type-I / type-II bound formulas and their range flags.

    The q^eps factor is set to 1; constants are reported, never asserted.
    The trivial bound is the universal envelope k * ||alpha||_2 ||beta||_2
    (MN)^{1/2}.
    """
    if min(q, M, N, l) < 1:
        raise PreconditionError("q, M, N, l must be positive")
    trivial = k * alpha_l2 * beta_l2 * math.sqrt(M * N)
    if kind == "II":
        if l < 2:
            raise PreconditionError("type II needs l >= 2")
        theorem = (
            alpha_l2
            * beta_l2
            * math.sqrt(M * N)
            * math.sqrt(1.0 / M + (q ** (0.75 + 0.75 / l) / (M * N)) ** (1.0 / l))
        )
        cond_interval = q ** (1.5 / l) <= N < 0.5 * q ** (0.5 - 0.75 / l)
        cond_mplus = (
            None
            if m_plus is None
            else (q ** (1.5 / l) <= N and N * m_plus < 0.5 * q ** (1 - 1.5 / l))
        )
    elif kind == "I":
        theorem = (
            alpha_l1 ** (1 - 1.0 / l)
            * alpha_l2 ** (1.0 / l)
            * M ** (1.0 / (2 * l))
            * N
            * (q ** (1 + 1.0 / l) / (M * N**2)) ** (1.0 / (2 * l))
        )
        cond_interval = q ** (1.0 / l) <= N <= 0.5 * q ** (0.5 + 0.5 / l)
        cond_mplus = (
            None
            if m_plus is None
            else (q ** (1.0 / l) <= N and N * m_plus <= 0.5 * q ** (1 + 0.5 / l))
        )
    else:
        raise PreconditionError(f"kind must be 'I' or 'II', got {kind!r}")
    return BoundReport(
        kind=kind,
        q=q,
        M=M,
        N=N,
        l=l,
        trivial=trivial,
        theorem=theorem,
        cond_interval=bool(cond_interval),
        cond_mplus=cond_mplus,
    )


# ---------------------------------------------------------------------------
# shift-reduction diagnostic harness


@dataclass
class ShiftTrace:
    """Record of one +ab-shift reduction trace (a validation harness, not a prover)."""

    q: int
    A: int
    B: int
    N: int
    l: int
    s_neq: complex
    nu_sum: float
    nu_sum_identity: float  # A * N * (||alpha||_1^2 - sum |alpha_m|^2), must equal nu_sum
    nu_first_bound_l1: float  # A N ||alpha||_1^2
    nu_first_bound_l2: float  # A M N ||alpha||_2^2
    nu_sum_sq: float
    nu_second_ratio: float  # nu_sum_sq / (A N ||alpha||_2^4)
    majorant: float  # (1/AB) sum nu * |sum_{b~B} K(s1(r+b)) conj(K(s2(r+b)))|
    box_sum: float | None = None  # sum over b in [B,2B)^{2l} of |Sigma_II|
    box_shape: float | None = None  # q^3 n_diag + q^2 n_subgeneric + q^{3/2} B^{2l}
    box_ratio: float | None = None
    n_diag_box: int | None = None
    n_subgeneric_box: int | None = None
    generic_z: int | None = None


def shift_reduction_trace(
    table: KlTable,
    alpha: CoeffSeq,
    N: int,
    A: int,
    B: int,
    l: int,
    box_sum: bool = False,
    seed: int = 0,
) -> ShiftTrace:
    """Trace the +ab-shift reduction: S^{!=}, the nu-weight moments with their
    bound checks, and (optionally) the Hoelder-chain box sum of |Sigma_II|
    compared against the three-strata bound shape with empirical counts."""
    q = table.field.q
    if A < 1 or B < 1 or A * B > N:
        raise PreconditionError("need A, B >= 1 and A*B <= N")
    m_plus = alpha.m_plus
    if not (2 * A * N < q or 2 * A * m_plus < q):
        raise PreconditionError("need 2AN < q or 2AM^+ < q for the injectivity step")
    if N > q - 1:
        raise PreconditionError("need N <= q - 1")

    # S^{!=} = sum_{m1 != m2} alpha conj(alpha) sum_{n <= N} K(m1 n) conj(K(m2 n))
    ns = np.arange(1, N + 1, dtype=np.int64)
    w = table.values[(alpha.support[:, None] * ns[None, :]) % q]
    gram = w @ w.conj().T
    weighted = np.outer(alpha.values, np.conj(alpha.values)) * gram
    s_neq = complex(weighted.sum() - np.trace(weighted))

    # nu-weights on their sparse support
    nu: dict[tuple[int, int, int], float] = {}
    absa = np.abs(alpha.values)
    sup = alpha.support.tolist()
    for a in range(A, 2 * A):
        a_inv = pow(a % q, q - 2, q)
        for n in range(1, N + 1):
            r = n * a_inv % q
            for i1, m1 in enumerate(sup):
                s1 = a * m1 % q
                for i2, m2 in enumerate(sup):
                    if m1 == m2:
                        continue
                    key = (r, s1, a * m2 % q)
                    nu[key] = nu.get(key, 0.0) + absa[i1] * absa[i2]
    nu_sum = math.fsum(nu.values())
    nu_sum_sq = math.fsum(v * v for v in nu.values())
    identity = A * N * (alpha.l1**2 - float(np.sum(absa**2)))
    second_ratio = nu_sum_sq / (A * N * alpha.l2**4)

    bs = np.arange(B, 2 * B, dtype=np.int64)
    major_terms = []
    for (r, s1, s2), weight in nu.items():
        t1 = table.values[(s1 * ((r + bs) % q)) % q]
        t2 = table.values[(s2 * ((r + bs) % q)) % q]
        major_terms.append(weight * abs(np.sum(t1 * np.conj(t2))))
    majorant = math.fsum(major_terms) / (A * B)

    trace = ShiftTrace(
        q=q,
        A=A,
        B=B,
        N=N,
        l=l,
        s_neq=s_neq,
        nu_sum=nu_sum,
        nu_sum_identity=identity,
        nu_first_bound_l1=A * N * alpha.l1**2,
        nu_first_bound_l2=A * len(sup) * N * alpha.l2**2,
        nu_sum_sq=nu_sum_sq,
        nu_second_ratio=second_ratio,
        majorant=majorant,
    )
    if box_sum:
        _attach_box_sum(trace, table, l, seed)
    return trace


def _attach_box_sum(trace: ShiftTrace, table: KlTable, l: int, seed: int) -> None:
    q = table.field.q
    B = trace.B
    k = table.k
    total = []
    n_diag = 0
    n_sub = 0
    generic = None
    strata_ok = (q - 1) % k == 0 and q > 2 * l + k ** (2 * l - 1)
    if strata_ok:
        generic = stratum_scan(table.field, k, l, samples=200, seed=seed).generic
    for b in itertools.product(range(B, 2 * B), repeat=2 * l):
        rep = sigma_II(table, np.array(b, dtype=np.int64))
        total.append(abs(rep.sigma_II))
        if is_diagonal(b):
            n_diag += 1
        elif strata_ok:
            try:
                z = z_fiber_count(table.field, k, np.array(b, dtype=np.int64)).z_count
            except DegenerateFiberError:
                z = -1
            if z < generic:
                n_sub += 1
    trace.box_sum = math.fsum(total)
    trace.n_diag_box = n_diag
    trace.n_subgeneric_box = n_sub if strata_ok else None
    trace.generic_z = generic
    shape = q**3 * n_diag + q**1.5 * B ** (2 * l)
    if strata_ok:
        shape += q**2 * n_sub
    trace.box_shape = shape
    trace.box_ratio = trace.box_sum / shape


# ---------------------------------------------------------------------------
# moment identity


def kl3_direct(field: PrimeField, xi: MultChar, x: int) -> complex:
    """Kl_3(x; (1,1,xi), q) by direct double enumeration (no tables)."""
    q = field.q
    x %= q
    if x == 0:
        raise PreconditionError("x must be nonzero")
    y1 = np.arange(1, q, dtype=np.int64)[:, None]
    y2 = np.arange(1, q, dtype=np.int64)[None, :]
    y3 = x * field.inv_table[(y1 * y2) % q] % q
    psi = additive_char_vector(field)
    xiv = xi.values_by_residue()
    return complex(np.sum(psi[(y1 + y2 + y3) % q] * xiv[y3])) / q


def moment_identity_check(field: PrimeField, xi: MultChar, n: int) -> tuple[complex, complex, float]:
    """Both sides of the even-character Gauss-sum / Kl_3 moment identity.

    lhs averages eps_chi^2 eps_{chi xi} conj(chi)(n) over all even chi
    (trivial included); rhs is (Kl_3(n) + Kl_3(-n))/sqrt(q) for the tuple
    (1, 1, xi).  Returns (lhs, rhs, |lhs - rhs|).
    """
    q = field.q
    if not xi.is_even:
        raise PreconditionError("the moment identity is derived for even xi only")
    n %= q
    if n == 0:
        raise PreconditionError("n must be nonzero")
    sq = math.sqrt(q)
    terms = []
    for a in range(0, q - 1, 2):  # even characters are exactly the even indices
        chi = MultChar(field, a)
        eps_chi = gauss_sum(chi) / sq
        eps_chixi = gauss_sum(MultChar(field, a + xi.a)) / sq
        terms.append(eps_chi**2 * eps_chixi * np.conj(chi(n)))
    lhs = (math.fsum(t.real for t in terms) + 1j * math.fsum(t.imag for t in terms)) * 2 / (q - 1)
    rhs = (kl3_direct(field, xi, n) + kl3_direct(field, xi, q - n)) / sq
    return lhs, rhs, abs(lhs - rhs)


# ---------------------------------------------------------------------------
# averaged comparisons


@dataclass
class ComparisonReport:
    family: str
    q: int
    count: int  # number of b-tuples in the family
    lhs: float
    rhs: float
    gap: float
    normalized_gap: float
    normalizer_exponent: float  # gap is divided by q**normalizer_exponent (times count for samples)
    lhs_imag: float
    rhs_imag: float

    def to_json(self) -> dict:
        return self.__dict__.copy()


def averaged_comparison_power_sum(
    table: KlTable, n: int, m: int
) -> ComparisonReport:
    """Power-sum family comparison: b in (F_q^x)^n with sum b_i^t = 0 for t <= m.

    lhs = sum_b |sum_s prod_i K(b_i s)|^2,  rhs with |.|^2 inside the s-sum;
    the gap is normalized by q^{n-m+1/2}.
    """
    q = table.field.q
    if n > 4 or m > 1 or q > 31:
        raise PreconditionError("power-sum family limited to n <= 4, m <= 1, q <= 31")
    if n < 1 or m < 0:
        raise PreconditionError("need n >= 1, m >= 0")
    s = np.arange(1, q, dtype=np.int64)
    lhs_terms: list[complex] = []
    rhs_terms: list[float] = []
    count = 0
    free = n - m
    for bfree in itertools.product(range(1, q), repeat=free):
        if m == 1:
            last = -sum(bfree) % q
            if last == 0:
                continue
            b = bfree + (last,)
        else:
            b = bfree
        count += 1
        prod = np.ones(q - 1, dtype=np.complex128)
        for bi in b:
            prod = prod * table.values[(bi * s) % q]
        t = complex(np.sum(prod))
        lhs_terms.append(t * np.conj(t))
        rhs_terms.append(float(np.sum(np.abs(prod) ** 2)))
    lhs_c = math.fsum(z.real for z in lhs_terms) + 1j * math.fsum(z.imag for z in lhs_terms)
    rhs = math.fsum(rhs_terms)
    gap = abs(lhs_c.real - rhs)
    expo = n - m + 0.5
    return ComparisonReport(
        family=f"power-sum(n={n},m={m})",
        q=q,
        count=count,
        lhs=lhs_c.real,
        rhs=rhs,
        gap=gap,
        normalized_gap=gap / q**expo,
        normalizer_exponent=expo,
        lhs_imag=abs(lhs_c.imag),
        rhs_imag=0.0,
    )


def averaged_comparison_full_sample(
    table: KlTable, l: int, count: int, seed: int = 0
) -> ComparisonReport:
    """Sampled form of the stratum-level comparison, r restricted to F_q^x:

    lhs = sum_b sum_{r != 0} |sum_s bfK(sr, sb)|^2, rhs with |.|^2 inside.
    The per-b error density of the underlying estimate is O(q^{3/2}), so the
    gap is normalized by count * q^{3/2}.
    """
    q = table.field.q
    if count < 0:
        raise PreconditionError("count must be >= 0")
    rng = np.random.Generator(np.random.PCG64(seed))
    lhs_terms: list[float] = []
    rhs_terms: list[float] = []
    for _ in range(count):
        b = rng.integers(0, q, size=2 * l, dtype=np.int64)
        m = kr_matrix(table, b)[:, 1:]  # drop r = 0
        r_vec = m.sum(axis=0)
        lhs_terms.append(float(np.sum(np.abs(r_vec) ** 2)))
        rhs_terms.append(float(np.sum(np.abs(m) ** 2)))
    lhs = math.fsum(lhs_terms)
    rhs = math.fsum(rhs_terms)
    gap = abs(lhs - rhs)
    return ComparisonReport(
        family=f"full-sample(l={l},count={count},seed={seed})",
        q=q,
        count=count,
        lhs=lhs,
        rhs=rhs,
        gap=gap,
        normalized_gap=gap / (count * q**1.5) if count else 0.0,
        normalizer_exponent=1.5,
        lhs_imag=0.0,
        rhs_imag=0.0,
    )


def averaged_comparison_empty() -> ComparisonReport:
    return ComparisonReport(
        family="empty",
        q=0,
        count=0,
        lhs=0.0,
        rhs=0.0,
        gap=0.0,
        normalized_gap=0.0,
        normalizer_exponent=0.0,
        lhs_imag=0.0,
        rhs_imag=0.0,
    )
