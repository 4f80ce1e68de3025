"""Complete sum-product sums over the shift parameters b.

For a table K(x) = Kl_k(a*x) and a 2l-tuple b, with

    bfK(r, b) = prod_{i<=l} K(r + b_i) * conj(K(r + b_{i+l})),

this module computes

    bfR(r, b)     = sum over s in F_q^x of bfK(s*r, s*b),
    Sigma_I(K,b)  = sum over r in F_q, s in F_q^x of bfK(s*r, s*b),
    Sigma_II(K,b) = sum over r, s1 != s2 of bfK(s1 r, s1 b) conj(bfK(s2 r, s2 b)),

the last one by default in the rearranged difference form

    Sigma_II = sum_r |bfR(r,b)|^2 - sum_s sum_r |bfK(sr, sb)|^2,

which costs O(q^2 l) instead of O(q^3 l).  The direct (s1 != s2) evaluation
is kept as an oracle behind a flag; the two must agree to 1e-6 * q^{3/2}.

Any factor K(0) contributes 0 (vanishing stalk), which the table's
zero-entry at index 0 implements for free.

Numerics: the O(q^2)-term accumulations run through numpy pairwise
summation (absolute error well below 1e3 * q^2 * eps for these unit-scale
terms); scalar combination steps use math.fsum.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import NumericalInstabilityError, PreconditionError
from .kloosterman import KlTable

SIGMA_II_AGREE_RTOL = 1e-6


def _check_b(table: KlTable, b) -> tuple[np.ndarray, int]:
    b = np.asarray(b, dtype=np.int64) % table.field.q
    if b.ndim != 1 or len(b) < 2 or len(b) % 2 != 0:
        raise PreconditionError("b must be a flat tuple of even length 2l >= 2")
    return b, len(b) // 2


def kr_matrix(table: KlTable, b) -> np.ndarray:
    """Matrix M[s-1, r] = bfK(s*r, s*b) for s = 1..q-1 and r = 0..q-1.

    Everything else in this module reduces to sums over this matrix.
    """
    b, l = _check_b(table, b)
    q = table.field.q
    s = np.arange(1, q, dtype=np.int64)[:, None]
    r = np.arange(q, dtype=np.int64)[None, :]
    m = np.ones((q - 1, q), dtype=np.complex128)
    for i in range(2 * l):
        factor = table.values[(s * ((r + b[i]) % q)) % q]
        m *= factor if i < l else np.conj(factor)
    return m


def eval_KR(table: KlTable, r: int, b) -> tuple[complex, complex]:
    """(bfK(r, b), bfR(r, b)) at a single point r."""
    b, l = _check_b(table, b)
    q = table.field.q
    r %= q
    bfk = 1 + 0j
    for i in range(2 * l):
        v = table.value(r + int(b[i]))
        bfk *= v if i < l else v.conjugate()
    s = np.arange(1, q, dtype=np.int64)
    prod = np.ones(q - 1, dtype=np.complex128)
    for i in range(2 * l):
        factor = table.values[(s * ((r + b[i]) % q)) % q]
        prod *= factor if i < l else np.conj(factor)
    return bfk, complex(np.sum(prod))


def sigma_I(table: KlTable, b) -> complex:
    """Sigma_I(K, b) = sum over r in F_q, s in F_q^x of bfK(sr, sb)."""
    return complex(np.sum(kr_matrix(table, b)))


@dataclass
class SumReport:
    """Sigma_I / Sigma_II values for one b, with components and scale ratios."""

    b: tuple[int, ...]
    l: int
    sigma_I: complex
    sigma_II: float
    comp_R2: float  # sum_r |bfR(r,b)|^2          (nonnegative)
    comp_K2: float  # sum_s sum_r |bfK(sr,sb)|^2  (nonnegative)
    sigma_II_imag: float
    ratio_I: float  # |sigma_I| / q
    ratio_II: float  # |sigma_II| / q^{3/2}
    sigma_II_direct: float | None = None
    z_count: int | None = None  # stratum metadata, filled by callers that computed it


def sigma_II(table: KlTable, b, direct: bool = False) -> SumReport:
    """Sigma_II(K, b) in difference form; optionally cross-check the direct sum.

    With ``direct=True`` also evaluates the s1 != s2 double sum through the
    Gram matrix of M and raises NumericalInstabilityError if the two routes
    disagree beyond 1e-6 * q^{3/2}.
    """
    bt, l = _check_b(table, b)
    q = table.field.q
    m = kr_matrix(table, bt)
    r_vec = m.sum(axis=0)
    comp_R2 = float(np.sum(np.abs(r_vec) ** 2))
    comp_K2 = float(np.sum(np.abs(m) ** 2))
    s2 = comp_R2 - comp_K2
    si = complex(m.sum())
    rep = SumReport(
        b=tuple(int(x) for x in bt),
        l=l,
        sigma_I=si,
        sigma_II=s2,
        comp_R2=comp_R2,
        comp_K2=comp_K2,
        sigma_II_imag=0.0,
        ratio_I=abs(si) / q,
        ratio_II=abs(s2) / q**1.5,
    )
    if direct:
        d = sigma_II_direct(table, bt)
        rep.sigma_II_direct = d.real
        rep.sigma_II_imag = abs(d.imag)
        if abs(d.real - s2) > SIGMA_II_AGREE_RTOL * q**1.5:
            raise NumericalInstabilityError(
                f"Sigma_II direct/difference disagreement beyond {SIGMA_II_AGREE_RTOL}*q^1.5: "
                f"direct={d.real!r}, difference={s2!r}",
                d.real,
                s2,
            )
    return rep


def sigma_II_direct(table: KlTable, b) -> complex:
    """Direct Sigma_II: explicit off-diagonal sum of the Gram matrix G = M M^H.

    G[s1, s2] = sum_r bfK(s1 r, s1 b) conj(bfK(s2 r, s2 b)); the result is
    the sum of all off-diagonal entries.  Different floating-point route
    from the difference form, same algebraic value.
    """
    m = kr_matrix(table, b)
    gram = m @ m.conj().T
    total = complex(gram.sum())
    diag = complex(np.trace(gram))
    return total - diag


def sigma_envelope(table: KlTable, l: int) -> tuple[float, float]:
    """Trivial envelopes |Sigma_I| <= k^{2l} q^2 and |Sigma_II| <= k^{4l} q^3."""
    q = table.field.q
    k = table.k
    return float(k ** (2 * l)) * q**2, float(k ** (4 * l)) * q**3
