"""Generalized Kloosterman sums Kl_k(x; chi, q) over all of F_q^x.

Kl_k(x) = q^{-(k-1)/2} * sum over y_1*...*y_k = x of
          chi_1(y_1)...chi_k(y_k) e((y_1+...+y_k)/q).

This is the (k-1)-fold multiplicative convolution of the k functions
f_i(y) = chi_i(y) e(y/q), which after discrete-log reindexing becomes a
cyclic convolution of length q-1.  Three evaluation routes are provided:

* ``kl_pointwise``   -- literal nested loops, O(q^{k-1}) per point, k <= 3;
* ``kl_table_naive`` -- direct O(k q^2) circulant convolution;
* ``kl_table_fast``  -- FFT cyclic convolution, O(k q log q).

The fast route is the production path; the other two are oracles.  No sign
factor is applied: the table holds the unsigned normalization above.  The
sheaf trace function carries an extra (-1)^{k-1}; that constant relates the
two conventions and is never applied silently.

The table index runs over residues 0..q-1 with the value at 0 fixed to 0
(the stalk at 0 vanishes), which is the convention every downstream complete
sum relies on when an argument s*(r+b_i) hits 0.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field as dc_field

import numpy as np

from .chartuples import CharTuple
from .errors import InternalConsistencyError, PreconditionError
from .field import PrimeField, additive_char_vector, eval_additive, eval_char, gauss_sum, MultChar

DELIGNE_SLACK = 1e-9


@dataclass(frozen=True)
class KlTable:
    """Table of x -> Kl_k(a*x; chi, q) for all x, normalized by q^{-(k-1)/2}.

    values has length q; values[0] = 0 by the vanishing-stalk convention and
    values[x] for x != 0 is the normalized sum.
    """

    field: PrimeField
    tuple: CharTuple
    scale: int
    values: np.ndarray = dc_field(repr=False)

    @property
    def k(self) -> int:
        return self.tuple.k

    def value(self, x: int) -> complex:
        return complex(self.values[x % self.field.q])

    def max_abs(self) -> float:
        return float(np.max(np.abs(self.values)))


def _factor_logs(field: PrimeField, t: CharTuple) -> list[np.ndarray]:
    """Log-reindexed factors h_i[m] = chi_i(g^m) e(g^m/q)."""
    psi = additive_char_vector(field, 1)[field.exp]
    n = field.q - 1
    ms = np.arange(n)
    return [np.exp(2j * np.pi * ((ai * ms) % n) / n) * psi for ai in t.indices]


def _assemble(field: PrimeField, t: CharTuple, a: int, conv_log: np.ndarray) -> KlTable:
    """Normalize, reindex from logs to residues, and apply the scale.

    The scale-a table is the exact index permutation x -> a*x of the a = 1
    table (same float values, no separate transform), so fast(a)[x] equals
    fast(1)[a*x] bit for bit.
    """
    k = t.k
    vals = np.zeros(field.q, dtype=np.complex128)
    vals[field.exp] = conv_log / field.q ** ((k - 1) / 2)
    if a % field.q != 1:
        vals = vals[(a * np.arange(field.q)) % field.q]
    vals.flags.writeable = False
    table = KlTable(field=field, tuple=t, scale=a % field.q, values=vals)
    m = table.max_abs()
    if not np.isfinite(m) or m > k + DELIGNE_SLACK:
        raise InternalConsistencyError(
            f"Deligne bound violated: max |Kl_{k}| = {m} > {k} (numerical failure)"
        )
    return table


def kl_table_fast(field: PrimeField, t: CharTuple, a: int = 1) -> KlTable:
    """Full Kl_k table via FFT cyclic convolution of length q-1."""
    if a % field.q == 0:
        raise PreconditionError("scale a must be nonzero mod q")
    hs = _factor_logs(field, t)
    if t.k == 1:
        conv = hs[0]
    else:
        spec = np.fft.fft(hs[0])
        for h in hs[1:]:
            spec *= np.fft.fft(h)
        conv = np.fft.ifft(spec)
    return _assemble(field, t, a, conv)


def kl_table_naive(field: PrimeField, t: CharTuple, a: int = 1) -> KlTable:
    """Oracle table: direct O(k q^2) cyclic convolution, no transforms."""
    if a % field.q == 0:
        raise PreconditionError("scale a must be nonzero mod q")
    hs = _factor_logs(field, t)
    n = field.q - 1
    conv = hs[0]
    idx = (np.arange(n)[:, None] - np.arange(n)[None, :]) % n
    for h in hs[1:]:
        conv = (h[idx] * conv[None, :]).sum(axis=1)
    return _assemble(field, t, a, conv)


def kl_pointwise(field: PrimeField, t: CharTuple, x: int) -> complex:
    """Definitional sum at a single point by literal enumeration; k <= 3 only."""
    q = field.q
    x %= q
    if x == 0:
        raise PreconditionError("Kl_k(x) is defined for x in F_q^x only")
    k = t.k
    if k > 3:
        raise PreconditionError("pointwise enumeration supported for k <= 3")
    chars = t.chars()
    acc = []
    if k == 1:
        return eval_char(chars[0], x) * eval_additive(field, 1, x)
    if k == 2:
        for y1 in range(1, q):
            y2 = x * field.inv(y1) % q
            acc.append(eval_char(chars[0], y1) * eval_char(chars[1], y2)
                       * eval_additive(field, 1, y1 + y2))
    else:
        for y1 in range(1, q):
            for y2 in range(1, q):
                y3 = x * field.inv(y1 * y2 % q) % q
                acc.append(eval_char(chars[0], y1) * eval_char(chars[1], y2)
                           * eval_char(chars[2], y3)
                           * eval_additive(field, 1, y1 + y2 + y3))
    return (math.fsum(z.real for z in acc) + 1j * math.fsum(z.imag for z in acc)) \
        / q ** ((k - 1) / 2)


def table_agreement(t1: KlTable, t2: KlTable) -> float:
    """max_x |t1 - t2| / max(1, max_x |t2|): the oracle-equivalence statistic."""
    d = float(np.max(np.abs(t1.values - t2.values)))
    return d / max(1.0, t2.max_abs())


def fourier_identity_check(table: KlTable, lam: MultChar) -> tuple[complex, complex, float]:
    """Multiplicative-Fourier check: sum_x Kl_k(x) lambda(x) vs q^{-(k-1)/2} prod tau(chi_i lambda).

    Requires scale a = 1 (the identity as stated is for the unscaled table).
    Returns (lhs, rhs, |lhs - rhs|).
    """
    if table.scale % table.field.q != 1:
        raise PreconditionError("fourier_identity_check needs a table with scale 1")
    f = table.field
    lhs = complex(np.sum(table.values * lam.values_by_residue()))
    rhs = 1 + 0j
    for ai in table.tuple.indices:
        rhs *= gauss_sum(MultChar(f, ai + lam.a))
    rhs /= f.q ** ((table.k - 1) / 2)
    return lhs, rhs, abs(lhs - rhs)
