"""Real-root counting and isolation for univariate rational polynomials.

Polynomials here are dense coefficient lists ``[c0, c1, ..., cd]`` over
``Fraction`` (low degree first).  Counting uses Sturm chains on half-open
intervals ``(a, b]``; isolation bisects inside a Cauchy bound and refines
each bracket below a requested width.  A root hit exactly by an endpoint is
reported as a degenerate bracket ``(r, r)``.
"""
from __future__ import annotations

from fractions import Fraction
from typing import Sequence

from .poly import Polynomial


def dense_from_poly(f: Polynomial, var: int | None = None) -> list[Fraction]:
    """Dense coefficients of a polynomial using at most one variable."""
    used = f.variables_used()
    if len(used) > 1:
        raise ValueError("polynomial is not univariate")
    if var is None:
        var = used[0] if used else 0
    elif used and used[0] != var:
        raise ValueError("polynomial uses a different variable")
    out = [Fraction(0)] * (f.degree_in(var) + 1 if not f.is_zero() else 1)
    for mon, c in f.terms.items():
        out[mon[var]] = Fraction(c)
    return out


def dense_trim(coeffs: Sequence[Fraction]) -> list[Fraction]:
    out = list(coeffs)
    while out and out[-1] == 0:
        out.pop()
    return out


def dense_degree(coeffs: Sequence[Fraction]) -> int:
    return len(dense_trim(coeffs)) - 1


def dense_eval(coeffs: Sequence[Fraction], x: Fraction) -> Fraction:
    total = Fraction(0)
    for c in reversed(coeffs):
        total = total * x + c
    return total


def dense_derivative(coeffs: Sequence[Fraction]) -> list[Fraction]:
    return [i * c for i, c in enumerate(coeffs)][1:] or [Fraction(0)]


def dense_divmod(a: Sequence[Fraction], b: Sequence[Fraction]):
    b = dense_trim(b)
    if not b:
        raise ZeroDivisionError("polynomial division by zero")
    rem = dense_trim(a)
    db = len(b) - 1
    lb = b[-1]
    quot = [Fraction(0)] * max(len(rem) - db, 0)
    while len(rem) - 1 >= db and rem:
        shift = len(rem) - 1 - db
        factor = rem[-1] / lb
        quot[shift] = factor
        for i in range(db + 1):
            rem[shift + i] -= factor * b[i]
        rem = dense_trim(rem)
    return quot, rem


def dense_gcd(a: Sequence[Fraction], b: Sequence[Fraction]) -> list[Fraction]:
    """Monic gcd via the Euclidean algorithm."""
    a, b = dense_trim(a), dense_trim(b)
    while b:
        _, r = dense_divmod(a, b)
        a, b = b, r
    if a:
        lead = a[-1]
        a = [c / lead for c in a]
    return a


def squarefree_part(coeffs: Sequence[Fraction]) -> list[Fraction]:
    coeffs = dense_trim(coeffs)
    if len(coeffs) <= 1:
        return coeffs
    g = dense_gcd(coeffs, dense_derivative(coeffs))
    if len(g) == 1:
        return coeffs
    quot, _ = dense_divmod(coeffs, g)
    return dense_trim(quot)


def sturm_chain(coeffs: Sequence[Fraction]) -> list[list[Fraction]]:
    """Sturm chain of the squarefree part; first entry has the original roots."""
    f = squarefree_part(coeffs)
    if len(f) <= 1:
        return [f] if f else []
    chain = [f, dense_trim(dense_derivative(f))]
    while len(chain[-1]) > 1:
        _, r = dense_divmod(chain[-2], chain[-1])
        if not r:
            break
        chain.append([-c for c in r])
    if chain[-1] == []:
        chain.pop()
    return chain


def _variations(chain, x: Fraction) -> int:
    signs = []
    for poly in chain:
        v = dense_eval(poly, x)
        if v:
            signs.append(1 if v > 0 else -1)
    count = 0
    for s, t in zip(signs, signs[1:]):
        if s != t:
            count += 1
    return count


def count_roots(chain, a: Fraction, b: Fraction) -> int:
    """Distinct real roots in the half-open interval (a, b]."""
    if a >= b:
        return 0
    return _variations(chain, a) - _variations(chain, b)


def cauchy_bound(coeffs: Sequence[Fraction]) -> Fraction:
    coeffs = dense_trim(coeffs)
    if len(coeffs) <= 1:
        return Fraction(1)
    lead = coeffs[-1]
    biggest = max(abs(c / lead) for c in coeffs[:-1])
    return 1 + biggest


def isolate_real_roots(coeffs: Sequence[Fraction], precision: Fraction = Fraction(1, 2**20)):
    """Disjoint brackets for every distinct real root, ascending.

    Each bracket (lo, hi) satisfies lo <= root <= hi and hi - lo <= precision;
    a root known exactly is returned as (r, r).
    """
    f = squarefree_part(coeffs)
    if len(f) <= 1:
        return []
    chain = sturm_chain(f)
    bound = cauchy_bound(f) + 1
    total = count_roots(chain, -bound, bound)
    if total == 0:
        return []
    found = []
    # stack entries are half-open (lo, hi] with a known positive root count
    stack = [(-bound, bound, total)]
    while stack:
        lo, hi, k = stack.pop()
        if k == 1:
            found.append(_refine(f, chain, lo, hi, precision))
            continue
        mid = (lo + hi) / 2
        left = count_roots(chain, lo, mid)
        right = k - left
        if left:
            stack.append((lo, mid, left))
        if right:
            stack.append((mid, hi, right))
    found.sort(key=lambda br: br[0])
    return found


def _refine(f, chain, lo: Fraction, hi: Fraction, precision: Fraction):
    """Shrink a single-root half-open bracket (lo, hi] below the target width."""
    while hi - lo > precision:
        mid = (lo + hi) / 2
        if dense_eval(f, mid) == 0:
            return (mid, mid)
        if count_roots(chain, lo, mid) == 1:
            hi = mid
        else:
            lo = mid
    if dense_eval(f, hi) == 0:
        return (hi, hi)
    return (lo, hi)


def count_real_roots(coeffs: Sequence[Fraction]) -> int:
    """Number of distinct real roots."""
    f = squarefree_part(coeffs)
    if len(f) <= 1:
        return 0
    chain = sturm_chain(f)
    bound = cauchy_bound(f) + 1
    return count_roots(chain, -bound, bound)
