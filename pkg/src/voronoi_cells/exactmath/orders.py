"""Monomial orders.

An order turns an exponent tuple into two comparison keys:

* ``key_asc(e)``  — tuples compare like the monomials do (bigger key = bigger
  monomial); used when the *smallest* item should pop first (pair selection).
* ``key_desc(e)`` — tuples compare in the reversed sense (smaller key = bigger
  monomial); used by max-heaps built on heapq (term iteration, reduction).

Variables listed first in a ring are the biggest in every order.  BlockElim(k)
is the two-block elimination order: graded reverse lex on the first k
variables dominates graded reverse lex on the rest, so the reduced basis
elements free of the first block generate the elimination ideal.
"""
from __future__ import annotations


class MonomialOrder:
    name = "?"

    def key_asc(self, exps):
        raise NotImplementedError

    def key_desc(self, exps):
        return tuple(-v for v in self.key_asc(exps))

    def __repr__(self):
        return self.name

    def __eq__(self, other):
        return type(self) is type(other)

    def __hash__(self):
        return hash(type(self).__name__)


class Lex(MonomialOrder):
    name = "lex"

    def key_asc(self, exps):
        return tuple(exps)

    def key_desc(self, exps):
        return tuple(-v for v in exps)


class GrevLex(MonomialOrder):
    name = "grevlex"

    def key_asc(self, exps):
        key = [sum(exps)]
        key.extend(-v for v in reversed(exps))
        return tuple(key)

    def key_desc(self, exps):
        key = [-sum(exps)]
        key.extend(reversed(exps))
        return tuple(key)


class BlockElim(MonomialOrder):
    """Eliminate the first ``k`` ring variables (grevlex block over grevlex block)."""

    def __init__(self, k: int):
        if k < 0:
            raise ValueError("block size must be nonnegative")
        self.k = k
        self.name = f"block_elim({k})"

    def key_asc(self, exps):
        k = self.k
        head, tail = exps[:k], exps[k:]
        key = [sum(head)]
        key.extend(-v for v in reversed(head))
        key.append(sum(tail))
        key.extend(-v for v in reversed(tail))
        return tuple(key)

    def key_desc(self, exps):
        k = self.k
        head, tail = exps[:k], exps[k:]
        key = [-sum(head)]
        key.extend(reversed(head))
        key.append(-sum(tail))
        key.extend(reversed(tail))
        return tuple(key)

    def __eq__(self, other):
        return isinstance(other, BlockElim) and other.k == self.k

    def __hash__(self):
        return hash(("block_elim", self.k))


LEX = Lex()
GREVLEX = GrevLex()
