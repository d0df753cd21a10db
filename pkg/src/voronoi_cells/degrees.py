"""Degree laboratory: measured and closed-form Voronoi degrees.

Two independent sources of the same number.  The measured side draws a
dense random hypersurface through a random point over a prime field, runs
the boundary pipeline there, and counts the quotient degree; replication
across seeds and primes guards against unlucky randomness.  The closed-form
side evaluates the published degree formulas for curves, surfaces, cones,
low-rank matrix varieties, and the general hypersurface conjecture, with
the machine-checked table of known values compiled in.
"""
from __future__ import annotations

import itertools
import random
from collections import Counter
from dataclasses import dataclass
from typing import Sequence

from .exactmath.fields import PrimeField
from .exactmath.orders import BlockElim, GREVLEX
from .exactmath.poly import PolyRing
from .groebner import (
    IdealSpec,
    eliminate,
    is_zero_dimensional,
    quotient_degree,
)
from .voronoi import (
    SingularPointError,
    normal_space_at,
    parametric_critical_system,
)


class UnluckySliceError(RuntimeError):
    """The sliced system failed to become zero-dimensional."""


# ---------------------------------------------------------------------------
# closed-form degree formulas

def formula_curve(d: int, g: int) -> int:
    """Voronoi degree of a smooth curve of degree d and genus g in general
    position: 4d + 2g - 6."""
    _check_degree_genus(d, g)
    return 4 * d + 2 * g - 6


def formula_surface(d: int, chi: int, g2: int) -> int:
    """Voronoi degree of a smooth surface in general position from its
    degree, Euler number, and sectional genus: 3d + chi + 4*g2 - 11."""
    if d < 1:
        raise ValueError("degree must be at least 1")
    return 3 * d + chi + 4 * g2 - 11


def formula_cone(d: int, g: int) -> int:
    """Voronoi degree at the apex of a cone over a smooth curve of degree d
    and genus g: 6d + 4g - 9."""
    _check_degree_genus(d, g)
    return 6 * d + 4 * g - 9


def plane_curve_genus(d: int) -> int:
    return (d - 1) * (d - 2) // 2


def conjecture_hypersurface(n: int, d: int, homogeneous: bool = False) -> int:
    """Conjectured Voronoi degree of a generic hypersurface of degree d in
    n-space, at a general point (homogeneous: a cone through the origin,
    measured at a general point of the cone).

    The closed form uses the geometric series 4 * sum_{j<n-1} (d-1)^j, which
    also covers d = 2 exactly (both variants give n).
    """
    if n < 1:
        raise ValueError("ambient dimension must be at least 1")
    if d < 2:
        raise ValueError("hypersurface degree must be at least 2")
    e = d - 1
    series = sum(e ** j for j in range(n - 1))
    if homogeneous:
        if n < 2:
            raise ValueError("a cone needs ambient dimension at least 2")
        return 2 * e ** (n - 1) + 4 * series - 3 * n + 2
    return e ** n + 3 * e ** (n - 1) + 4 * series - 3 * n


def lowrank_voronoi_degree(m: int, n: int, r: int) -> int:
    """Voronoi degree of the rank-r determinantal variety in m x n matrices
    (m <= n): 2(m - r)."""
    if not 0 < r < m <= n:
        raise ValueError("need 0 < r < m <= n")
    return 2 * (m - r)


def _check_degree_genus(d: int, g: int) -> None:
    if d < 1:
        raise ValueError("degree must be at least 1")
    if g < 0:
        raise ValueError("genus must be nonnegative")


# known Voronoi degrees of generic degree-d hypersurfaces in n-space,
# keyed (n, d); every published value, used to cross-check the conjecture
TABLE_INHOMOGENEOUS = {
    (1, 2): 1, (1, 3): 2, (1, 4): 3, (1, 5): 4, (1, 6): 5, (1, 7): 6,
    (1, 8): 7,
    (2, 2): 2, (2, 3): 8, (2, 4): 16, (2, 5): 26, (2, 6): 38, (2, 7): 52,
    (2, 8): 68,
    (3, 2): 3, (3, 3): 23, (3, 4): 61, (3, 5): 123, (3, 6): 215,
    (3, 7): 343,
    (4, 2): 4, (4, 3): 56, (4, 4): 202, (4, 5): 520, (4, 6): 1112,
    (5, 2): 5, (5, 3): 125, (5, 4): 631,
    (6, 2): 6, (6, 3): 266, (6, 4): 1924,
    (7, 2): 7, (7, 3): 551,
}

# the homogeneous (cone, degree at the apex) companion table
TABLE_HOMOGENEOUS = {
    (2, 2): 2, (2, 3): 4, (2, 4): 6, (2, 5): 8, (2, 6): 10, (2, 7): 12,
    (2, 8): 14,
    (3, 2): 3, (3, 3): 13, (3, 4): 27, (3, 5): 45, (3, 6): 67, (3, 7): 93,
    (3, 8): 123,
    (4, 2): 4, (4, 3): 34, (4, 4): 96, (4, 5): 202,
    (5, 2): 5, (5, 3): 79, (5, 4): 309,
    (6, 2): 6, (6, 3): 172,
    (7, 2): 7, (7, 3): 361,
}


# ---------------------------------------------------------------------------
# finite-field measurement

@dataclass(frozen=True)
class DegreeExperiment:
    """One stabilized degree measurement.

    ``replicas`` records every (seed, prime, degree) run; ``degree`` is the
    majority value and ``stable`` says whether all replicas agreed.
    """

    spec: IdealSpec
    point: tuple
    codim: int
    seed: int
    prime: int
    degree: int
    stable: bool
    replicas: tuple[tuple[int, int, int], ...]


def _monomials_up_to(n: int, d: int):
    for exps in itertools.product(range(d + 1), repeat=n):
        if sum(exps) <= d:
            yield exps


def random_hypersurface(n: int, d: int, prime: int, seed: int,
                        homogeneous: bool = False):
    """A dense random degree-d hypersurface over F_p through a random point.

    The point is drawn first from the seed stream, then the coefficients;
    one coefficient is then solved so the hypersurface passes through the
    point (the constant term, or the x1^d term with y1 forced nonzero in
    the homogeneous case).  Returns (IdealSpec, point).
    """
    field = PrimeField(prime)
    rng = random.Random(seed)
    ring = PolyRing(tuple(f"x{i + 1}" for i in range(n)), field=field,
                    order=GREVLEX)
    y = [rng.randrange(prime) for _ in range(n)]
    if homogeneous:
        while y[0] == 0:
            y[0] = rng.randrange(prime)
        mons = [m for m in _monomials_up_to(n, d) if sum(m) == d]
    else:
        mons = [m for m in _monomials_up_to(n, d) if sum(m) > 0]
    terms = {}
    for mon in sorted(mons, reverse=True):
        coeff = rng.randrange(prime)
        if coeff:
            terms[mon] = coeff
    pivot = (d,) + (0,) * (n - 1) if homogeneous else (0,) * n
    terms.pop(pivot, None)
    partial = ring.from_terms(terms)
    value = partial.evaluate(tuple(y))
    if homogeneous:
        terms[pivot] = field.mul(field.neg(value),
                                 field.inv(pow(y[0], d, prime)))
    else:
        terms[pivot] = field.neg(value)
    if terms[pivot] == 0:
        del terms[pivot]
    return IdealSpec(ring, (ring.from_terms(terms),), 1), tuple(y)


def _sliced_degree_once(spec: IdealSpec, point, codim: int, seed: int,
                        budget) -> int:
    """One pipeline run: slice, saturate by a random linear form, count.

    Saturation by a single random linear combination of the displacement
    coordinates replaces the generator-by-generator saturation of the exact
    pipeline; over a large prime field the difference is a measure-zero
    event, and replication catches it.
    """
    ring = spec.ring
    field = ring.field
    p = field.p
    n = ring.nvars
    rng = random.Random(seed)
    ns = normal_space_at(spec, point, codim=codim)
    k = ns.dimension

    slice_polys = []
    for _ in range(codim - 1):
        form = ns.u_ring.zero()
        coeffs = [rng.randrange(p) for _ in range(n)]
        while all(c == 0 for c in coeffs):
            coeffs = [rng.randrange(p) for _ in range(n)]
        for i, c in enumerate(coeffs):
            if c:
                form = form + ns.u_ring.variable(i).scale(c)
        slice_polys.append(form + ns.u_ring.constant(rng.randrange(p)))

    sring, _, gens = parametric_critical_system(spec, ns, codim=codim,
                                                slices=slice_polys)
    lin = sring.zero()
    coeffs = [rng.randrange(p) for _ in range(n)]
    while all(c == 0 for c in coeffs):
        coeffs = [rng.randrange(p) for _ in range(n)]
    for i, c in enumerate(coeffs):
        if c:
            lin = lin + (sring.variable(i) - sring.constant(point[i])).scale(c)

    tname = "_t"
    work = PolyRing((tname,) + sring.variables, field=field,
                    order=BlockElim(1 + n))
    wmap = [work.index_of(v) for v in sring.variables]
    moved = [g.map_ring(work, wmap) for g in gens]
    moved.append(work.one() - work.variable(tname) * lin.map_ring(work, wmap))
    drop = [tname] + list(ring.variables)
    parametric = eliminate(moved, drop, work, budget=budget,
                           stage="saturation")
    if not is_zero_dimensional(parametric):
        raise UnluckySliceError(
            f"sliced system is not zero-dimensional (k={k})")
    return quotient_degree(parametric)


def voronoi_degree_modp(spec: IdealSpec, point, *, codim: int | None = None,
                        seed: int = 0, replicas: int = 3,
                        max_reseeds: int = 5,
                        budget: int | None = None) -> DegreeExperiment:
    """Measure the Voronoi degree of V(I) at y over its prime field.

    Each replica draws fresh slice and saturation randomness from seed + i;
    a replica whose slice fails to cut the boundary to points is reseeded
    up to ``max_reseeds`` times.  The majority degree is reported, with all
    runs listed and a stability flag.
    """
    field = spec.ring.field
    if not isinstance(field, PrimeField):
        raise ValueError("degree experiments run over a prime field")
    c = codim if codim is not None else (spec.codim or len(spec.generators))
    runs = []
    for i in range(replicas):
        runs.append(_run_with_reseeds(spec, point, c, seed + i, field.p,
                                      max_reseeds, budget))
    return _stabilize(spec, point, c, seed, field.p, runs)


def hypersurface_degree_experiment(n: int, d: int, *,
                                   homogeneous: bool = False, seed: int = 0,
                                   primes: Sequence[int] = (32003, 65537,
                                                            32003),
                                   max_reseeds: int = 5,
                                   budget: int | None = None
                                   ) -> DegreeExperiment:
    """Measured Voronoi degree of a random degree-d hypersurface in n-space.

    Replica i generates its own hypersurface from seed + i over primes[i],
    so stability spans both the randomness and the choice of prime.  The
    homogeneous variant samples y on the cone away from the hyperplane
    y1 = 0 and measures the degree there.
    """
    runs = []
    first = None
    for i, prime in enumerate(primes):
        attempt = 0
        while True:
            gen_seed = seed + i + 1000003 * attempt
            spec, y = random_hypersurface(n, d, prime, gen_seed,
                                          homogeneous=homogeneous)
            if first is None:
                first = (spec, y)
            try:
                deg = _sliced_degree_once(spec, y, 1, gen_seed, budget)
            except (SingularPointError, UnluckySliceError):
                attempt += 1
                if attempt > max_reseeds:
                    raise
                continue
            runs.append((gen_seed, prime, deg))
            break
    spec, y = first
    return _stabilize(spec, y, 1, seed, primes[0], runs)


def _run_with_reseeds(spec, point, codim, seed, prime, max_reseeds, budget):
    attempt = 0
    while True:
        run_seed = seed + 1000003 * attempt
        try:
            return (run_seed, prime,
                    _sliced_degree_once(spec, point, codim, run_seed, budget))
        except UnluckySliceError:
            attempt += 1
            if attempt > max_reseeds:
                raise


def _stabilize(spec, point, codim, seed, prime, runs) -> DegreeExperiment:
    counts = Counter(deg for _, _, deg in runs)
    degree, _ = counts.most_common(1)[0]
    stable = len(counts) == 1
    return DegreeExperiment(spec, tuple(point), codim, seed, prime,
                            degree, stable, tuple(runs))
