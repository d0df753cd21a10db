"""Voronoi boundary ideals of a real algebraic variety at a point.

Given generators of a variety X and a point y on X, the nearest-point
regions of X partition ambient space; the region of y sits inside the
affine normal space of X at y, and its topological boundary lies on an
algebraic hypersurface of that normal space.  This module computes the
defining ideal of that hypersurface exactly:

1. augment the Jacobian of the generators with the row u - x and take the
   minors that cut the locus "u lies in the normal space at x";
2. specialize x := y to get the linear equations of the normal space at y;
3. intersect with the bisector condition |u - x|^2 = |u - y|^2, giving the
   ideal of critical displacement points;
4. remove the trivial solution x = y by saturation and eliminate x.

Internally the linear equations from step 2 are solved once and the whole
computation runs in the coordinates of the normal space (one parameter per
free coordinate), which keeps the elimination rings small; the result maps
back to the ambient coordinates afterwards.
"""
from __future__ import annotations

import time
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

from .exactmath.fields import QQ, RationalField
from .exactmath.orders import GREVLEX, BlockElim
from .exactmath.poly import Polynomial, PolyRing
from .exactmath.sturm import (
    count_roots,
    dense_degree,
    dense_eval,
    dense_from_poly,
    dense_gcd,
    dense_trim,
    isolate_real_roots,
    sturm_chain,
    squarefree_part,
)
from .groebner import (
    GroebnerBasis,
    IdealSpec,
    eliminate,
    groebner_basis,
    interreduce,
    intersect,
    is_zero_dimensional,
    quotient_degree,
)
from .unifactor import Factor, factor_rational


class PointNotOnVarietyError(ValueError):
    pass


class SingularPointError(ValueError):
    pass


class CodimensionError(ValueError):
    pass


def _fresh_names(count: int, prefix_options: Sequence[str], taken) -> tuple[str, ...]:
    for prefix in prefix_options:
        names = tuple(f"{prefix}{i + 1}" for i in range(count))
        if not (set(names) & set(taken)):
            return names
    raise ValueError("could not find unused variable names")


@dataclass(frozen=True)
class AugmentedJacobian:
    """Jacobian of the generators with the displacement row u - x on top."""

    work_ring: PolyRing           # ambient variables first, then the u block
    x_names: tuple[str, ...]
    u_names: tuple[str, ...]
    rows: tuple[tuple[Polynomial, ...], ...]   # (m + 1) x n


def augmented_jacobian(spec: IdealSpec) -> AugmentedJacobian:
    ring = spec.ring
    n = ring.nvars
    u_names = _fresh_names(n, ("u", "uu", "w"), ring.variables)
    work = PolyRing(ring.variables + u_names, field=ring.field, order=GREVLEX)
    var_map = list(range(n))
    xs = [work.variable(i) for i in range(n)]
    us = [work.variable(n + i) for i in range(n)]
    top = tuple(us[i] - xs[i] for i in range(n))
    rows = [top]
    for g in spec.generators:
        moved = g.map_ring(work, var_map)
        rows.append(tuple(moved.derivative(i) for i in range(n)))
    return AugmentedJacobian(work, ring.variables, u_names, tuple(rows))


def _det(matrix, ring: PolyRing) -> Polynomial:
    size = len(matrix)
    if size == 1:
        return matrix[0][0]
    if size == 2:
        return matrix[0][0] * matrix[1][1] - matrix[0][1] * matrix[1][0]
    total = ring.zero()
    for j in range(size):
        entry = matrix[0][j]
        if entry.is_zero():
            continue
        sub = [row[:j] + row[j + 1:] for row in matrix[1:]]
        term = entry * _det(sub, ring)
        total = total + term if j % 2 == 0 else total - term
    return total


def _minors(rows, size: int, ring: PolyRing) -> list[Polynomial]:
    """All size x size minors, zero ones dropped, in deterministic order."""
    from itertools import combinations

    nrows = len(rows)
    ncols = len(rows[0])
    out = []
    for ri in combinations(range(nrows), size):
        for ci in combinations(range(ncols), size):
            matrix = [[rows[r][c] for c in ci] for r in ri]
            d = _det(matrix, ring)
            if not d.is_zero():
                out.append(d)
    return out


def normal_bundle_ideal(spec: IdealSpec, *, codim: int | None = None) -> IdealSpec:
    """Generators plus the minors cutting "u - x normal to X at x"."""
    c = _expected_codim(spec, codim)
    aug = augmented_jacobian(spec)
    n = len(aug.x_names)
    var_map = list(range(n))
    moved = [g.map_ring(aug.work_ring, var_map) for g in spec.generators]
    gens = tuple(moved) + tuple(_minors(aug.rows, c + 1, aug.work_ring))
    return IdealSpec(aug.work_ring, gens, spec.codim)


def _expected_codim(spec: IdealSpec, codim: int | None) -> int:
    c = codim if codim is not None else spec.codim
    if c is None:
        c = len(spec.generators)
    if not 1 <= c <= spec.ring.nvars:
        raise CodimensionError(f"codimension {c} out of range")
    return c


@dataclass(frozen=True)
class NormalSpace:
    """The affine normal space of X at y, solved into parametric form.

    ``forms`` are the reduced linear equations in the ambient u-ring;
    ``parameter_matrix`` holds, for every u coordinate, its coefficients
    over the free parameters, so u = y + parameter_matrix * s.
    """

    u_ring: PolyRing
    point: tuple
    forms: tuple[Polynomial, ...]
    pivot_columns: tuple[int, ...]
    free_columns: tuple[int, ...]
    parameter_matrix: tuple[tuple, ...]
    jacobian_rank: int
    expected_codim: int

    @property
    def dimension(self) -> int:
        return len(self.free_columns)


def _rref(rows: list[list], field) -> tuple[list[list], list[int]]:
    rows = [list(r) for r in rows]
    ncols = len(rows[0]) if rows else 0
    pivots = []
    r = 0
    for col in range(ncols):
        pivot_row = None
        for i in range(r, len(rows)):
            if rows[i][col] != field.zero:
                pivot_row = i
                break
        if pivot_row is None:
            continue
        rows[r], rows[pivot_row] = rows[pivot_row], rows[r]
        inv = field.inv(rows[r][col])
        rows[r] = [field.mul(inv, v) for v in rows[r]]
        for i in range(len(rows)):
            if i != r and rows[i][col] != field.zero:
                factor = rows[i][col]
                rows[i] = [field.sub(a, field.mul(factor, b))
                           for a, b in zip(rows[i], rows[r])]
        pivots.append(col)
        r += 1
    return rows[:r], pivots


def normal_space_at(spec: IdealSpec, point: Sequence, *,
                    codim: int | None = None,
                    allow_singular: bool = False) -> NormalSpace:
    """Solve the equations of the normal space of X at a point of X.

    Raises PointNotOnVarietyError when the generators do not vanish at the
    point, CodimensionError when the Jacobian rank exceeds the declared
    codimension, and SingularPointError at a Jacobian rank drop unless
    ``allow_singular`` is set (then every direction counts as normal).
    """
    ring = spec.ring
    f = ring.field
    n = ring.nvars
    c = _expected_codim(spec, codim)
    y = tuple(f.coerce(v) for v in point)
    if len(y) != n:
        raise ValueError("point arity does not match the ring")
    for g in spec.generators:
        if g.evaluate(y) != f.zero:
            raise PointNotOnVarietyError(f"generator {g} does not vanish at the point")

    jac = [[g.derivative(i).evaluate(y) for i in range(n)] for g in spec.generators]
    jac_rref, jac_pivots = _rref(jac, f)
    rank = len(jac_pivots)
    if rank > c:
        raise CodimensionError(
            f"jacobian rank {rank} at the point exceeds declared codimension {c}")
    if rank < c and not allow_singular:
        raise SingularPointError(
            f"jacobian rank {rank} below codimension {c}; "
            "pass allow_singular to treat every direction as normal")

    u_names = _fresh_names(n, ("u", "uu", "w"), ring.variables)
    u_ring = PolyRing(u_names, field=f, order=GREVLEX)

    if rank < c:
        # every ambient direction is normal: no linear constraints
        frees = tuple(range(n))
        param = tuple(tuple(f.one if i == j else f.zero for j in range(n))
                      for i in range(n))
        return NormalSpace(u_ring, y, (), (), frees, param, rank, c)

    # linear forms: (c+1)-minors of the displacement row over the gradients
    us = [u_ring.variable(i) for i in range(n)]
    disp = [us[i] - u_ring.constant(y[i]) for i in range(n)]
    rows = [disp] + [[u_ring.constant(v) for v in row] for row in jac]
    lin = _minors(rows, c + 1, u_ring) if c + 1 <= n else []
    if not lin:
        # the whole space is normal (c = n leaves no linear condition)
        frees = tuple(range(n))
        param = tuple(tuple(f.one if i == j else f.zero for j in range(n))
                      for i in range(n))
        return NormalSpace(u_ring, y, (), (), frees, param, rank, c)
    coeff_rows = []
    for form in lin:
        # each minor vanishes at u = y, so the constant term is determined
        # by the linear coefficients and can be dropped here
        row = [f.zero] * n
        for mon, coeff in form.terms.items():
            if sum(mon) == 0:
                continue
            idx = [i for i, e in enumerate(mon) if e]
            if len(idx) != 1 or sum(mon) != 1:
                raise AssertionError("normal-space minor is not linear")
            row[idx[0]] = coeff
        coeff_rows.append(row)
    rref_rows, pivots = _rref(coeff_rows, f)
    frees = tuple(i for i in range(n) if i not in pivots)

    forms = []
    for row in rref_rows:
        poly = u_ring.zero()
        for i, coeff in enumerate(row):
            if coeff != f.zero:
                poly = poly + u_ring.constant(coeff) * disp[i]
        forms.append(poly)

    param = []
    for i in range(n):
        if i in pivots:
            r = pivots.index(i)
            row = tuple(f.neg(rref_rows[r][j]) for j in frees)
        else:
            j = frees.index(i)
            row = tuple(f.one if jj == j else f.zero for jj in range(len(frees)))
        param.append(row)
    return NormalSpace(u_ring, y, tuple(forms), tuple(pivots), frees,
                       tuple(param), rank, c)


def critical_ideal(spec: IdealSpec, point: Sequence, *,
                   codim: int | None = None,
                   allow_singular: bool = False) -> IdealSpec:
    """The ideal of critical displacement points, in the combined (x, u) ring.

    Generators: the variety equations, the normality minors at symbolic x,
    the normal-space equations at y, and the bisector between x and y.
    """
    c = _expected_codim(spec, codim)
    ns = normal_space_at(spec, point, codim=c, allow_singular=allow_singular)
    nb = normal_bundle_ideal(spec, codim=c)
    work = nb.ring
    f = work.field
    n = spec.ring.nvars
    y = ns.point
    xs = [work.variable(i) for i in range(n)]
    us = [work.variable(n + i) for i in range(n)]

    gens = list(nb.generators)
    u_map = [n + i for i in range(n)]
    gens.extend(form.map_ring(work, u_map) for form in ns.forms)

    bis = work.zero()
    for i in range(n):
        bis = bis + xs[i] * xs[i]
        bis = bis - work.constant(f.mul(y[i], y[i]))
        bis = bis - 2 * us[i] * (xs[i] - work.constant(y[i]))
    gens.append(bis)
    return IdealSpec(work, tuple(gens), spec.codim)


def parametric_critical_system(spec: IdealSpec, ns: NormalSpace, *,
                               codim: int | None = None,
                               slices: Sequence[Polynomial] = ()):
    """Rewrite the critical equations in normal-space parameters.

    The affine normal space at y is the image of u = y + P*s, with one
    parameter per free coordinate.  Substituting that image for u keeps all
    later eliminations in n + k variables instead of 2n.  Returns the
    parameter ring (x variables first, then s), the u coordinate images,
    and the critical generators: the variety equations, the normality
    minors, the bisector, and any u-ring slice polynomials composed onto
    the parameters.
    """
    ring = spec.ring
    f = ring.field
    n = ring.nvars
    c = _expected_codim(spec, codim)
    y = ns.point
    k = ns.dimension
    s_names = _fresh_names(k, ("s", "ss", "q"), ring.variables)
    sring = PolyRing(ring.variables + s_names, field=f, order=GREVLEX)
    xs = [sring.variable(i) for i in range(n)]
    ss = [sring.variable(n + j) for j in range(k)]

    u_images = []
    for i in range(n):
        expr = sring.constant(y[i])
        for j in range(k):
            coeff = ns.parameter_matrix[i][j]
            if coeff != f.zero:
                expr = expr + sring.constant(coeff) * ss[j]
        u_images.append(expr)

    x_map = list(range(n))
    gens = [g.map_ring(sring, x_map) for g in spec.generators]
    grad_rows = [[g.derivative(i) for i in range(n)] for g in gens]
    disp_row = [u_images[i] - xs[i] for i in range(n)]
    gens.extend(_minors([disp_row] + grad_rows, c + 1, sring))

    bis = sring.zero()
    for i in range(n):
        bis = bis + xs[i] * xs[i]
        bis = bis - sring.constant(f.mul(y[i], y[i]))
        bis = bis - 2 * u_images[i] * (xs[i] - sring.constant(y[i]))
    gens.append(bis)

    for extra in slices:
        if extra.ring != ns.u_ring:
            raise ValueError("slice polynomials must live in the u-ring")
        moved = extra.compose(sring, u_images)
        if not moved.is_zero():
            gens.append(moved)
    return sring, u_images, [g for g in gens if not g.is_zero()]


@dataclass(frozen=True)
class VoronoiComponent:
    """One factor of the boundary, as a reduced basis in the u-ring."""

    generators: tuple[Polynomial, ...]
    multiplicity: int
    certified_irreducible: bool | None


@dataclass
class VoronoiReport:
    spec: IdealSpec
    point: tuple
    normal_space: NormalSpace
    boundary: GroebnerBasis          # reduced basis in the ambient u-ring
    parametric: GroebnerBasis        # the same ideal in normal-space parameters
    degree: int | None
    components: tuple[VoronoiComponent, ...] | None
    timings: dict = field(default_factory=dict)


def voronoi_ideal(spec: IdealSpec, point: Sequence, *,
                  codim: int | None = None,
                  allow_singular: bool = False,
                  slices: Sequence[Polynomial] = (),
                  budget: int | None = None,
                  want_components: bool = True) -> VoronoiReport:
    """Compute the algebraic boundary of the nearest-point region at y.

    ``slices`` are extra polynomials in the u-ring (typically random affine
    lines) added before saturation; they cut the boundary down to points
    for degree counting.  The returned report carries the reduced basis in
    ambient coordinates, the same ideal in normal-space parameters, the
    degree when the parametric ideal is zero-dimensional or principal, and
    the factored components when the normal space is a line.
    """
    t_start = time.perf_counter()
    timings: dict = {}
    ring = spec.ring
    f = ring.field
    n = ring.nvars
    c = _expected_codim(spec, codim)

    t0 = time.perf_counter()
    ns = normal_space_at(spec, point, codim=c, allow_singular=allow_singular)
    y = ns.point
    k = ns.dimension
    timings["normal_space"] = time.perf_counter() - t0

    # working ring: ambient x variables plus one parameter per free direction
    t0 = time.perf_counter()
    sring, u_images, gens = parametric_critical_system(spec, ns, codim=c,
                                                       slices=slices)
    xs = [sring.variable(i) for i in range(n)]
    timings["critical"] = time.perf_counter() - t0

    # saturate away x = y, one displacement generator at a time, eliminating
    # the saturation variable and the x block in the same run
    t0 = time.perf_counter()
    tname = "_t"
    work = PolyRing((tname,) + sring.variables, field=f, order=BlockElim(1 + n))
    wmap = [work.index_of(v) for v in sring.variables]
    t = work.variable(tname)
    drop = [tname] + list(ring.variables)
    parts = []
    for i in range(n):
        moved = [g.map_ring(work, wmap) for g in gens]
        gi = xs[i] - sring.constant(y[i])
        moved.append(work.one() - t * gi.map_ring(work, wmap))
        parts.append(eliminate(moved, drop, work, budget=budget, stage="saturation"))
    timings["saturation"] = time.perf_counter() - t0

    t0 = time.perf_counter()
    combined = parts[0]
    for nxt in parts[1:]:
        combined = intersect(combined.polys, nxt.polys, combined.ring,
                             budget=budget, stage="intersection")
    parametric = combined
    timings["intersection"] = time.perf_counter() - t0

    # the boundary is a variety, so on a line the eliminated generator is
    # reduced to its squarefree part; the scheme multiplicities survive in
    # the component report below
    scheme_generator = None
    if (k == 1 and len(parametric.polys) == 1
            and isinstance(f, RationalField) and not parametric.is_unit_ideal()):
        scheme_generator = parametric.polys[0]
        dense = squarefree_part(dense_from_poly(scheme_generator))
        if dense_degree(dense) < scheme_generator.total_degree():
            svar = parametric.ring.variable(0)
            reduced = parametric.ring.zero()
            for coeff in reversed(dense):
                reduced = reduced * svar + parametric.ring.constant(coeff)
            parametric = GroebnerBasis(parametric.ring, (reduced.monic(),))

    t0 = time.perf_counter()
    degree: int | None = None
    if is_zero_dimensional(parametric):
        degree = quotient_degree(parametric)
    elif len(parametric.polys) == 1:
        degree = parametric.polys[0].total_degree()

    # map the parametric basis back to ambient coordinates and merge with
    # the linear equations of the normal space
    s_to_u = []
    for j in range(k):
        col = ns.free_columns[j]
        s_to_u.append(ns.u_ring.variable(col) - ns.u_ring.constant(y[col]))
    mapped = [p.compose(ns.u_ring, s_to_u) for p in parametric.polys]
    boundary = GroebnerBasis(ns.u_ring,
                             interreduce(list(ns.forms) + mapped, ns.u_ring,
                                         budget=budget))
    timings["mapback"] = time.perf_counter() - t0

    t0 = time.perf_counter()
    components = None
    if want_components and scheme_generator is not None:
        components = _line_components(scheme_generator, ns, budget)
    timings["components"] = time.perf_counter() - t0
    timings["total"] = time.perf_counter() - t_start
    return VoronoiReport(spec, y, ns, boundary, parametric, degree,
                         components, timings)


def _line_components(poly: Polynomial, ns: NormalSpace, budget) -> tuple[VoronoiComponent, ...]:
    """Factor a univariate parametric boundary into irreducible components."""
    dense = dense_from_poly(poly, var=0)
    col = ns.free_columns[0]
    image = ns.u_ring.variable(col) - ns.u_ring.constant(ns.point[col])
    out = []
    for factor in factor_rational(dense):
        upoly = ns.u_ring.zero()
        power = ns.u_ring.one()
        for coeff in factor.coefficients:
            if coeff:
                upoly = upoly + ns.u_ring.constant(coeff) * power
            power = power * image
        gens = interreduce(list(ns.forms) + [upoly], ns.u_ring, budget=budget)
        out.append(VoronoiComponent(gens, factor.multiplicity,
                                    factor.certified_irreducible))
    return tuple(out)


@dataclass(frozen=True)
class RootBracket:
    lower: Fraction
    upper: Fraction

    @property
    def exact(self) -> bool:
        return self.lower == self.upper

    def midpoint(self) -> float:
        return float((self.lower + self.upper) / 2)


@dataclass
class NormalLineSection:
    """The boundary restricted to the gradient line u = y + lambda * grad."""

    gradient: tuple
    coefficients: tuple[Fraction, ...]   # boundary polynomial in lambda
    roots: tuple[RootBracket, ...]
    lambda_lower: RootBracket | None     # nearest root below zero
    lambda_upper: RootBracket | None     # nearest root above zero
    reach: float                         # distance from y to the boundary

    def cell_bounds(self) -> tuple[float, float]:
        lo = self.lambda_lower.midpoint() if self.lambda_lower else float("-inf")
        hi = self.lambda_upper.midpoint() if self.lambda_upper else float("inf")
        return lo, hi


def boundary_on_normal_line(report: VoronoiReport, *,
                            precision: Fraction = Fraction(1, 10**12)) -> NormalLineSection:
    """Restrict the boundary to the line y + lambda * gradient (codim 1 only).

    This re-substitutes into the ambient-coordinate basis, independently of
    the parameterization the pipeline used, so it doubles as a consistency
    check.  Roots of the restricted polynomial are isolated below the given
    width; the nearest roots on each side of lambda = 0 bound the cell.
    """
    spec = report.spec
    if len(spec.generators) != 1:
        raise ValueError("the normal line is defined for one defining equation")
    f = spec.ring.field
    if not isinstance(f, RationalField):
        raise ValueError("normal-line sections need rational coefficients")
    n = spec.ring.nvars
    g = spec.generators[0]
    grad = tuple(g.derivative(i).evaluate(report.point) for i in range(n))
    if all(v == 0 for v in grad):
        raise SingularPointError("gradient vanishes; no normal line")

    lring = PolyRing(("lam",), field=f, order=GREVLEX)
    lam = lring.variable(0)
    images = [lring.constant(report.point[i]) + lring.constant(grad[i]) * lam
              for i in range(n)]
    restricted = None
    for p in report.boundary.polys:
        moved = p.compose(lring, images)
        dense = dense_from_poly(moved, var=0) if not moved.is_zero() else []
        if not dense:
            continue
        restricted = dense if restricted is None else dense_gcd(restricted, dense)
    if restricted is None or len(dense_trim(restricted)) <= 1:
        # boundary misses the line entirely
        return NormalLineSection(grad, tuple(dense_trim(restricted or [])),
                                 (), None, None, float("inf"))
    lead = restricted[-1]
    restricted = [c / lead for c in restricted]

    brackets = [RootBracket(lo, hi) for lo, hi in
                isolate_real_roots(restricted, precision)]
    at_zero = dense_eval(restricted, Fraction(0)) == 0
    sf = squarefree_part(restricted)
    chain = sturm_chain(sf)
    refined = []
    for br in brackets:
        lo, hi = br.lower, br.upper
        if not at_zero and lo < 0 < hi:
            # split the bracket so its sign is determined
            if count_roots(chain, lo, Fraction(0)) == 1:
                hi = Fraction(0)
            else:
                lo = Fraction(0)
        refined.append(RootBracket(lo, hi))

    lam_lo = None
    lam_hi = None
    for br in refined:
        if br.upper <= 0 and not (br.exact and br.upper == 0):
            if lam_lo is None or br.upper > lam_lo.upper:
                lam_lo = br
        if br.lower >= 0 and not (br.exact and br.lower == 0):
            if lam_hi is None or br.lower < lam_hi.lower:
                lam_hi = br
    if at_zero:
        zero = RootBracket(Fraction(0), Fraction(0))
        lam_lo = lam_hi = zero

    norm = float(sum(Fraction(v) * Fraction(v) for v in grad)) ** 0.5
    if at_zero:
        reach = 0.0
    elif refined:
        reach = min(abs(br.midpoint()) for br in refined) * norm
    else:
        reach = float("inf")
    return NormalLineSection(grad, tuple(restricted), tuple(refined),
                             lam_lo, lam_hi, reach)
