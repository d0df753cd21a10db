"""Voronoi boundary pipeline against hand-verified fixtures.

The worked examples here have closed-form answers (checked by hand or by an
independent slow route in the full 2n-variable ring), so every assertion is
an exact symbolic comparison unless a float tolerance is stated.
"""
from fractions import Fraction

import pytest

from voronoi_cells.exactmath import (
    count_real_roots,
    dense_from_poly,
    parse_polynomial,
)
from voronoi_cells.groebner import (
    BudgetExhaustedError,
    GroebnerBasis,
    IdealSpec,
    eliminate,
    groebner_basis,
    intersect,
    quotient_degree,
    saturate,
)
from voronoi_cells.voronoi import (
    CodimensionError,
    PointNotOnVarietyError,
    SingularPointError,
    augmented_jacobian,
    boundary_on_normal_line,
    critical_ideal,
    normal_bundle_ideal,
    normal_space_at,
    voronoi_ideal,
)

QUADRIC = "x1^2 + x2^2 + x3^2 - 3*x1*x2 - 5*x1*x3 - 7*x2*x3 + x1 + x2 + x3"
CUSPIDAL = "x1^3 - x2^2"
CARDIOID = "(x1^2 + x2^2 + x1)^2 - x1^2 - x2^2"


def _polyset(ring, texts):
    return {parse_polynomial(t, ring).monic() for t in texts}


@pytest.fixture(scope="module")
def quadric_report():
    spec = IdealSpec.from_strings(("x1", "x2", "x3"), [QUADRIC])
    return voronoi_ideal(spec, (0, 0, 0))


@pytest.fixture(scope="module")
def cuspidal_report():
    spec = IdealSpec.from_strings(("x1", "x2"), [CUSPIDAL])
    return voronoi_ideal(spec, (4, 8))


class TestNormalSpace:
    def test_quadric_linear_forms(self, quadric_report):
        ns = quadric_report.normal_space
        assert _polyset(ns.u_ring, ["u1 - u3", "u2 - u3"]) == set(ns.forms)
        assert ns.dimension == 1
        assert ns.free_columns == (2,)
        assert ns.jacobian_rank == 1

    def test_cuspidal_linear_form(self, cuspidal_report):
        ns = cuspidal_report.normal_space
        assert _polyset(ns.u_ring, ["u1 + 3*u2 - 28"]) == set(ns.forms)
        assert ns.dimension == 1

    def test_axis_aligned_gradient(self):
        # f = x3 - x1^2 - x2^2 at origin: gradient is e3, normal space the
        # x3-axis, so the linear part is <u1, u2>
        spec = IdealSpec.from_strings(("x1", "x2", "x3"), ["x3 - x1^2 - x2^2"])
        ns = normal_space_at(spec, (0, 0, 0))
        assert _polyset(ns.u_ring, ["u1", "u2"]) == set(ns.forms)

    def test_point_off_variety_rejected(self):
        spec = IdealSpec.from_strings(("x1", "x2", "x3"), [QUADRIC])
        with pytest.raises(PointNotOnVarietyError):
            normal_space_at(spec, (1, 1, 1))

    def test_rank_above_codimension_rejected(self):
        spec = IdealSpec.from_strings(("x1", "x2"), ["x1", "x2"], codim=1)
        with pytest.raises(CodimensionError):
            normal_space_at(spec, (0, 0))

    def test_singular_point_needs_flag(self):
        spec = IdealSpec.from_strings(("x1", "x2"), [CUSPIDAL])
        with pytest.raises(SingularPointError):
            normal_space_at(spec, (0, 0))
        ns = normal_space_at(spec, (0, 0), allow_singular=True)
        assert ns.forms == ()
        assert ns.free_columns == (0, 1)


class TestAugmentedJacobian:
    def test_cuspidal_matrix(self):
        spec = IdealSpec.from_strings(("x1", "x2"), [CUSPIDAL])
        aug = augmented_jacobian(spec)
        ring = aug.work_ring
        expected_rows = [
            ["u1 - x1", "u2 - x2"],
            ["3*x1^2", "-2*x2"],
        ]
        assert len(aug.rows) == 2
        for row, exp in zip(aug.rows, expected_rows):
            assert [str(p) for p in row] == [
                str(parse_polynomial(t, ring)) for t in exp]

    def test_twisted_cubic_minor_count(self):
        spec = IdealSpec.from_strings(
            ("x1", "x2", "x3"), ["x2 - x1^2", "x3 - x1*x2"], codim=2)
        nb = normal_bundle_ideal(spec)
        # two variety generators plus the single 3x3 determinant
        assert len(nb.generators) == 3

    def test_critical_ideal_bisector(self):
        spec = IdealSpec.from_strings(("x1", "x2"), [CUSPIDAL])
        ci = critical_ideal(spec, (4, 8))
        ring = ci.ring
        bis = parse_polynomial(
            "x1^2 + x2^2 - 2*u1*x1 - 2*u2*x2 + 8*u1 + 16*u2 - 80", ring)
        assert bis in set(ci.generators)
        # generator count: variety + minor + linear form + bisector
        assert len(ci.generators) == 4


class TestQuadricGolden:
    def test_boundary_ideal_exact(self, quadric_report):
        ring = quadric_report.boundary.ring
        expected = _polyset(ring, [
            "368*u3^3 + 71*u3^2 - 6*u3 - 1",
            "u1 - u3",
            "u2 - u3",
        ])
        assert set(quadric_report.boundary.polys) == expected
        assert quadric_report.degree == 3

    def test_slow_route_agrees(self, quadric_report):
        # saturate the critical ideal in the full (x, u) ring by each
        # displacement coordinate, then eliminate x: same boundary ideal
        spec = IdealSpec.from_strings(("x1", "x2", "x3"), [QUADRIC])
        ci = critical_ideal(spec, (0, 0, 0))
        xs = [ci.ring.variable(i) for i in range(3)]
        sat = saturate(ci.generators, xs, ci.ring)
        slow = eliminate(sat.polys, ["x1", "x2", "x3"], sat.ring)
        fast = {str(p) for p in quadric_report.boundary.polys}
        assert {str(p) for p in slow.polys} == fast

    def test_cell_endpoints(self, quadric_report):
        section = boundary_on_normal_line(quadric_report)
        assert len(section.roots) == 3
        lo, hi = section.cell_bounds()
        assert abs(lo - (-0.106526)) < 1e-5
        assert abs(hi - 0.12225) < 1e-5
        # gradient has unit entries so the reach picks up a factor sqrt(3)
        assert abs(section.reach - 0.106526 * 3 ** 0.5) < 1e-4

    def test_output_purity(self, quadric_report):
        uvars = set(range(3))
        for p in quadric_report.boundary.polys:
            assert p.ring is quadric_report.boundary.ring
            assert set(p.variables_used()) <= uvars


class TestCuspidalGolden:
    def test_minimal_components(self, cuspidal_report):
        ring = cuspidal_report.boundary.ring
        got = {
            (frozenset(comp.generators), comp.multiplicity,
             comp.certified_irreducible)
            for comp in cuspidal_report.components
        }
        expected = {
            (frozenset(_polyset(ring, ["u1 - 28", "u2"])), 1, True),
            (frozenset(_polyset(ring, ["u1 + 26", "u2 - 18"])), 3, True),
            (frozenset(_polyset(ring,
                ["u1 + 3*u2 - 28", "27*u2^2 - 486*u2 + 2197"])), 1, True),
        }
        assert got == expected

    def test_boundary_equals_component_intersection(self, cuspidal_report):
        ring = cuspidal_report.boundary.ring
        comps = [list(c.generators) for c in cuspidal_report.components]
        acc = comps[0]
        for nxt in comps[1:]:
            acc = list(intersect(acc, nxt, ring).polys)
        inter = groebner_basis(acc, ring)
        assert set(inter.polys) == set(cuspidal_report.boundary.polys)
        assert quotient_degree(inter) == 4
        assert cuspidal_report.degree == 4

    def test_quadratic_component_has_no_real_points(self, cuspidal_report):
        ring = cuspidal_report.boundary.ring
        quad = parse_polynomial("27*u2^2 - 486*u2 + 2197", ring)
        assert count_real_roots(dense_from_poly(quad)) == 0

    def test_real_boundary_points(self, cuspidal_report):
        # rational components pin the two real boundary points exactly
        ring = cuspidal_report.boundary.ring
        pts = {(Fraction(28), Fraction(0)), (Fraction(-26), Fraction(18))}
        rational_pts = set()
        for comp in cuspidal_report.components:
            gens = set(comp.generators)
            if all(g.total_degree() == 1 for g in gens):
                sol = _solve_two_linear(ring, gens)
                rational_pts.add(sol)
        assert rational_pts == pts

    def test_boundary_points_equidistant_to_second_critical_point(self):
        # right endpoint pairs with (4,-8), left endpoint with the cusp
        def d2(a, b):
            return sum((Fraction(p) - Fraction(q)) ** 2 for p, q in zip(a, b))

        y = (4, 8)
        assert d2((28, 0), y) == d2((28, 0), (4, -8)) == 640
        assert d2((-26, 18), y) == d2((-26, 18), (0, 0)) == 1000
        # both partner points lie on the curve
        assert 4 ** 3 - (-8) ** 2 == 0

    def test_nearest_point_oracle_on_parameterized_curve(self):
        # the curve is t -> (t^2, t^3); inside the cell the nearest curve
        # point to u = y + lambda * grad stays y itself, past the boundary
        # root at lambda = 1/2 it jumps to the mirror branch
        def nearest_t(u):
            best = None
            for k in range(-4000, 4001):
                t = k / 1000.0
                d = (t * t - u[0]) ** 2 + (t ** 3 - u[1]) ** 2
                if best is None or d < best[0]:
                    best = (d, t)
            return best[1]

        grad = (48, -16)
        for lam, expect_home in ((-0.5, True), (0.0, True), (0.45, True),
                                 (0.6, False), (-0.7, False)):
            u = (4 + lam * grad[0], 8 + lam * grad[1])
            t_star = nearest_t(u)
            if expect_home:
                assert abs(t_star - 2.0) < 2e-3
            else:
                assert abs(t_star - 2.0) > 0.05

    def test_cell_bounds_on_normal_line(self, cuspidal_report):
        section = boundary_on_normal_line(cuspidal_report)
        lo, hi = section.cell_bounds()
        assert abs(lo - (-0.625)) < 1e-9
        assert abs(hi - 0.5) < 1e-9


class TestSingularAndHigherCodim:
    def test_cusp_boundary_up_to_scalar(self):
        spec = IdealSpec.from_strings(("x1", "x2"), [CUSPIDAL])
        with pytest.raises(SingularPointError):
            voronoi_ideal(spec, (0, 0))
        report = voronoi_ideal(spec, (0, 0), allow_singular=True)
        ring = report.boundary.ring
        expected = parse_polynomial(
            "27*u2^4 + 128*u1^3 + 72*u1*u2^2 + 32*u1^2 + u2^2 + 2*u1",
            ring).monic()
        assert [p.monic() for p in report.boundary.polys] == [expected]
        assert report.degree == 4

    def test_twisted_cubic_plane_quartic(self):
        spec = IdealSpec.from_strings(
            ("x1", "x2", "x3"), ["x2 - x1^2", "x3 - x1*x2"], codim=2)
        report = voronoi_ideal(spec, (0, 0, 0))
        ring = report.boundary.ring
        assert set(report.normal_space.forms) == _polyset(ring, ["u1"])
        expected = _polyset(ring, [
            "27*u3^4 + 128*u2^3 + 72*u2*u3^2 - 160*u2^2 - 35*u3^2"
            " + 66*u2 - 9",
            "u1",
        ])
        assert set(report.boundary.polys) == expected
        assert report.degree == 4

    def test_twisted_cubic_sliced_to_points(self):
        # one generic affine slice cuts the quartic boundary curve of the
        # normal plane down to four points, counted with multiplicity
        spec = IdealSpec.from_strings(
            ("x1", "x2", "x3"), ["x2 - x1^2", "x3 - x1*x2"], codim=2)
        ns = normal_space_at(spec, (0, 0, 0))
        cut = parse_polynomial("u2 + 2*u3 - 1", ns.u_ring)
        report = voronoi_ideal(spec, (0, 0, 0), slices=(cut,))
        assert report.degree == 4

    def test_sphere_boundary_is_center(self):
        spec = IdealSpec.from_strings(
            ("x1", "x2", "x3"), ["x1^2 + x2^2 + x3^2 - 1"])
        report = voronoi_ideal(spec, (1, 0, 0))
        ring = report.boundary.ring
        assert set(report.boundary.polys) == _polyset(ring, ["u1", "u2", "u3"])
        assert report.degree == 1
        section = boundary_on_normal_line(report)
        assert section.lambda_upper is None
        bracket = section.lambda_lower
        assert bracket.lower <= Fraction(-1, 2) <= bracket.upper
        assert abs(section.reach - 1.0) < 1e-9


class TestCardioid:
    def test_boundary_and_components(self):
        spec = IdealSpec.from_strings(("x1", "x2"), [CARDIOID])
        report = voronoi_ideal(spec, (0, 1))
        ring = report.boundary.ring
        expected = _polyset(ring, ["2*u2^2 - u2", "u1 - u2 + 1"])
        assert set(report.boundary.polys) == expected
        got = {(frozenset(c.generators), c.multiplicity)
               for c in report.components}
        assert got == {
            (frozenset(_polyset(ring, ["u1 + 1", "u2"])), 1),
            (frozenset(_polyset(ring, ["2*u1 + 1", "2*u2 - 1"])), 3),
        }

    def test_ray_reach(self):
        spec = IdealSpec.from_strings(("x1", "x2"), [CARDIOID])
        report = voronoi_ideal(spec, (0, 1))
        section = boundary_on_normal_line(report)
        assert section.gradient == (Fraction(2), Fraction(2))
        lo, hi = section.cell_bounds()
        assert abs(lo - (-0.25)) < 1e-9
        assert hi == float("inf")
        # boundary point y + lambda*grad at lambda = -1/4 is (-1/2, 1/2)
        assert abs(section.reach - 2 ** 0.5 / 2) < 1e-9


class TestEquivariance:
    def test_rotated_cuspidal_cubic(self, cuspidal_report):
        # rotate by R = [[3,-4],[4,3]]/5; the rotated variety's boundary
        # ideal at Ry is the original boundary ideal pulled back by R^T
        spec = IdealSpec.from_strings(("x1", "x2"), [CUSPIDAL])
        ring = spec.ring
        x1, x2 = ring.gens()
        fifth = Fraction(1, 5)
        a = x1.scale(3 * fifth) + x2.scale(4 * fifth)
        b = x1.scale(-4 * fifth) + x2.scale(3 * fifth)
        rotated = IdealSpec(ring, (a ** 3 - b ** 2,))
        y_rot = (Fraction(3 * 4 - 4 * 8, 5), Fraction(4 * 4 + 3 * 8, 5))
        assert y_rot == (Fraction(-4), Fraction(8))
        report_rot = voronoi_ideal(rotated, y_rot)

        uring = cuspidal_report.boundary.ring
        u1, u2 = uring.gens()
        ra = u1.scale(3 * fifth) + u2.scale(4 * fifth)
        rb = u1.scale(-4 * fifth) + u2.scale(3 * fifth)
        pulled = [p.compose(uring, [ra, rb])
                  for p in cuspidal_report.boundary.polys]
        pulled_gb = groebner_basis(pulled, uring)
        assert set(pulled_gb.polys) == set(report_rot.boundary.polys)


class TestBudget:
    def test_budget_exhaustion_reports_stage(self):
        spec = IdealSpec.from_strings(("x1", "x2", "x3"), [QUADRIC])
        with pytest.raises(BudgetExhaustedError) as err:
            voronoi_ideal(spec, (0, 0, 0), budget=25)
        assert err.value.stage in {"saturation", "intersection", "groebner"}


def _solve_two_linear(ring, gens):
    """Exact solution of two independent affine-linear forms in u1, u2."""
    rows = []
    for g in sorted(gens, key=str):
        row = [Fraction(0), Fraction(0), Fraction(0)]
        for mon, coeff in g.terms.items():
            if sum(mon) == 0:
                row[2] = coeff
            else:
                row[mon.index(1)] = coeff
        rows.append(row)
    (a, b, e), (c, d, f) = rows
    det = a * d - b * c
    assert det != 0
    return ((-e * d + b * f) / det, (-a * f + c * e) / det)
