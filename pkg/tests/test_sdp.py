"""Spectrahedral membership certificates and the LMI feasibility engine."""
import math
from fractions import Fraction

import numpy as np
import pytest

from voronoi_cells.exactmath import PolyRing, parse_polynomial
from voronoi_cells.sdp import (
    LMIFeasibilityProblem,
    QuadricSystem,
    hessian,
    level1_membership,
    leveld_membership,
    lmi_feasible,
    veronese_lift,
)
from voronoi_cells.voronoi import PointNotOnVarietyError

RING3 = PolyRing(("x1", "x2", "x3"))
TWISTED_CUBIC = (parse_polynomial("x2 - x1^2", RING3),
                 parse_polynomial("x3 - x1*x2", RING3))
ORIGIN = (0.0, 0.0, 0.0)

RING2 = PolyRing(("x1", "x2"))
CARDIOID = parse_polynomial("(x1^2 + x2^2 + x1)^2 - x1^2 - x2^2", RING2)
CARDIOID_POINT = (0.0, 1.0)


def min_distance_to_curve(point_fn, u, lo, hi, samples=4001):
    """Distance from u to a parameterized curve, by dense sampling plus
    golden-section refinement around the best bracket."""
    u = np.asarray(u, dtype=float)

    def dist(t):
        return float(np.linalg.norm(np.asarray(point_fn(t)) - u))

    ts = np.linspace(lo, hi, samples)
    i = int(np.argmin([dist(t) for t in ts]))
    a = ts[max(i - 1, 0)]
    b = ts[min(i + 1, samples - 1)]
    shrink = (math.sqrt(5.0) - 1.0) / 2.0
    for _ in range(80):
        c = b - shrink * (b - a)
        d = a + shrink * (b - a)
        if dist(c) < dist(d):
            b = d
        else:
            a = c
    return dist((a + b) / 2.0)


class TestHessian:
    def test_single_square(self):
        f = parse_polynomial("x1^2", RING3)
        assert np.array_equal(hessian(f), np.diag([2.0, 0.0, 0.0]))

    def test_parabola_constraint(self):
        h = hessian(TWISTED_CUBIC[0])
        expected = np.zeros((3, 3))
        expected[0, 0] = -2.0
        assert np.array_equal(h, expected)

    def test_bilinear_constraint(self):
        h = hessian(TWISTED_CUBIC[1])
        expected = np.zeros((3, 3))
        expected[0, 1] = expected[1, 0] = -1.0
        assert np.array_equal(h, expected)

    def test_linear_and_constant_terms_vanish(self):
        f = parse_polynomial("x1*x2 + 3*x1 - 7", RING3)
        h = hessian(f)
        assert h[0, 1] == 1.0 and h[1, 0] == 1.0
        assert np.abs(h).sum() == 2.0

    def test_rejects_cubics(self):
        with pytest.raises(ValueError):
            hessian(parse_polynomial("x1^3", RING3))


class TestQuadricSystem:
    def test_jacobian_columns_are_gradients(self):
        system = QuadricSystem.from_polynomials(TWISTED_CUBIC)
        jac = system.jacobian_at(ORIGIN)
        assert np.array_equal(jac[:, 0], [0.0, 1.0, 0.0])
        assert np.array_equal(jac[:, 1], [0.0, 0.0, 1.0])
        jac = system.jacobian_at((1.0, 1.0, 1.0))
        assert np.array_equal(jac[:, 0], [-2.0, 1.0, 0.0])
        assert np.array_equal(jac[:, 1], [-1.0, -1.0, 1.0])

    def test_residual(self):
        system = QuadricSystem.from_polynomials(TWISTED_CUBIC)
        assert system.residual_at(ORIGIN) == 0.0
        assert system.residual_at((1.0, 1.0, 1.0)) == 0.0
        assert system.residual_at((1.0, 0.0, 0.0)) == 1.0

    def test_rejects_empty_and_mixed_rings(self):
        with pytest.raises(ValueError):
            QuadricSystem.from_polynomials(())
        with pytest.raises(ValueError):
            QuadricSystem.from_polynomials(
                [TWISTED_CUBIC[0], parse_polynomial("x1", RING2)])


class TestLMIEngine:
    def test_identity_is_feasible(self):
        problem = LMIFeasibilityProblem(
            lhs=(np.eye(2),), rhs=np.eye(2),
            eq_matrix=np.zeros((0, 1)), eq_rhs=np.zeros(0))
        res = lmi_feasible(problem)
        assert res.status == "feasible"

    def test_forced_multiplier_is_infeasible_with_unit_margin(self):
        # lam pinned to 2 makes 2I - I have top eigenvalue exactly 1
        problem = LMIFeasibilityProblem(
            lhs=(np.eye(2),), rhs=np.eye(2),
            eq_matrix=np.array([[1.0]]), eq_rhs=np.array([2.0]))
        res = lmi_feasible(problem)
        assert res.status == "infeasible"
        assert res.margin == pytest.approx(1.0)

    def test_zero_multiplier_feasible_for_psd_rhs(self):
        rng = np.random.default_rng(3)
        b = rng.standard_normal((3, 3))
        problem = LMIFeasibilityProblem(
            lhs=(b + b.T,), rhs=np.eye(3),
            eq_matrix=np.array([[1.0]]), eq_rhs=np.array([0.0]))
        res = lmi_feasible(problem)
        assert res.status == "feasible"
        assert np.abs(res.witness).max() <= 1e-12

    def test_inconsistent_equalities(self):
        problem = LMIFeasibilityProblem(
            lhs=(np.eye(2),), rhs=np.eye(2),
            eq_matrix=np.array([[1.0], [1.0]]), eq_rhs=np.array([1.0, 2.0]))
        res = lmi_feasible(problem)
        assert res.status == "infeasible"
        assert res.reason == "inconsistent-equalities"
        assert res.margin == math.inf

    def test_subgradient_walks_to_a_witness(self):
        # minimum-norm start (2, -2) violates the bound; the feasible
        # segment lam1 <= 1.5 with lam1 - lam2 = 4 must be found
        problem = LMIFeasibilityProblem(
            lhs=(np.diag([1.0, 0.0]), np.diag([0.0, 1.0])),
            rhs=1.5 * np.eye(2),
            eq_matrix=np.array([[1.0, -1.0]]), eq_rhs=np.array([4.0]))
        res = lmi_feasible(problem)
        assert res.status == "feasible"
        lam = res.witness
        assert lam[0] - lam[1] == pytest.approx(4.0)
        top = max(np.linalg.eigvalsh(
            lam[0] * np.diag([1.0, 0.0]) + lam[1] * np.diag([0.0, 1.0])
            - 1.5 * np.eye(2)))
        assert top <= problem.tol * 1.01

    def test_unbounded_direction_stalls_to_infeasible(self):
        # max(lam + 1, 1 - lam) is at least 1 for every lam
        problem = LMIFeasibilityProblem(
            lhs=(np.diag([1.0, -1.0]),), rhs=-np.eye(2),
            eq_matrix=np.zeros((0, 1)), eq_rhs=np.zeros(0))
        res = lmi_feasible(problem)
        assert res.status == "infeasible"
        assert res.margin == pytest.approx(1.0, abs=1e-6)

    def test_facial_reduction_zero_diagonal(self):
        # B has an identically zero diagonal entry, so feasibility forces
        # the off-diagonal row to match C exactly, pinning lam to 0
        problem = LMIFeasibilityProblem(
            lhs=(np.array([[0.0, 1.0], [1.0, 0.0]]),),
            rhs=np.diag([0.0, 2.0]),
            eq_matrix=np.zeros((0, 1)), eq_rhs=np.zeros(0))
        res = lmi_feasible(problem)
        assert res.status == "feasible"
        assert np.abs(res.witness).max() <= 1e-9

    def test_facial_reduction_detects_unreachable_row(self):
        # the zero diagonal needs lam = 1 on the row while the equality
        # system demands lam = 0
        problem = LMIFeasibilityProblem(
            lhs=(np.array([[0.0, 1.0], [1.0, 0.0]]),),
            rhs=np.array([[0.0, 1.0], [1.0, 2.0]]),
            eq_matrix=np.array([[1.0]]), eq_rhs=np.array([0.0]))
        res = lmi_feasible(problem)
        assert res.status == "infeasible"
        assert res.reason == "zero-diagonal-row"

    def test_vacuous_problem_after_reduction(self):
        problem = LMIFeasibilityProblem(
            lhs=(np.zeros((1, 1)),), rhs=np.zeros((1, 1)),
            eq_matrix=np.zeros((0, 1)), eq_rhs=np.zeros(0))
        res = lmi_feasible(problem)
        assert res.status == "feasible"

    def test_validates_shapes_and_symmetry(self):
        with pytest.raises(ValueError):
            lmi_feasible(LMIFeasibilityProblem(
                lhs=(np.array([[0.0, 1.0], [0.0, 0.0]]),), rhs=np.eye(2),
                eq_matrix=np.zeros((0, 1)), eq_rhs=np.zeros(0)))
        with pytest.raises(ValueError):
            lmi_feasible(LMIFeasibilityProblem(
                lhs=(np.eye(3),), rhs=np.eye(2),
                eq_matrix=np.zeros((0, 1)), eq_rhs=np.zeros(0)))
        with pytest.raises(ValueError):
            lmi_feasible(LMIFeasibilityProblem(
                lhs=(np.eye(2),), rhs=np.eye(2),
                eq_matrix=np.ones((1, 3)), eq_rhs=np.ones(1)))


class TestVeroneseLift:
    def test_smallest_lift(self):
        ring = PolyRing(("x1",))
        lift = veronese_lift([parse_polynomial("x1^4 - 1", ring)], 1, 2)
        assert lift.indices == ((1,), (2,))
        assert lift.dimension == 2
        assert lift.relation_count == 1
        relation = lift.quadrics[1]
        assert relation.terms == {(0, 0): Fraction(1), (1,): Fraction(-1)}

    def test_cardioid_lift_layout(self):
        lift = veronese_lift([CARDIOID], 2, 2)
        assert lift.dimension == 5
        assert lift.indices == ((1, 0), (0, 1), (2, 0), (1, 1), (0, 2))
        assert lift.lifted_count == 1
        assert lift.relation_count == 6

    def test_cardioid_lifted_quadric_terms(self):
        lift = veronese_lift([CARDIOID], 2, 2)
        q = lift.quadrics[0]
        assert q.terms == {
            (2, 2): Fraction(1),
            (2, 4): Fraction(2),
            (4, 4): Fraction(1),
            (0, 2): Fraction(2),
            (1, 3): Fraction(2),
            (4,): Fraction(-1),
        }

    def test_cardioid_relation_set(self):
        lift = veronese_lift([CARDIOID], 2, 2)
        got = {frozenset(q.terms) for q in lift.quadrics[1:]}
        expected = {
            frozenset({(0, 0), (2,)}),   # z1^2 = z3
            frozenset({(0, 1), (3,)}),   # z1 z2 = z4
            frozenset({(1, 1), (4,)}),   # z2^2 = z5
            frozenset({(0, 3), (1, 2)}),  # z1 z4 = z2 z3
            frozenset({(0, 4), (1, 3)}),  # z1 z5 = z2 z4
            frozenset({(3, 3), (2, 4)}),  # z4^2 = z3 z5
        }
        assert got == expected

    def test_linear_coordinates_come_first(self):
        for n, d in [(1, 3), (2, 2), (2, 3), (3, 2)]:
            lift_indices = veronese_lift(
                [PolyRing(tuple(f"x{i+1}" for i in range(n))).variable(0)],
                n, d).indices
            units = tuple(tuple(1 if j == i else 0 for j in range(n))
                          for i in range(n))
            assert lift_indices[:n] == units

    def test_rejects_degree_overflow(self):
        with pytest.raises(ValueError):
            veronese_lift([CARDIOID], 2, 1)

    def test_rejects_oversized_lift(self):
        ring = PolyRing(("x1", "x2", "x3", "x4"))
        with pytest.raises(ValueError):
            veronese_lift([ring.variable(0)], 4, 4)  # needs 69 coordinates

    def test_randomized_lift_reproduces_inputs(self):
        rng = np.random.default_rng(17)
        for n in (1, 2, 3):
            ring = PolyRing(tuple(f"x{i+1}" for i in range(n)))
            for d in (1, 2, 3):
                mons = [tuple(int(e) for e in mon)
                        for mon in rng.integers(0, 2 * d + 1, size=(8, n))
                        if 0 < sum(mon) <= 2 * d]
                if not mons:
                    continue
                terms = {mon: Fraction(int(rng.integers(-5, 6)) or 1)
                         for mon in mons}
                f = ring.from_terms(terms)
                lift = veronese_lift([f], n, d)
                assert lift.quadrics[0].pullback(ring, lift.indices) == f


class TestLevelOne:
    def test_inside_the_tangent_parabola(self):
        res = level1_membership(TWISTED_CUBIC, ORIGIN, (0.0, 0.4, 0.0))
        assert res.status == "member"

    def test_outside_the_tangent_parabola(self):
        res = level1_membership(TWISTED_CUBIC, ORIGIN, (0.0, 0.6, 0.0))
        assert res.status == "non-member"

    def test_base_point_is_a_member_with_zero_witness(self):
        res = level1_membership(TWISTED_CUBIC, ORIGIN, ORIGIN)
        assert res.status == "member"
        assert np.abs(res.witness).max() <= 1e-12

    def test_off_normal_direction_is_rejected(self):
        res = level1_membership(TWISTED_CUBIC, ORIGIN, (0.3, 0.1, 0.0))
        assert res.status == "non-member"

    def test_rejects_point_off_the_variety(self):
        with pytest.raises(PointNotOnVarietyError):
            level1_membership(TWISTED_CUBIC, (1.0, 0.0, 0.0), ORIGIN)

    def test_member_witness_satisfies_the_certificate(self):
        system = QuadricSystem.from_polynomials(TWISTED_CUBIC)
        u = np.array([0.0, 0.3, 0.2])
        res = level1_membership(system, ORIGIN, u)
        assert res.status == "member"
        lam = res.witness
        total = sum(l * h for l, h in zip(lam, system.hessians))
        assert max(np.linalg.eigvalsh(total - 2.0 * np.eye(3))) <= 2e-7
        recovered = -0.5 * system.jacobian_at(ORIGIN) @ lam
        assert np.abs(recovered - u).max() <= 1e-9

    def test_tangency_supremum_at_one_half(self):
        lo, hi = 0.3, 0.7
        while hi - lo > 1e-5:
            mid = 0.5 * (lo + hi)
            res = level1_membership(TWISTED_CUBIC, ORIGIN, (0.0, mid, 0.0))
            if res.status == "member":
                lo = mid
            else:
                hi = mid
        assert 0.5 * (lo + hi) == pytest.approx(0.5, abs=1e-4)

    def test_parabola_section_moves_with_u3(self):
        # certified region is 2 u2 <= 1 - u3^2, so at u3 = 0.4 the edge
        # sits at u2 = 0.42
        assert level1_membership(
            TWISTED_CUBIC, ORIGIN, (0.0, 0.41, 0.4)).status == "member"
        assert level1_membership(
            TWISTED_CUBIC, ORIGIN, (0.0, 0.43, 0.4)).status == "non-member"


class TestLevelD:
    def test_cardioid_ray_certificates(self):
        for t in (0.1, 0.5, 2.0):
            res = leveld_membership([CARDIOID], CARDIOID_POINT,
                                    (t, 1.0 + t), 2)
            assert res.status == "member", (t, res)

    def test_cardioid_ray_rejections(self):
        for t in (-0.1, -0.25):
            res = leveld_membership([CARDIOID], CARDIOID_POINT,
                                    (t, 1.0 + t), 2)
            assert res.status == "non-member", (t, res)

    def test_base_point_is_a_member(self):
        res = leveld_membership([CARDIOID], CARDIOID_POINT, CARDIOID_POINT, 2)
        assert res.status == "member"

    def test_level_one_agreement(self):
        for u in [(0.0, 0.4, 0.0), (0.0, 0.6, 0.0), (0.0, 0.2, 0.3),
                  (0.1, 0.0, 0.0)]:
            direct = level1_membership(TWISTED_CUBIC, ORIGIN, u).status
            lifted = leveld_membership(TWISTED_CUBIC, ORIGIN, u, 1).status
            assert direct == lifted

    def test_hierarchy_on_the_twisted_cubic(self):
        rng = np.random.default_rng(7)
        members = 0
        for _ in range(30):
            u = (0.0, float(rng.uniform(-0.6, 0.6)),
                 float(rng.uniform(-0.6, 0.6)))
            low = level1_membership(TWISTED_CUBIC, ORIGIN, u).status
            if low != "member":
                continue
            members += 1
            high = leveld_membership(TWISTED_CUBIC, ORIGIN, u, 2).status
            assert high != "non-member", u
        assert members >= 10

    def test_hierarchy_on_the_cardioid(self):
        members = 0
        for t in np.linspace(-0.6, 2.0, 20):
            u = (float(t), float(1.0 + t))
            low = leveld_membership([CARDIOID], CARDIOID_POINT, u, 2).status
            if low != "member":
                continue
            members += 1
            high = leveld_membership([CARDIOID], CARDIOID_POINT, u, 3).status
            assert high != "non-member", t
        assert members >= 10

    def test_members_are_sound_against_a_curve_oracle(self):
        # every certified u must have y among its nearest curve points
        rng = np.random.default_rng(19)
        checked = 0
        for _ in range(40):
            u = np.array([0.0, rng.uniform(-0.5, 0.5),
                          rng.uniform(-0.5, 0.5)])
            res = level1_membership(TWISTED_CUBIC, ORIGIN, u)
            if res.status != "member":
                continue
            best = min_distance_to_curve(
                lambda t: (t, t * t, t ** 3), u, -2.0, 2.0)
            assert abs(best - float(np.linalg.norm(u))) <= 1e-6
            checked += 1
        assert checked >= 8

    def test_cardioid_member_is_sound(self):
        u = np.array([0.5, 1.5])
        res = leveld_membership([CARDIOID], CARDIOID_POINT, u, 2)
        assert res.status == "member"

        def cardioid_point(theta):
            r = 1.0 - math.cos(theta)
            return (r * math.cos(theta), r * math.sin(theta))

        best = min_distance_to_curve(cardioid_point, u, 0.0, 2.0 * math.pi)
        direct = float(np.linalg.norm(u - np.array(CARDIOID_POINT)))
        assert abs(best - direct) <= 1e-6
