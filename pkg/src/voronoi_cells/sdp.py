"""Spectrahedral certificates for Voronoi cell membership.

If the variety is cut out by quadrics f_i with Hessians A_i, then u has a
nearest variety point at y whenever the Lagrangian
|u - x|^2 - sum lam_i f_i(x) is convex and stationary at y.  Convexity is
the linear matrix inequality sum lam_i A_i <= 2I and stationarity pins
lam to an affine subspace, so the certificate is an LMI feasibility
question.  Varieties of higher degree are first lifted to a Veronese
embedding where every defining equation becomes a quadric; rising lift
levels certify growing inner approximations of the cell.  The LMI engine
is a projected-subgradient solver on the largest eigenvalue, adequate
for the dense desk-scale matrices produced here.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from itertools import product

import numpy as np

from .exactmath import Polynomial, RationalField
from .voronoi import PointNotOnVarietyError

DEFAULT_SDP_TOL = 1e-7
MAX_LIFT_DIMENSION = 60
_RANK_EPS = 1e-12


def _evaluate_float(f: Polynomial, point) -> float:
    total = 0.0
    for mon, coeff in f.terms.items():
        term = float(coeff)
        for i, e in enumerate(mon):
            if e:
                term *= float(point[i]) ** e
        total += term
    return total


def hessian(f: Polynomial) -> np.ndarray:
    """Constant matrix of second partials of a polynomial of degree <= 2."""
    if f.total_degree() > 2:
        raise ValueError("hessian of a non-quadric is not constant")
    n = f.ring.nvars
    h = np.zeros((n, n))
    for mon, coeff in f.terms.items():
        if sum(mon) != 2:
            continue
        support = [i for i, e in enumerate(mon) if e]
        c = float(coeff)
        if len(support) == 1:
            h[support[0], support[0]] += 2.0 * c
        else:
            i, j = support
            h[i, j] += c
            h[j, i] += c
    return h


@dataclass(eq=False)
class QuadricSystem:
    """Quadrics cutting out a variety, with their Hessians precomputed."""

    quadrics: tuple
    hessians: tuple

    @classmethod
    def from_polynomials(cls, polys) -> "QuadricSystem":
        polys = tuple(polys)
        if not polys:
            raise ValueError("need at least one quadric")
        ring = polys[0].ring
        if not isinstance(ring.field, RationalField):
            raise ValueError("quadric systems are rational")
        for f in polys:
            if f.ring != ring:
                raise ValueError("quadrics must share one ring")
        return cls(polys, tuple(hessian(f) for f in polys))

    @property
    def nvars(self) -> int:
        return self.quadrics[0].ring.nvars

    def residual_at(self, y) -> float:
        return max(abs(_evaluate_float(f, y)) for f in self.quadrics)

    def jacobian_at(self, y) -> np.ndarray:
        """Entries d f_j / d x_i evaluated at y, shape nvars x len(quadrics)."""
        n = self.nvars
        jac = np.zeros((n, len(self.quadrics)))
        for j, f in enumerate(self.quadrics):
            for i in range(n):
                jac[i, j] = _evaluate_float(f.derivative(i), y)
        return jac


def _veronese_indices(n: int, d: int):
    exponents = [alpha for alpha in product(range(d + 1), repeat=n)
                 if 0 < sum(alpha) <= d]
    exponents.sort(key=lambda a: (sum(a), tuple(-e for e in a)))
    return tuple(exponents)


def _split_monomial(mon, d: int, position: dict):
    """Write x^mon as a product of at most two lift coordinates.

    Monomials of degree <= d map to a single coordinate; higher ones are
    split greedily from the first variable into halves of degree <= d.
    """
    total = sum(mon)
    if total == 0:
        return ()
    if total <= d:
        return (position[mon],)
    head = total - total // 2
    first = [0] * len(mon)
    remaining = head
    for i, e in enumerate(mon):
        take = min(e, remaining)
        first[i] = take
        remaining -= take
        if remaining == 0:
            break
    second = tuple(e - t for e, t in zip(mon, first))
    a = position[tuple(first)]
    b = position[second]
    return (a, b) if a <= b else (b, a)


@dataclass(eq=False)
class LiftedQuadric:
    """A quadric in lift coordinates with exact rational coefficients.

    Keys of ``terms``: () constant, (i,) linear in z_i, (i, j) with
    i <= j quadratic.
    """

    terms: dict

    def hessian(self, size: int) -> np.ndarray:
        h = np.zeros((size, size))
        for key, coeff in self.terms.items():
            if len(key) != 2:
                continue
            i, j = key
            c = float(coeff)
            if i == j:
                h[i, i] += 2.0 * c
            else:
                h[i, j] += c
                h[j, i] += c
        return h

    def gradient_at(self, z: np.ndarray) -> np.ndarray:
        g = np.zeros(len(z))
        for key, coeff in self.terms.items():
            c = float(coeff)
            if len(key) == 1:
                g[key[0]] += c
            elif len(key) == 2:
                i, j = key
                if i == j:
                    g[i] += 2.0 * c * z[i]
                else:
                    g[i] += c * z[j]
                    g[j] += c * z[i]
        return g

    def pullback(self, ring, indices) -> Polynomial:
        """Substitute z_alpha = x^alpha, landing back in the source ring."""
        field = ring.field
        acc: dict = {}
        zero_mon = (0,) * ring.nvars
        for key, coeff in self.terms.items():
            mon = zero_mon
            for idx in key:
                mon = tuple(a + b for a, b in zip(mon, indices[idx]))
            prev = acc.get(mon, field.zero)
            acc[mon] = field.add(prev, coeff)
        return ring.from_terms(acc)


@dataclass(eq=False)
class VeroneseLift:
    """All quadratic data of a variety pushed through a Veronese embedding.

    ``quadrics`` holds the lifted defining equations first, then the
    coordinate relations; ``hessians`` aligns with it.  The distance
    Hessian is 2I on the linear coordinates and zero elsewhere.
    """

    indices: tuple
    dimension: int
    nvars: int
    degree: int
    quadrics: tuple
    lifted_count: int
    relation_count: int
    hessians: tuple
    distance_hessian: np.ndarray

    def point(self, y) -> np.ndarray:
        z = np.ones(self.dimension)
        for pos, alpha in enumerate(self.indices):
            for i, e in enumerate(alpha):
                if e:
                    z[pos] *= float(y[i]) ** e
        return z

    def jacobian_at(self, y) -> np.ndarray:
        z = self.point(y)
        return np.column_stack([q.gradient_at(z) for q in self.quadrics])


def veronese_lift(polys, n: int, d: int) -> VeroneseLift:
    polys = tuple(polys)
    if not polys:
        raise ValueError("need at least one defining polynomial")
    ring = polys[0].ring
    if ring.nvars != n:
        raise ValueError("ring does not have the announced variable count")
    if not isinstance(ring.field, RationalField):
        raise ValueError("lifts are rational")
    if d < 1:
        raise ValueError("lift degree must be at least 1")
    for f in polys:
        if f.ring != ring:
            raise ValueError("polynomials must share one ring")
        if f.total_degree() > 2 * d:
            raise ValueError(
                f"degree {f.total_degree()} exceeds 2d = {2 * d}")
    dimension = math.comb(n + d, d) - 1
    if dimension > MAX_LIFT_DIMENSION:
        raise ValueError(
            f"lift needs {dimension} coordinates, cap is {MAX_LIFT_DIMENSION}")

    indices = _veronese_indices(n, d)
    position = {alpha: i for i, alpha in enumerate(indices)}

    lifted = []
    for f in polys:
        terms: dict = {}
        for mon, coeff in f.terms.items():
            key = _split_monomial(mon, d, position)
            prev = terms.get(key, Fraction(0))
            terms[key] = prev + coeff
        lifted.append(LiftedQuadric(
            {k: c for k, c in terms.items() if c != 0}))

    # group every product of at most two coordinates by its multidegree;
    # k colliding products give k - 1 relation quadrics
    by_sum: dict = {}
    for i, alpha in enumerate(indices):
        by_sum.setdefault(alpha, []).append((i,))
    for i in range(dimension):
        for j in range(i, dimension):
            s = tuple(a + b for a, b in zip(indices[i], indices[j]))
            by_sum.setdefault(s, []).append((i, j))
    relations = []
    for s in sorted(by_sum, key=lambda a: (sum(a), tuple(-e for e in a))):
        group = sorted(by_sum[s], key=lambda key: (len(key), key))
        rep = group[0]
        for other in group[1:]:
            relations.append(LiftedQuadric({other: Fraction(1),
                                            rep: Fraction(-1)}))

    for f, q in zip(polys, lifted):
        if q.pullback(ring, indices) != f:
            raise RuntimeError("lift failed to reproduce a defining equation")
    for q in relations:
        if not q.pullback(ring, indices).is_zero():
            raise RuntimeError("coordinate relation does not hold")

    quadrics = tuple(lifted) + tuple(relations)
    distance = np.zeros((dimension, dimension))
    for i in range(n):
        distance[i, i] = 2.0
    return VeroneseLift(
        indices=indices,
        dimension=dimension,
        nvars=n,
        degree=d,
        quadrics=quadrics,
        lifted_count=len(lifted),
        relation_count=len(relations),
        hessians=tuple(q.hessian(dimension) for q in quadrics),
        distance_hessian=distance,
    )


@dataclass(eq=False)
class LMIFeasibilityProblem:
    """Find lam with sum lam_i B_i <= C subject to E lam = e."""

    lhs: tuple
    rhs: np.ndarray
    eq_matrix: np.ndarray
    eq_rhs: np.ndarray
    tol: float = DEFAULT_SDP_TOL
    max_iterations: int = 10_000


@dataclass(frozen=True)
class LMIResult:
    status: str
    witness: object
    margin: float
    iterations: int
    reason: str = ""


def _affine_solution(eq_matrix: np.ndarray, eq_rhs: np.ndarray, k: int):
    """Particular solution and nullspace basis of E lam = e.

    Returns None when the system is inconsistent.
    """
    if eq_matrix.shape[0] == 0:
        return np.zeros(k), np.eye(k)
    u_svd, s_svd, vt = np.linalg.svd(eq_matrix)
    top = s_svd[0] if s_svd.size else 0.0
    rank = int((s_svd > top * _RANK_EPS).sum()) if top > 0 else 0
    if rank:
        lam0 = vt[:rank].T @ ((u_svd[:, :rank].T @ eq_rhs) / s_svd[:rank])
    else:
        lam0 = np.zeros(k)
    residual = np.abs(eq_matrix @ lam0 - eq_rhs).max(initial=0.0)
    if residual > 1e-8 * max(1.0, np.abs(eq_rhs).max(initial=0.0)):
        return None
    return lam0, vt[rank:].T


def lmi_feasible(problem: LMIFeasibilityProblem) -> LMIResult:
    """Classify the LMI by minimizing the top eigenvalue over E lam = e.

    Projected subgradient with Polyak steps on the eigenvalue function;
    equality constraints are eliminated through an affine parameterization
    (particular solution plus nullspace basis), so every iterate satisfies
    them exactly.  Best value <= tol is feasible, >= 10 tol after the
    search stalls is infeasible, anything between stays inconclusive.
    """
    c = np.asarray(problem.rhs, dtype=float)
    if c.ndim != 2 or c.shape[0] != c.shape[1]:
        raise ValueError("right-hand side must be a square matrix")
    size = c.shape[0]
    bs = []
    for b in problem.lhs:
        b = np.asarray(b, dtype=float)
        if b.shape != (size, size):
            raise ValueError("constraint matrices must match the rhs size")
        if np.abs(b - b.T).max(initial=0.0) > 1e-9:
            raise ValueError("constraint matrices must be symmetric")
        bs.append(b)
    if np.abs(c - c.T).max(initial=0.0) > 1e-9:
        raise ValueError("right-hand side must be symmetric")
    k = len(bs)
    eq_matrix = np.asarray(problem.eq_matrix, dtype=float)
    if eq_matrix.size == 0:
        eq_matrix = eq_matrix.reshape(0, k)
    if eq_matrix.ndim != 2 or eq_matrix.shape[1] != k:
        raise ValueError("equality matrix needs one column per multiplier")
    eq_rhs = np.asarray(problem.eq_rhs, dtype=float).reshape(-1)
    if eq_rhs.shape[0] != eq_matrix.shape[0]:
        raise ValueError("equality sides disagree on the number of rows")
    tol = problem.tol

    solved = _affine_solution(eq_matrix, eq_rhs, k)
    if solved is None:
        return LMIResult("infeasible", None, math.inf, 0,
                         "inconsistent-equalities")
    lam0, basis = solved

    # facial reduction: whenever a diagonal entry of sum lam_i B_i - C
    # vanishes identically on the constraint subspace, feasibility forces
    # that whole row to zero; fold the row into the equalities and drop
    # the coordinate so strict feasibility regains an interior
    active = list(range(size))
    extra_rows = []
    extra_rhs = []
    reducing = True
    while reducing:
        reducing = False
        for j in active:
            diag_coeffs = np.array([b[j, j] for b in bs])
            value = float(diag_coeffs @ lam0) - c[j, j]
            slope = basis.T @ diag_coeffs if basis.shape[1] else np.zeros(0)
            if abs(value) > 1e-12 or np.abs(slope).max(initial=0.0) > 1e-12:
                continue
            for i in active:
                if i == j:
                    continue
                extra_rows.append(np.array([b[i, j] for b in bs]))
                extra_rhs.append(c[i, j])
            active.remove(j)
            augmented = np.vstack([eq_matrix] + [r.reshape(1, -1)
                                                 for r in extra_rows])
            solved = _affine_solution(augmented, np.concatenate(
                [eq_rhs, np.array(extra_rhs)]), k)
            if solved is None:
                return LMIResult("infeasible", None, math.inf, 0,
                                 "zero-diagonal-row")
            lam0, basis = solved
            reducing = True
            break
    if not active:
        # the matrix inequality reduced away entirely
        return LMIResult("feasible", lam0.copy(), 0.0, 0)
    if len(active) < size:
        keep = np.asarray(active)
        bs = [b[np.ix_(keep, keep)] for b in bs]
        c = c[np.ix_(keep, keep)]
        size = len(active)

    stack = np.stack(bs) if k else np.zeros((0, size, size))

    def top_eigen(lam):
        m = np.tensordot(lam, stack, axes=1) - c if k else -c
        w, vecs = np.linalg.eigh(m)
        return float(w[-1]), vecs[:, -1]

    best, vec = top_eigen(lam0)
    best_witness = lam0.copy()
    iterations = 0
    if best <= tol:
        return LMIResult("feasible", best_witness, best, iterations)
    if basis.shape[1] == 0:
        # multipliers fully determined; the value is exact
        status = "infeasible" if best >= 10.0 * tol else "inconclusive"
        return LMIResult(status, None, best, iterations)

    mu = np.zeros(basis.shape[1])
    lam = lam0
    value = best
    window = 500
    window_best = best
    stalled = False
    for iterations in range(1, problem.max_iterations + 1):
        grad = basis.T @ (stack @ vec @ vec)
        gnorm2 = float(grad @ grad)
        if gnorm2 <= 1e-24:
            stalled = True
            break
        # Polyak step aimed at the feasibility level: finite-time success
        # on strictly feasible problems, oscillation near the true margin
        # (caught by the stall window) on infeasible ones
        target = min(best, 0.0) - tol
        mu = mu - ((value - target) / gnorm2) * grad
        lam = lam0 + basis @ mu
        value, vec = top_eigen(lam)
        if value < best:
            best = value
            best_witness = lam.copy()
            if best <= tol:
                return LMIResult("feasible", best_witness, best, iterations)
        if iterations % window == 0:
            if best > window_best - 0.1 * tol:
                stalled = True
                break
            window_best = best
    else:
        stalled = True  # iteration budget is the outer stall criterion

    if best <= tol:
        return LMIResult("feasible", best_witness, best, iterations)
    if stalled and best >= 10.0 * tol:
        return LMIResult("infeasible", None, best, iterations)
    return LMIResult("inconclusive", None, best, iterations)


@dataclass(frozen=True)
class MembershipResult:
    status: str
    witness: object
    margin: float
    iterations: int


_STATUS = {"feasible": "member", "infeasible": "non-member",
           "inconclusive": "inconclusive"}


def _check_on_variety(polys, y, tol: float):
    worst = max(abs(_evaluate_float(f, y)) for f in polys)
    if worst > max(tol, 1e-9):
        raise PointNotOnVarietyError(
            f"base point misses the variety by {worst:.3g}")


def level1_membership(system, y, u, tol: float = DEFAULT_SDP_TOL,
                      max_iterations: int = 10_000) -> MembershipResult:
    """Certificate that u's nearest point on the quadric variety is y.

    Decides whether some lam with sum lam_i A_i <= 2I satisfies
    (1/2) Jac(y) lam = y - u; a member answer is a proof, non-member only
    says this level's certificate does not exist.
    """
    if not isinstance(system, QuadricSystem):
        system = QuadricSystem.from_polynomials(system)
    y = np.asarray(y, dtype=float)
    u = np.asarray(u, dtype=float)
    n = system.nvars
    if y.shape != (n,) or u.shape != (n,):
        raise ValueError("points must match the ring's variable count")
    _check_on_variety(system.quadrics, y, tol)
    problem = LMIFeasibilityProblem(
        lhs=system.hessians,
        rhs=2.0 * np.eye(n),
        eq_matrix=0.5 * system.jacobian_at(y),
        eq_rhs=y - u,
        tol=tol,
        max_iterations=max_iterations,
    )
    res = lmi_feasible(problem)
    return MembershipResult(_STATUS[res.status], res.witness, res.margin,
                            res.iterations)


def leveld_membership(polys, y, u, d: int, tol: float = DEFAULT_SDP_TOL,
                      max_iterations: int = 10_000) -> MembershipResult:
    """Membership certificate at lift level d.

    The variety is lifted through the degree-d Veronese embedding; the
    multipliers range over the lifted equations and coordinate relations,
    constrained to be stationary in the auxiliary coordinates.  Levels
    are nested: a member at level d stays a member at level d + 1.
    """
    polys = tuple(polys)
    if not polys:
        raise ValueError("need at least one defining polynomial")
    n = polys[0].ring.nvars
    y = np.asarray(y, dtype=float)
    u = np.asarray(u, dtype=float)
    if y.shape != (n,) or u.shape != (n,):
        raise ValueError("points must match the ring's variable count")
    lift = veronese_lift(polys, n, d)
    _check_on_variety(polys, y, tol)
    jac = lift.jacobian_at(y)
    eq_matrix = np.vstack([0.5 * jac[:n, :], jac[n:, :]])
    eq_rhs = np.concatenate([y - u, np.zeros(lift.dimension - n)])
    problem = LMIFeasibilityProblem(
        lhs=lift.hessians,
        rhs=lift.distance_hessian,
        eq_matrix=eq_matrix,
        eq_rhs=eq_rhs,
        tol=tol,
        max_iterations=max_iterations,
    )
    res = lmi_feasible(problem)
    return MembershipResult(_STATUS[res.status], res.witness, res.margin,
                            res.iterations)
