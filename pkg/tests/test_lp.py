"""LP feasibility with certificates, against a brute-force basic-solution
oracle, plus the geometric reductions built on it (hull intersection,
subset separation, flats, cones)."""

from __future__ import annotations

import itertools
from fractions import Fraction

import numpy as np
import pytest

from tvlab.geometry import Polytope
from tvlab.lp import (
    LinearProgram,
    UnboundedError,
    flat_meets_polytope,
    hulls_intersect,
    kirchberger_separated,
    lp_feasible,
    nontrivial_zero_in_cone,
)


def _brute_feasible(A, b, tol=1e-7):
    """Exhaustive basic-solution oracle for Ax = b, x >= 0."""
    m, n = A.shape
    for cols in itertools.combinations(range(n), min(m, n)):
        sub = A[:, cols]
        x = np.linalg.lstsq(sub, b, rcond=None)[0]
        if np.linalg.norm(sub @ x - b) < tol and np.all(x >= -tol):
            return True
    return bool(np.linalg.norm(b) < tol)


def _check_certificate(lp, cert, tol=1e-9):
    """Re-substitute the witness or Farkas functional."""
    A = np.asarray(lp.rows, dtype=float)
    b = np.asarray(lp.rhs, dtype=float)
    if cert.feasible:
        x = np.asarray(cert.witness)
        assert np.all(x[: lp.n_nonneg] >= -tol)
        assert np.linalg.norm(A @ x - b) <= tol * (1 + np.linalg.norm(b))
    else:
        y = np.asarray(cert.farkas)
        yA = y @ A
        assert np.all(yA[: lp.n_nonneg] <= tol)
        if lp.n_free:
            assert np.all(np.abs(yA[lp.n_nonneg :]) <= tol)
        assert y @ b > tol


# -- lp_feasible --------------------------------------------------------------


def test_single_variable_feasible():
    lp = LinearProgram(1, 0, ((1.0,),), (1.0,))
    cert = lp_feasible(lp)
    assert cert.feasible and cert.witness[0] == pytest.approx(1.0)
    _check_certificate(lp, cert)


def test_single_variable_infeasible():
    lp = LinearProgram(1, 0, ((1.0,),), (-1.0,))
    cert = lp_feasible(lp)
    assert not cert.feasible
    _check_certificate(lp, cert)


def test_exact_path_matches():
    lp = LinearProgram(1, 0, ((1.0,),), (1.0,))
    cert = lp_feasible(lp, exact=True)
    assert cert.feasible and cert.exact
    assert cert.witness_exact[0] == Fraction(1)
    lp = LinearProgram(1, 0, ((1.0,),), (-1.0,))
    cert = lp_feasible(lp, exact=True)
    assert not cert.feasible and cert.exact
    assert cert.farkas_exact is not None


def test_agrees_with_brute_force_oracle():
    rng = np.random.default_rng(0)
    for trial in range(300):
        m = int(rng.integers(1, 4))
        n = int(rng.integers(1, 5))
        A = np.round(rng.standard_normal((m, n)) * 2, 1)
        b = np.round(rng.standard_normal(m) * 2, 1)
        lp = LinearProgram(n, 0, tuple(map(tuple, A)), tuple(b))
        cert = lp_feasible(lp)
        assert cert.feasible == _brute_feasible(A, b), f"trial {trial}"
        _check_certificate(lp, cert)


def test_exact_agrees_with_float_on_rationals():
    rng = np.random.default_rng(1)
    for _ in range(60):
        m = int(rng.integers(1, 4))
        n = int(rng.integers(1, 5))
        A = np.round(rng.standard_normal((m, n)), 1)
        b = np.round(rng.standard_normal(m), 1)
        lp = LinearProgram(n, 0, tuple(map(tuple, A)), tuple(b))
        assert lp_feasible(lp).feasible == lp_feasible(lp, exact=True).feasible


def test_free_variables():
    # x free with x = -2 is fine; nonneg would not be
    lp = LinearProgram(0, 1, ((1.0,),), (-2.0,))
    cert = lp_feasible(lp)
    assert cert.feasible and cert.witness[0] == pytest.approx(-2.0)
    lp = LinearProgram(1, 1, ((1.0, 1.0),), (-3.0,))
    cert = lp_feasible(lp)
    assert cert.feasible
    _check_certificate(lp, cert)


def test_objective_and_unbounded():
    # min -x with only x >= 0, x <= nothing: unbounded below
    lp = LinearProgram(2, 0, ((1.0, -1.0),), (0.0,), objective=(-1.0, 0.0))
    with pytest.raises(UnboundedError):
        lp_feasible(lp)
    # bounded objective returns the optimum
    lp = LinearProgram(1, 0, ((1.0,),), (1.0,), objective=(1.0,))
    cert = lp_feasible(lp)
    assert cert.feasible and cert.witness[0] == pytest.approx(1.0)


def test_malformed_program_rejected():
    with pytest.raises(ValueError):
        LinearProgram(1, 0, ((1.0, 2.0),), (1.0,))  # row width mismatch
    with pytest.raises(ValueError):
        LinearProgram(1, 0, ((np.nan,),), (1.0,))


# -- hulls_intersect -----------------------------------------------------------


def test_intervals_sharing_endpoint():
    res = hulls_intersect(np.array([[0.0], [1.0]]), np.array([[1.0], [2.0]]))
    assert res.feasible
    assert res.point[0] == pytest.approx(1.0)


def test_intervals_disjoint():
    res = hulls_intersect(np.array([[0.0], [1.0]]), np.array([[2.0], [3.0]]))
    assert not res.feasible
    assert res.point is None
    confirm = hulls_intersect(np.array([[0.0], [1.0]]), np.array([[2.0], [3.0]]), exact=True)
    assert not confirm.feasible and confirm.certificate.exact


def test_triangle_contains_point():
    tri = np.array([[0.0, 0.0], [2.0, 0.0], [1.0, 2.0]])
    res = hulls_intersect(tri, np.array([[1.0, 1.0]]))
    assert res.feasible
    # barycentric oracle: solve for the unique weights and confirm they are convex
    M = np.vstack([tri.T, np.ones(3)])
    w = np.linalg.solve(M, np.array([1.0, 1.0, 1.0]))
    assert np.all(w >= -1e-12) and np.allclose(w @ tri, [1.0, 1.0])
    assert np.allclose(res.point, [1.0, 1.0])


def test_hulls_symmetry():
    rng = np.random.default_rng(2)
    for _ in range(60):
        U = rng.standard_normal((int(rng.integers(1, 5)), 2))
        V = rng.standard_normal((int(rng.integers(1, 5)), 2)) + rng.standard_normal() * 2
        assert hulls_intersect(U, V).feasible == hulls_intersect(V, U).feasible


def test_hulls_accepts_polytopes_and_complex_points():
    p = Polytope("complex", np.array([[0j], [1 + 0j]]))
    q = Polytope("complex", np.array([[0.5 + 0j]]))
    assert hulls_intersect(p, q).feasible
    r = Polytope("complex", np.array([[0.5 + 1j]]))  # same real part, shifted imag
    assert not hulls_intersect(p, r).feasible


def test_hulls_dimension_mismatch():
    with pytest.raises(ValueError):
        hulls_intersect(np.zeros((1, 2)), np.zeros((1, 3)))


# -- kirchberger_separated -----------------------------------------------------


def test_kirchberger_singletons():
    v = kirchberger_separated(np.array([[0.0]]), np.array([[1.0]]), 1)
    assert v.separated


def test_kirchberger_straddle():
    v = kirchberger_separated(np.array([[0.0], [2.0]]), np.array([[1.0]]), 1)
    assert not v.separated
    assert v.violating_u == (0, 1) and v.violating_v == (0,)
    assert v.common_point[0] == pytest.approx(1.0)


def test_kirchberger_equals_full_hull_verdict():
    # subset verdicts agree with the full-hull LP on random instances
    rng = np.random.default_rng(3)
    for _ in range(80):
        k = int(rng.integers(1, 4))
        nu = int(rng.integers(1, 6))
        nv = int(rng.integers(1, 11 - nu))
        U = np.round(rng.standard_normal((nu, k)), 2)
        V = np.round(rng.standard_normal((nv, k)), 2)
        assert kirchberger_separated(U, V, k).separated == (
            not hulls_intersect(U, V).feasible
        )


# -- flat_meets_polytope -------------------------------------------------------


def test_flat_meets_segment():
    seg = Polytope("complex", np.array([[1 + 0j, 0j], [-1 + 0j, 0j]]))
    cert, point = flat_meets_polytope([(np.array([1, 0], dtype=complex), 0.0)], seg)
    assert cert.feasible
    assert abs(point[0]) < 1e-9


def test_flat_misses_singleton():
    pt = Polytope("complex", np.array([[1 + 0j, 0j]]))
    cert, point = flat_meets_polytope([(np.array([1, 0], dtype=complex), 0.0)], pt)
    assert not cert.feasible and point is None


def test_flat_conjugation_convention():
    # <z, a> = z * conj(a); a = i and rhs = i force -i*z = i, i.e. z = -1
    seg = Polytope("complex", np.array([[-2 + 0j], [2 + 0j]]))
    cert, point = flat_meets_polytope([(np.array([1j]), 1j)], seg)
    assert cert.feasible
    assert point[0] == pytest.approx(-1.0)


# -- nontrivial_zero_in_cone ---------------------------------------------------


def test_cone_symmetric_cancellation():
    res = nontrivial_zero_in_cone([("a", np.array([[1.0]])), ("b", np.array([[-1.0]]))])
    assert res.certificate.feasible
    weights = dict(res.group_weights)
    assert weights["a"] == pytest.approx(0.5) and weights["b"] == pytest.approx(0.5)


def test_cone_same_halfline_infeasible():
    res = nontrivial_zero_in_cone([("a", np.array([[1.0]])), ("b", np.array([[2.0]]))])
    assert not res.certificate.feasible
    confirm = nontrivial_zero_in_cone(
        [("a", np.array([[1.0]])), ("b", np.array([[2.0]]))], exact=True
    )
    assert not confirm.certificate.feasible and confirm.certificate.exact


def test_cone_planted_combination():
    # plant lam over three groups and present shifted generators that cancel
    rng = np.random.default_rng(4)
    for _ in range(30):
        g1 = rng.standard_normal((3, 4))
        g2 = rng.standard_normal((2, 4))
        planted = np.concatenate([rng.random(3), rng.random(2)])
        planted /= planted.sum()
        shift = planted[:3] @ g1 + planted[3:] @ g2
        # subtracting the weighted mean from every generator plants the zero
        res = nontrivial_zero_in_cone([("a", g1 - shift), ("b", g2 - shift)])
        assert res.certificate.feasible
        lam = np.concatenate([dict(res.weights)["a"], dict(res.weights)["b"]])
        gens = np.vstack([g1 - shift, g2 - shift])
        assert np.linalg.norm(lam @ gens) < 1e-9
        assert lam.sum() == pytest.approx(1.0)
