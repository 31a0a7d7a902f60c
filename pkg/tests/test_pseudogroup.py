from __future__ import annotations

import numpy as np
import pytest

from spencerkit import (
    Box,
    GlueTest,
    LocalMap,
    check_ah_map,
    check_over_diagram,
    compose,
    covers,
    generate,
    identity_map,
    invert,
    parse_polynomial,
    restrict,
    validate_axioms,
)
from spencerkit.errors import CompositionError, DomainError, InversionError
from spencerkit.pseudogroup import OverDiagram


def pmap(strs, lo, hi, name, inv=None):
    comps = [parse_polynomial(s, len(lo)) for s in strs]
    return LocalMap.from_polynomials(comps, Box(lo, hi), name,
                                     declared_inverse=inv)


@pytest.fixture()
def translation():
    t = pmap(["x1 + 0.8", "x2"], (-1.0, -1.0), (-0.7, 1.0), "t")
    t_inv = pmap(["x1 - 0.8", "x2"], (-0.2, -1.0), (0.1, 1.0), "t_inv")
    t.declared_inverse = t_inv
    t_inv.declared_inverse = t
    return t


@pytest.fixture()
def doubling():
    s = pmap(["2*x1", "2*x2"], (0.2, 0.2), (0.45, 0.45), "s")
    s_inv = pmap(["0.5*x1", "0.5*x2"], (0.4, 0.4), (0.9, 0.9), "s_inv")
    s.declared_inverse = s_inv
    s_inv.declared_inverse = s
    return s


@pytest.fixture()
def squaring():
    return pmap(["x1^2 - x2^2", "2*x1*x2"], (0.05, 0.05), (0.6, 0.6), "sq")


def test_evaluate_checks_domain(translation):
    inside = np.array([-0.8, 0.0])
    assert np.allclose(translation.evaluate(inside), [0.0, 0.0])
    with pytest.raises(DomainError):
        translation.evaluate(np.array([0.5, 0.0]))
    out = translation.evaluate(np.array([0.5, 0.0]), check_domain=False)
    assert np.allclose(out, [1.3, 0.0])


def test_identity_map_is_self_inverse():
    box = Box((0.0, 0.0), (1.0, 1.0))
    ident = identity_map(box)
    assert ident.label == "id[0,1]x[0,1]"
    assert ident.declared_inverse is ident
    pts = np.random.default_rng(0).uniform(0, 1, size=(5, 2))
    assert np.allclose(ident.evaluate(pts), pts)


def test_restrict_intersects_domain(translation):
    cut = restrict(translation, Box((-1.0, -1.0), (-0.8, 0.0)))
    assert cut.domain.lo == pytest.approx((-1.0, -1.0))
    assert cut.domain.hi == pytest.approx((-0.8, 0.0))
    with pytest.raises(DomainError):
        restrict(translation, Box((0.5, 0.5), (0.9, 0.9)))


def test_compose_symbolic_and_boundary(doubling):
    c = compose(doubling, doubling)
    assert c.kind == LocalMap.POLY
    assert c.label == "(s>>s)"
    assert c.domain.lo == pytest.approx((0.2, 0.2))
    assert c.domain.hi[0] == pytest.approx(0.225, abs=1e-11)
    assert c.domain.hi[0] >= 0.225
    pt = np.array([0.21, 0.22])
    assert np.allclose(c.evaluate(pt), 4.0 * pt)


def test_compose_raises_when_images_miss(translation):
    with pytest.raises(CompositionError):
        compose(translation, translation)


def test_compose_switches_to_chain_over_degree_cap():
    cubic = pmap(["x1^3 + 0.5", "x2"], (0.0, 0.0), (0.4, 0.4), "c1")
    cubic2 = pmap(["0.2*x1^3 + 0.1*x1", "x2"], (0.3, 0.0), (0.9, 0.4), "c2")
    c = compose(cubic, cubic2)
    assert c.kind == LocalMap.CHAIN
    pt = np.array([0.2, 0.1])
    direct = cubic2.evaluate(cubic.evaluate(pt), check_domain=False)
    assert np.allclose(c.evaluate(pt), direct)


def test_invert_declared_round_trip(translation):
    inv = invert(translation)
    assert inv.label == "t_inv"
    pts = np.array([[-0.9, 0.3], [-0.75, -0.5]])
    back = inv.evaluate(translation.evaluate(pts))
    assert np.allclose(back, pts, atol=1e-12)


def test_invert_newton_path(squaring):
    inv = invert(squaring)
    assert inv.kind == LocalMap.NEWTON
    assert inv.label == "inv(sq)"
    pts = np.array([[0.3, 0.2], [0.5, 0.55], [0.1, 0.45]])
    images = squaring.evaluate(pts)
    back = inv.evaluate(images, check_domain=False)
    assert np.allclose(back, pts, atol=1e-9)
    jac = inv.jacobian(images)
    fwd = squaring.jacobian(pts)
    assert np.allclose(np.einsum("pij,pjk->pik", jac, fwd),
                       np.broadcast_to(np.eye(2), (3, 2, 2)), atol=1e-9)


def test_invert_rejects_degenerate_jacobian():
    fold = pmap(["x1^2", "x2"], (-1.0, -1.0), (1.0, 1.0), "fold")
    with pytest.raises(InversionError):
        invert(fold)


def test_try_evaluate_masks_unreachable_points(squaring):
    inv = invert(squaring)
    corners = np.array([inv.domain.lo, inv.domain.hi])
    values, ok = inv.try_evaluate(corners)
    assert ok.dtype == bool
    reachable = squaring.evaluate(np.array([[0.05, 0.05], [0.6, 0.6]]))
    vals2, ok2 = inv.try_evaluate(reachable)
    assert np.all(ok2)
    assert np.allclose(vals2, [[0.05, 0.05], [0.6, 0.6]], atol=1e-9)


def test_covers_requires_containment_and_agreement(translation, doubling):
    big = identity_map(Box((-1.0, -1.0), (1.0, 1.0)))
    small = identity_map(Box((0.0, 0.0), (0.5, 0.5)))
    assert covers(big, small, tol=1e-9)
    assert not covers(small, big, tol=1e-9)
    assert not covers(translation, doubling, tol=1e-9)
    shifted = pmap(["x1 + 1e-6", "x2"], (0.0, 0.0), (0.5, 0.5), "near_id")
    assert not covers(big, shifted, tol=1e-9)
    assert covers(big, shifted, tol=1e-5)


def test_generate_reaches_fixpoint(translation, doubling):
    ambient = Box((-1.0, -1.0), (1.0, 1.0))
    fam = generate([translation, doubling], ambient, depth=2)
    labels = tuple(fam.labels())
    assert len(fam.members) == 10
    assert labels == (
        "t", "s", "id[-1,-0.7]x[-1,1]", "id[0.2,0.45]x[0.2,0.45]",
        "(s>>s)", "t_inv", "s_inv", "(t_inv>>t)", "(s_inv>>s)",
        "(s_inv>>s_inv)")
    deeper = generate([translation, doubling], ambient, depth=3)
    assert tuple(deeper.labels()) == labels
    again = generate([translation, doubling], ambient, depth=2)
    assert tuple(again.labels()) == labels
    for a, b in zip(fam.members, again.members):
        assert a.domain == b.domain


def test_axioms_pass_on_closed_family(translation, doubling):
    ambient = Box((-1.0, -1.0), (1.0, 1.0))
    fam = generate([translation, doubling], ambient, depth=2)
    glue = GlueTest(("s", "s"),
                    (Box((0.2, 0.2), (0.35, 0.45)),
                     Box((0.3, 0.2), (0.45, 0.45))),
                    Box((0.2, 0.2), (0.45, 0.45)))
    reports = validate_axioms(fam, glue_tests=[glue])
    assert [r.task for r in reports] == [
        "axiom1_composition", "axiom2_inversion", "axiom3_identity",
        "axiom4_restriction", "axiom5_gluing"]
    assert all(r.status == "pass" for r in reports)
    assert all(r.metrics["failures"] == 0.0 for r in reports)


def test_missing_inverses_fail_exactly_axiom_two(translation, doubling):
    t = pmap(["x1 + 0.8", "x2"], (-1.0, -1.0), (-0.7, 1.0), "t")
    s = pmap(["2*x1", "2*x2"], (0.2, 0.2), (0.45, 0.45), "s")
    m4 = pmap(["4*x1", "4*x2"], (0.2, 0.2), (0.225, 0.225), "m4")
    ambient = Box((-1.0, -1.0), (1.0, 1.0))
    fam = generate([t, s, m4], ambient, depth=0)
    assert len(fam.members) == 5
    reports = {r.task: r for r in validate_axioms(fam)}
    assert reports["axiom2_inversion"].status == "fail"
    assert reports["axiom2_inversion"].metrics["failures"] == 3.0
    for name in ("axiom1_composition", "axiom3_identity",
                 "axiom4_restriction", "axiom5_gluing"):
        assert reports[name].status == "pass"


def test_ah_map_closure_property(std1, squaring):
    tr = pmap(["x1 + 0.1", "x2 + 0.05"], (-0.5, -0.5), (0.5, 0.5), "tr")
    ambient = Box((-1.0, -1.0), (1.0, 1.0))
    fam = generate([squaring, tr], ambient, depth=2)
    assert len(fam.members) == 44
    worst = 0.0
    for member in fam.members:
        rep = check_ah_map(member, std1)
        assert rep.status == "pass"
        worst = max(worst, rep.metrics["ah_map_residual"])
    assert worst <= 1e-12


def test_ah_map_conjugation_fails_exactly(std1):
    conj = pmap(["x1", "-x2"], (-1.0, -1.0), (1.0, 1.0), "conj")
    rep = check_ah_map(conj, std1)
    assert rep.status == "fail"
    assert rep.metrics["ah_map_residual"] == 2.0


def test_ah_map_needs_valid_points(std1):
    escape = pmap(["x1 + 10", "x2"], (-1.0, -1.0), (1.0, 1.0), "escape")
    with pytest.raises(DomainError):
        check_ah_map(escape, std1)


def test_over_diagram_translation_commutes():
    box = Box((-0.5, -0.5), (0.5, 0.5))
    unit = Box((-1.0, -1.0), (1.0, 1.0))
    tr = pmap(["x1 + 0.1", "x2 + 0.05"], (-0.5, -0.5), (0.5, 0.5), "tr")
    ident = identity_map(unit)
    tr_wide = pmap(["x1 + 0.1", "x2 + 0.05"], (-1.0, -1.0), (1.0, 1.0), "tr_wide")
    diagram = OverDiagram(phi=tr, f_src=ident, f_dst=ident, psi=tr_wide)
    rep = check_over_diagram(diagram)
    assert rep.status == "pass"
    assert rep.metrics["diagram_residual"] == 0.0
    broken = OverDiagram(phi=tr, f_src=ident, f_dst=ident, psi=ident)
    rep = check_over_diagram(broken)
    assert rep.status == "fail"
    assert rep.metrics["diagram_residual"] == pytest.approx(0.1)


def test_over_diagram_identity_instantiation_is_exact():
    unit = Box((-1.0, -1.0), (1.0, 1.0))
    ident = identity_map(unit)
    diagram = OverDiagram(phi=ident, f_src=ident, f_dst=ident, psi=ident)
    rep = check_over_diagram(diagram)
    assert rep.metrics["diagram_residual"] <= 1e-14


def test_over_diagram_rejects_escaping_points():
    unit = Box((-1.0, -1.0), (1.0, 1.0))
    tiny = Box((-0.1, -0.1), (0.1, 0.1))
    far = pmap(["x1 + 5", "x2"], (-1.0, -1.0), (1.0, 1.0), "far")
    ident_tiny = identity_map(tiny)
    ident = identity_map(unit)
    diagram = OverDiagram(phi=far, f_src=ident, f_dst=ident_tiny, psi=ident)
    with pytest.raises(DomainError):
        check_over_diagram(diagram)
