"""Local maps between coordinate boxes and families closed under the axioms.

A local map is a smooth map defined on a box.  Three representations cover
everything the toolkit builds: explicit polynomial maps, chains (step-by-step
composites kept numeric once symbolic degrees would blow up), and Newton
inverses (evaluation-only root finding against a forward map).  Families are
generated by breadth-first closure under composition, inversion and declared
restrictions, and validated against the pseudogroup axioms:

  1. composition: composable pairs stay in the family,
  2. inversion: inverses stay in the family,
  3. identity: the identity on every source is present,
  4. restriction: members restricted to sub-boxes are represented,
  5. gluing: maps assembled from agreeing pieces are represented.

Membership is containment-based throughout: a candidate is represented when
some member's domain contains the candidate's domain and the two agree on the
candidate's lattice.  That convention keeps the axioms checkable on finitely
many boxes.
"""
from __future__ import annotations

from dataclasses import dataclass, field as dc_field

import numpy as np

from . import defaults
from .errors import (CompositionError, DomainError, InversionError,
                     NumericalError)
from .jfield import Box, SampleGrid, eval_j
from .poly import PolyMap, Polynomial
from .report import make_report


def _box_label(box):
    parts = "x".join(f"[{lo:g},{hi:g}]" for lo, hi in zip(box.lo, box.hi))
    return parts


class LocalMap:
    """Map of a box into R^d, with one of three evaluation strategies."""

    POLY = "polynomial"
    CHAIN = "chain"
    NEWTON = "newton_inverse"

    def __init__(self, kind, domain, label, poly=None, steps=None,
                 forward=None, seeds_x=None, seeds_y=None,
                 declared_inverse=None):
        if kind not in (self.POLY, self.CHAIN, self.NEWTON):
            raise ValueError(f"unknown map kind {kind!r}")
        self.kind = kind
        self.domain = domain
        self.label = str(label)
        self.poly = poly
        self.steps = tuple(steps) if steps else ()
        self.forward = forward
        self.seeds_x = seeds_x
        self.seeds_y = seeds_y
        self.declared_inverse = declared_inverse
        if kind == self.POLY:
            if poly is None or poly.nvars != domain.dim:
                raise ValueError("polynomial map does not match its domain dimension")
            for comp in poly.components:
                if not comp.is_real():
                    raise ValueError("local map components must have real coefficients")

    # -- constructors --------------------------------------------------

    @classmethod
    def from_polynomials(cls, components, domain, label, declared_inverse=None):
        return cls(cls.POLY, domain, label, poly=PolyMap(components),
                   declared_inverse=declared_inverse)

    @property
    def dim(self):
        return self.domain.dim

    def __repr__(self):
        return f"LocalMap({self.label!r}, kind={self.kind}, domain={_box_label(self.domain)})"

    # -- evaluation ------------------------------------------------------

    def _domain_slack(self):
        return 1e-9 * max(self.domain.diameter, 1.0)

    def evaluate(self, points, check_domain=True):
        pts = np.asarray(points, dtype=float)
        single = pts.ndim == 1
        if single:
            pts = pts[None, :]
        if check_domain:
            inside = self.domain.contains(pts, slack=self._domain_slack())
            if not np.all(inside):
                bad = pts[~inside][0]
                raise DomainError(
                    f"point {tuple(bad)} outside the domain of {self.label}")
        if self.kind == self.POLY:
            out = self.poly.evaluate(pts).real
        elif self.kind == self.CHAIN:
            out = pts
            for step in self.steps:
                out = step.evaluate(out, check_domain=False)
        else:
            out, ok = self._newton_solve_batch(pts)
            if not np.all(ok):
                bad = pts[~ok][0]
                raise InversionError(
                    f"Newton iteration for {self.label} failed to converge "
                    f"for target {tuple(bad)}")
        return out[0] if single else out

    __call__ = evaluate

    def jacobian(self, points):
        pts = np.asarray(points, dtype=float)
        single = pts.ndim == 1
        if single:
            pts = pts[None, :]
        if self.kind == self.POLY:
            out = self.poly.jacobian(pts).real
        elif self.kind == self.CHAIN:
            out = np.broadcast_to(np.eye(self.dim), (pts.shape[0], self.dim, self.dim)).copy()
            current = pts
            for step in self.steps:
                out = np.einsum("pij,pjk->pik", step.jacobian(current), out)
                current = step.evaluate(current, check_domain=False)
        else:
            xs, ok = self._newton_solve_batch(pts)
            if not np.all(ok):
                bad = pts[~ok][0]
                raise InversionError(
                    f"Newton iteration for {self.label} failed to converge "
                    f"for target {tuple(bad)}")
            fwd = self.forward.jacobian(xs)
            try:
                out = np.linalg.inv(fwd)
            except np.linalg.LinAlgError as exc:
                raise InversionError(
                    f"forward Jacobian of {self.label} is singular") from exc
        return out[0] if single else out

    def try_evaluate(self, points):
        """Evaluate where possible: (values, valid mask).

        Polynomial maps are total.  Newton inverses (and chains through them)
        can fail on bounding-box points outside the true image; those points
        come back masked instead of raising.
        """
        pts = np.asarray(points, dtype=float)
        if pts.ndim == 1:
            pts = pts[None, :]
        if self.kind == self.POLY:
            return self.evaluate(pts, check_domain=False), np.ones(len(pts), dtype=bool)
        if self.kind == self.CHAIN:
            current = pts
            valid = np.ones(len(pts), dtype=bool)
            for step in self.steps:
                current, ok = step.try_evaluate(current)
                valid &= ok
            return current, valid
        return self._newton_solve_batch(pts)

    def _newton_solve_batch(self, ys, max_iter=50):
        """Solve forward(x) = y by damped Newton, one target per row.

        Each point starts at the nearest precomputed seed, takes full Newton
        steps with halving until the residual drops, and is accepted once the
        residual falls below 1e-9 of its scale.  Points that stall come back
        with a False mask entry; garbage rows (NaN propagation) mask
        themselves out as well.
        """
        ys = np.asarray(ys, dtype=float)
        scale = np.maximum(1.0, np.max(np.abs(ys), axis=1))
        scale = np.maximum(scale, self.domain.diameter)
        dist = np.max(np.abs(self.seeds_y[None, :, :] - ys[:, None, :]), axis=2)
        x = self.seeds_x[np.argmin(dist, axis=1)].astype(float).copy()
        res = self.forward.evaluate(x, check_domain=False) - ys
        norm = np.max(np.abs(res), axis=1)
        stalled = np.zeros(len(ys), dtype=bool)
        for _ in range(max_iter):
            active = ~stalled & (norm > 1e-13 * scale)
            if not np.any(active):
                break
            idx = np.flatnonzero(active)
            jac = self.forward.jacobian(x[idx])
            try:
                step = np.linalg.solve(jac, res[idx][:, :, None])[:, :, 0]
            except np.linalg.LinAlgError:
                step = np.zeros_like(res[idx])
                for row, j in enumerate(idx):
                    try:
                        step[row] = np.linalg.solve(jac[row], res[j])
                    except np.linalg.LinAlgError:
                        stalled[j] = True
                keep = ~stalled[idx]
                idx, step = idx[keep], step[keep]
                if idx.size == 0:
                    continue
            t = np.ones(len(idx))
            pending = np.ones(len(idx), dtype=bool)
            for _ in range(11):
                rows = np.flatnonzero(pending)
                if rows.size == 0:
                    break
                trial = x[idx[rows]] - t[rows, None] * step[rows]
                trial_res = self.forward.evaluate(trial, check_domain=False) - ys[idx[rows]]
                trial_norm = np.max(np.abs(trial_res), axis=1)
                better = trial_norm < norm[idx[rows]]
                good = rows[better]
                x[idx[good]] = trial[better]
                res[idx[good]] = trial_res[better]
                norm[idx[good]] = trial_norm[better]
                pending[good] = False
                t[rows[~better]] *= 0.5
            stalled[idx[pending]] = True
        with np.errstate(invalid="ignore"):
            ok = norm <= 1e-9 * scale
        return x, ok


def identity_map(box, label=None):
    """Identity on a box; it is its own declared inverse."""
    if label is None:
        label = f"id{_box_label(box)}"
    m = LocalMap.from_polynomials(
        [Polynomial.variable(box.dim, k) for k in range(box.dim)], box, label)
    m.declared_inverse = m
    return m


def restrict(map_, box, label=None):
    """The same map on the intersection of its domain with ``box``."""
    new_domain = map_.domain.intersect(box)
    if new_domain is None:
        raise DomainError(
            f"restriction box does not meet the domain of {map_.label}")
    if label is None:
        label = f"{map_.label}|{_box_label(new_domain)}"
    out = LocalMap(map_.kind, new_domain, label, poly=map_.poly,
                   steps=map_.steps, forward=map_.forward,
                   seeds_x=map_.seeds_x, seeds_y=map_.seeds_y)
    return out


def _steps_of(map_):
    return map_.steps if map_.kind == LocalMap.CHAIN else (map_,)


def _mesh_points(lo, hi, k):
    axes = [np.linspace(a, b, k) for a, b in zip(lo, hi)]
    return np.stack(np.meshgrid(*axes, indexing="ij"), axis=-1).reshape(-1, len(lo))


def compose(first, second, grid_k=defaults.GRID_PER_AXIS):
    """The composite "apply ``first``, then ``second``" on its effective domain.

    The effective domain is the largest sub-box of the first map's domain
    (found by seeded per-side bisection) whose lattice lands inside the
    second map's domain.  Raises CompositionError when no lattice point of
    the first domain does.
    """
    if first.dim != second.dim:
        raise CompositionError("maps act on spaces of different dimension")
    lattice = SampleGrid(first.domain, grid_k).points
    images, evaluable = first.try_evaluate(lattice)
    slack = 1e-12 * max(second.domain.diameter, 1.0)
    ok = evaluable & second.domain.contains(images, slack=slack)
    if not np.any(ok):
        raise CompositionError(
            f"no lattice point of {first.label} maps into the domain of "
            f"{second.label}")

    def passes(lo, hi):
        pts = _mesh_points(lo, hi, grid_k)
        img, good = first.try_evaluate(pts)
        if not np.all(good):
            return False
        return bool(np.all(second.domain.contains(img, slack=slack)))

    seed = lattice[int(np.argmax(ok))]
    lo = np.array(seed, dtype=float)
    hi = np.array(seed, dtype=float)
    dom_lo = np.array(first.domain.lo)
    dom_hi = np.array(first.domain.hi)
    growth_tol = 1e-12 * max(first.domain.diameter, 1.0)
    for _ in range(6):
        grew = False
        for d in range(first.dim):
            for side in ("lo", "hi"):
                if side == "lo":
                    avail = lo[d] - dom_lo[d]
                else:
                    avail = dom_hi[d] - hi[d]
                if avail <= 0:
                    continue

                def stretched(t):
                    l2, h2 = lo.copy(), hi.copy()
                    if side == "lo":
                        l2[d] -= t
                    else:
                        h2[d] += t
                    return l2, h2

                if passes(*stretched(avail)):
                    best = avail
                else:
                    t_ok, t_bad = 0.0, avail
                    for _ in range(60):
                        mid = 0.5 * (t_ok + t_bad)
                        if passes(*stretched(mid)):
                            t_ok = mid
                        else:
                            t_bad = mid
                    best = t_ok
                if best > growth_tol:
                    lo, hi = stretched(best)
                    grew = True
        if not grew:
            break
    if np.any(hi - lo <= 0):
        raise CompositionError(
            f"composable region of {first.label} then {second.label} has no "
            f"interior")
    domain = Box(tuple(lo), tuple(hi))
    label = f"({first.label}>>{second.label})"
    if (first.kind == LocalMap.POLY and second.kind == LocalMap.POLY
            and first.poly.degree * max(second.poly.degree, 1) <= defaults.DEGREE_CAP):
        return LocalMap(LocalMap.POLY, domain, label,
                        poly=second.poly.compose(first.poly))
    return LocalMap(LocalMap.CHAIN, domain, label,
                    steps=_steps_of(first) + _steps_of(second))


def invert(map_, grid_k=defaults.GRID_PER_AXIS, tol_invert=defaults.TOL_INVERT,
           tol_det=defaults.TOL_DET):
    """Inverse of a local map.

    A declared inverse is validated by the round trip on the domain lattice.
    Otherwise the Jacobian must be uniformly nondegenerate on the lattice and
    a Newton inverse is built on the bounding box of the image.
    """
    lattice = SampleGrid(map_.domain, grid_k).points
    images, evaluable = map_.try_evaluate(lattice)
    if not np.any(evaluable):
        raise InversionError(f"{map_.label} is not evaluable on its lattice")
    lattice, images = lattice[evaluable], images[evaluable]
    if map_.declared_inverse is not None:
        inv = map_.declared_inverse
        inside = inv.domain.contains(images, slack=1e-9 * max(inv.domain.diameter, 1.0))
        if not np.all(inside):
            raise InversionError(
                f"declared inverse of {map_.label} does not cover its image")
        back, back_ok = inv.try_evaluate(images)
        if not np.all(back_ok):
            raise InversionError(
                f"declared inverse of {map_.label} is not evaluable on its image")
        defect = float(np.max(np.abs(back - lattice)))
        if defect > tol_invert:
            raise InversionError(
                f"declared inverse of {map_.label} fails the round trip: "
                f"defect {defect:.3e} > {tol_invert:g}")
        return inv
    dets = np.linalg.det(map_.jacobian(lattice))
    min_det = float(np.min(np.abs(dets)))
    if min_det <= tol_det:
        raise InversionError(
            f"{map_.label} has |det| = {min_det:.3e} <= {tol_det:g} on its "
            f"lattice; not invertible")
    lo = tuple(np.min(images, axis=0))
    hi = tuple(np.max(images, axis=0))
    if any(a >= b for a, b in zip(lo, hi)):
        raise InversionError(f"image of {map_.label} has no interior")
    out = LocalMap(LocalMap.NEWTON, Box(lo, hi), f"inv({map_.label})",
                   forward=map_, seeds_x=np.array(lattice),
                   seeds_y=np.array(images), declared_inverse=map_)
    return out


# ---------------------------------------------------------------------------
# families
# ---------------------------------------------------------------------------

def covers(member, candidate, tol, grid_k=defaults.GRID_PER_AXIS):
    """True when ``member`` contains ``candidate``: domain containment plus
    agreement on the candidate's lattice."""
    if member.dim != candidate.dim:
        return False
    slack = 1e-9 * max(member.domain.diameter, candidate.domain.diameter, 1.0)
    if any(ml > cl + slack for ml, cl in zip(member.domain.lo, candidate.domain.lo)):
        return False
    if any(mh < ch - slack for mh, ch in zip(member.domain.hi, candidate.domain.hi)):
        return False
    pts = SampleGrid(candidate.domain, grid_k).points
    a, ok_a = member.try_evaluate(pts)
    b, ok_b = candidate.try_evaluate(pts)
    ok = ok_a & ok_b
    if not np.all(ok):
        return False
    return float(np.max(np.abs(a - b))) <= tol


@dataclass
class GlueTest:
    """Pieces of declared members expected to assemble over a target box."""

    member_labels: tuple
    boxes: tuple
    target: Box


@dataclass
class PseudogroupFamily:
    """A finite family of local maps inside one ambient box."""

    ambient: Box
    members: list
    dedup_tol: float
    grid_k: int
    depth: int
    notes: list = dc_field(default_factory=list)

    def labels(self):
        return [m.label for m in self.members]

    def find(self, label):
        for m in self.members:
            if m.label == label:
                return m
        raise KeyError(f"no member labeled {label!r}")


MAX_FAMILY_SIZE = 500


def generate(seeds, ambient, depth=2, grid_k=defaults.GRID_PER_AXIS,
             dedup_tol=None, restriction_targets=()):
    """Breadth-first closure of seed maps under composition and inversion.

    Level by level, all ordered composites, all inverses and all declared
    restrictions of current members are formed; candidates already contained
    in a member are dropped.  Identities are added for every seed up front
    and for every member domain at the end.  Insertion order is
    deterministic, so repeated runs agree exactly.
    """
    if dedup_tol is None:
        dedup_tol = defaults.DEDUP_TOL_FACTOR * ambient.diameter
    members = []
    notes = []

    def add(candidate):
        if len(members) >= MAX_FAMILY_SIZE:
            raise NumericalError(
                f"family exceeded the safety cap of {MAX_FAMILY_SIZE} members")
        slack = 1e-9 * max(ambient.diameter, 1.0)
        if not ambient.contains(np.array(candidate.domain.lo), slack=slack) or \
           not ambient.contains(np.array(candidate.domain.hi), slack=slack):
            notes.append(f"dropped {candidate.label}: domain leaves the ambient box")
            return False
        for m in members:
            if covers(m, candidate, dedup_tol, grid_k):
                return False
        members.append(candidate)
        return True

    for seed in seeds:
        add(seed)
    for seed in list(members):
        add(identity_map(seed.domain))

    for _level in range(depth):
        current = list(members)
        for f in current:
            for g in current:
                try:
                    add(compose(f, g, grid_k=grid_k))
                except CompositionError:
                    continue
        for f in current:
            try:
                add(invert(f, grid_k=grid_k))
            except InversionError as exc:
                notes.append(f"inversion skipped: {exc}")
        for f in current:
            for target in restriction_targets:
                try:
                    add(restrict(f, target))
                except DomainError:
                    continue
        if len(members) == len(current):
            break

    for m in list(members):
        add(identity_map(m.domain))

    return PseudogroupFamily(ambient=ambient, members=members,
                             dedup_tol=float(dedup_tol), grid_k=int(grid_k),
                             depth=int(depth), notes=notes)


def _contained(family, candidate):
    return any(covers(m, candidate, family.dedup_tol, family.grid_k)
               for m in family.members)


def validate_axioms(family, glue_tests=(), grid_k=None):
    """Check the five closure axioms; one report per axiom.

    Failures are counted and the first few offenders are named in the notes.
    Composition is checked over ordered pairs with a nonempty composable
    region; pairs with none are vacuous.
    """
    grid_k = family.grid_k if grid_k is None else grid_k
    reports = []

    failures = []
    for f in family.members:
        for g in family.members:
            try:
                c = compose(f, g, grid_k=grid_k)
            except CompositionError:
                continue
            if not _contained(family, c):
                failures.append(f"{f.label}>>{g.label}")
    reports.append(_axiom_report("axiom1_composition", failures))

    failures = []
    for f in family.members:
        try:
            inv = invert(f, grid_k=grid_k)
        except InversionError as exc:
            failures.append(f"{f.label}: {exc}")
            continue
        if not _contained(family, inv):
            failures.append(f"inv({f.label})")
    reports.append(_axiom_report("axiom2_inversion", failures))

    failures = []
    for f in family.members:
        if not _contained(family, identity_map(f.domain)):
            failures.append(f"id on {_box_label(f.domain)}")
    reports.append(_axiom_report("axiom3_identity", failures))

    failures = []
    for f in family.members:
        mid = 0.5 * (f.domain.lo[0] + f.domain.hi[0])
        for piece_box in (Box((mid,) + f.domain.lo[1:], f.domain.hi),
                          Box(f.domain.lo, (mid,) + f.domain.hi[1:])):
            piece = restrict(f, piece_box)
            if not _contained(family, piece):
                failures.append(piece.label)
    reports.append(_axiom_report("axiom4_restriction", failures))

    failures = []
    for test in glue_tests:
        failures.extend(_check_glue(family, test, grid_k))
    report = _axiom_report("axiom5_gluing", failures)
    if not glue_tests:
        report.add_note("no glue tests declared; vacuous")
    reports.append(report)
    return reports


def _axiom_report(name, failures):
    report = make_report(
        task=name,
        metrics={"failures": float(len(failures))},
        tolerances={},
        extra_pass=not failures,
    )
    for item in failures[:10]:
        report.add_note(f"not represented: {item}")
    if len(failures) > 10:
        report.add_note(f"... and {len(failures) - 10} more")
    return report


def _check_glue(family, test, grid_k):
    failures = []
    pieces = []
    for label, box in zip(test.member_labels, test.boxes):
        try:
            pieces.append(restrict(family.find(label), box))
        except (KeyError, DomainError) as exc:
            failures.append(f"glue piece {label}: {exc}")
    if failures:
        return failures
    for i in range(len(pieces)):
        for j in range(i + 1, len(pieces)):
            overlap = pieces[i].domain.intersect(pieces[j].domain)
            if overlap is None:
                continue
            pts = SampleGrid(overlap, grid_k).points
            gap = float(np.max(np.abs(pieces[i].evaluate(pts, check_domain=False)
                                      - pieces[j].evaluate(pts, check_domain=False))))
            if gap > family.dedup_tol:
                failures.append(
                    f"pieces {pieces[i].label} and {pieces[j].label} disagree "
                    f"by {gap:.3e}")
    target_pts = SampleGrid(test.target, grid_k).points
    covered_mask = np.zeros(len(target_pts), dtype=bool)
    for piece in pieces:
        covered_mask |= piece.domain.contains(target_pts, slack=1e-9)
    if not np.all(covered_mask):
        failures.append(
            f"{int(np.sum(~covered_mask))} target lattice points not covered "
            f"by any glue piece")
        return failures
    glued = None
    for m in family.members:
        slack = 1e-9 * max(m.domain.diameter, 1.0)
        if all(ml <= tl + slack for ml, tl in zip(m.domain.lo, test.target.lo)) and \
           all(mh >= th - slack for mh, th in zip(m.domain.hi, test.target.hi)):
            agrees = all(
                float(np.max(np.abs(
                    m.evaluate(SampleGrid(p.domain, grid_k).points, check_domain=False)
                    - p.evaluate(SampleGrid(p.domain, grid_k).points, check_domain=False)
                ))) <= family.dedup_tol
                for p in pieces)
            if agrees:
                glued = m
                break
    if glued is None:
        failures.append(
            f"no member represents the glued map on {_box_label(test.target)}")
    return failures


# ---------------------------------------------------------------------------
# structure compatibility and diagrams
# ---------------------------------------------------------------------------

def check_ah_map(map_, structure, target_structure=None,
                 grid_k=defaults.GRID_PER_AXIS, tol=defaults.TOL_MAP):
    """Compatibility of a local map with the structure: DPhi J = J' DPhi.

    Sampled on the lattice of the map's domain; points that leave either
    structure's box are skipped and counted.  All points invalid is an error.
    """
    if target_structure is None:
        target_structure = structure
    if map_.dim != structure.real_dim:
        raise DomainError(
            f"map dimension {map_.dim} does not match the structure dimension "
            f"{structure.real_dim}")
    pts = SampleGrid(map_.domain, grid_k).points
    src_ok = structure.box.contains(pts, slack=1e-12)
    pts = pts[src_ok]
    skipped = int(np.sum(~src_ok))
    if len(pts):
        images, evaluable = map_.try_evaluate(pts)
        dst_ok = evaluable & target_structure.box.contains(images, slack=1e-12)
        skipped += int(np.sum(~dst_ok))
        pts, images = pts[dst_ok], images[dst_ok]
    if not len(pts):
        raise DomainError(
            f"no lattice point of {map_.label} stays inside both structure boxes")
    dphi = map_.jacobian(pts)
    j_src = eval_j(structure, pts)
    j_dst = eval_j(target_structure, images)
    defect = (np.einsum("pij,pjk->pik", dphi, j_src)
              - np.einsum("pij,pjk->pik", j_dst, dphi))
    residual = float(np.max(np.abs(defect)))
    return make_report(
        task="ah_map",
        metrics={"ah_map_residual": residual,
                 "checked_points": float(len(pts)),
                 "skipped_points": float(skipped)},
        tolerances={"ah_map_residual": tol},
        notes=[f"map {map_.label}"],
    )


@dataclass
class OverDiagram:
    """Square of maps: horizontal phi upstairs, psi downstairs, bundle maps
    f_src and f_dst vertical."""

    phi: LocalMap
    f_src: LocalMap
    f_dst: LocalMap
    psi: LocalMap


def check_over_diagram(diagram, grid_k=defaults.GRID_PER_AXIS,
                       tol=defaults.TOL_DIAGRAM):
    """Commutation residual max |f_dst(phi(p)) - psi(f_src(p))| on a lattice.

    Lattice points must thread all four domains; more than a fifth falling
    out is treated as a mis-declared diagram.
    """
    pts = SampleGrid(diagram.phi.domain, grid_k).points
    total = len(pts)
    slack = 1e-9
    ok = diagram.f_src.domain.contains(pts, slack=slack)
    pts = pts[ok]
    up = diagram.phi.evaluate(pts, check_domain=False)
    ok = diagram.f_dst.domain.contains(up, slack=slack)
    pts, up = pts[ok], up[ok]
    down = diagram.f_src.evaluate(pts, check_domain=False)
    ok = diagram.psi.domain.contains(down, slack=slack)
    pts, up, down = pts[ok], up[ok], down[ok]
    skipped = total - len(pts)
    if skipped > 0.2 * total:
        raise DomainError(
            f"{skipped} of {total} lattice points leave the diagram's domains")
    left = diagram.f_dst.evaluate(up, check_domain=False)
    right = diagram.psi.evaluate(down, check_domain=False)
    residual = float(np.max(np.abs(left - right)))
    return make_report(
        task="over_diagram",
        metrics={"diagram_residual": residual,
                 "checked_points": float(len(pts)),
                 "skipped_points": float(skipped)},
        tolerances={"diagram_residual": tol},
    )
