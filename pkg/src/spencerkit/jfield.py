"""Almost complex structures on coordinate boxes.

A structure is a polynomial matrix field J on a closed box in R^{2n} with
J(p)^2 = -I.  The complex coordinate pairing is adjacent: z^j corresponds to
(x^{2j-1}, x^{2j}), and the standard structure sends d/dx^{2j-1} to
d/dx^{2j}.  Matrices act on columns: column j of J(p) is the image of the
j-th coordinate field.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import defaults
from .errors import ConfigurationError, DegenerateStructureError, DomainError
from .poly import Polynomial
from .report import make_report


@dataclass(frozen=True)
class Box:
    """Closed axis-aligned box, the common domain type of the toolkit."""

    lo: tuple
    hi: tuple

    def __post_init__(self):
        lo = tuple(float(v) for v in self.lo)
        hi = tuple(float(v) for v in self.hi)
        if len(lo) != len(hi) or not lo:
            raise ConfigurationError("box bounds must be nonempty and of equal length")
        if len(lo) > 2 * defaults.DIM_CAP:
            raise ConfigurationError(
                f"box dimension {len(lo)} exceeds cap {2 * defaults.DIM_CAP}")
        if any(a >= b for a, b in zip(lo, hi)):
            raise ConfigurationError(f"box has empty interior: lo={lo}, hi={hi}")
        object.__setattr__(self, "lo", lo)
        object.__setattr__(self, "hi", hi)

    @property
    def dim(self):
        return len(self.lo)

    @property
    def center(self):
        return tuple(0.5 * (a + b) for a, b in zip(self.lo, self.hi))

    @property
    def widths(self):
        return tuple(b - a for a, b in zip(self.lo, self.hi))

    @property
    def diameter(self):
        """Longest side; the scale against which relative tolerances resolve."""
        return max(self.widths)

    def contains(self, points, slack=0.0):
        """Membership mask for a point (d,) or batch (P, d)."""
        pts = np.asarray(points, dtype=float)
        single = pts.ndim == 1
        if single:
            pts = pts[None, :]
        if pts.shape[1] != self.dim:
            raise DomainError(f"point dimension {pts.shape[1]} != box dimension {self.dim}")
        lo = np.asarray(self.lo) - slack
        hi = np.asarray(self.hi) + slack
        mask = np.all((pts >= lo) & (pts <= hi), axis=1)
        return bool(mask[0]) if single else mask

    def intersect(self, other):
        """Intersection box, or None when the interiors do not meet."""
        if self.dim != other.dim:
            raise DomainError("boxes of different dimension do not intersect")
        lo = tuple(max(a, b) for a, b in zip(self.lo, other.lo))
        hi = tuple(min(a, b) for a, b in zip(self.hi, other.hi))
        if any(a >= b for a, b in zip(lo, hi)):
            return None
        return Box(lo, hi)

    def almost_equal(self, other, rtol=1e-9):
        scale = max(self.diameter, other.diameter) if self.dim == other.dim else 0.0
        return (self.dim == other.dim
                and all(abs(a - b) <= rtol * scale for a, b in zip(self.lo, other.lo))
                and all(abs(a - b) <= rtol * scale for a, b in zip(self.hi, other.hi)))


class SampleGrid:
    """Uniform lattice on a box, k points per axis, in lexicographic order."""

    __slots__ = ("box", "k", "points")

    def __init__(self, box, k=defaults.GRID_PER_AXIS):
        if k < 2:
            raise ConfigurationError(f"grid needs at least 2 points per axis, got {k}")
        axes = [np.linspace(a, b, k) for a, b in zip(box.lo, box.hi)]
        pts = np.stack(np.meshgrid(*axes, indexing="ij"), axis=-1).reshape(-1, box.dim)
        pts.flags.writeable = False
        object.__setattr__(self, "box", box)
        object.__setattr__(self, "k", int(k))
        object.__setattr__(self, "points", pts)

    def __setattr__(self, name, value):
        raise AttributeError("SampleGrid is immutable")

    def __len__(self):
        return self.points.shape[0]

    def __repr__(self):
        return f"SampleGrid(k={self.k}, dim={self.box.dim}, points={len(self)})"


class ACStructure:
    """Polynomial matrix field J on a box in R^{2n}."""

    __slots__ = ("n", "box", "matrix", "_deriv")

    def __init__(self, n, box, matrix):
        n = int(n)
        if not 1 <= n <= defaults.DIM_CAP:
            raise ConfigurationError(f"complex dimension {n} outside 1..{defaults.DIM_CAP}")
        if box.dim != 2 * n:
            raise ConfigurationError(f"box dimension {box.dim} != 2n = {2 * n}")
        size = 2 * n
        if len(matrix) != size or any(len(row) != size for row in matrix):
            raise ConfigurationError(f"structure matrix must be {size}x{size}")
        for i, row in enumerate(matrix):
            for j, entry in enumerate(row):
                if not isinstance(entry, Polynomial) or entry.nvars != size:
                    raise ConfigurationError(
                        f"entry ({i},{j}) is not a polynomial in {size} variables")
                if not entry.is_real():
                    raise ConfigurationError(f"entry ({i},{j}) has complex coefficients")
                if entry.degree > defaults.DEGREE_CAP:
                    raise ConfigurationError(
                        f"entry ({i},{j}) degree {entry.degree} exceeds cap "
                        f"{defaults.DEGREE_CAP}")
        object.__setattr__(self, "n", n)
        object.__setattr__(self, "box", box)
        object.__setattr__(self, "matrix", tuple(tuple(row) for row in matrix))
        object.__setattr__(self, "_deriv", None)

    def __setattr__(self, name, value):
        raise AttributeError("ACStructure is immutable")

    @property
    def real_dim(self):
        return 2 * self.n

    def default_grid(self, k=defaults.GRID_PER_AXIS):
        return SampleGrid(self.box, k)

    def _deriv_matrix(self):
        """Exact partials of every entry: _deriv[k][i][j] = d(matrix[i][j])/dx^k."""
        if self._deriv is None:
            size = self.real_dim
            deriv = tuple(
                tuple(tuple(self.matrix[i][j].diff(k) for j in range(size))
                      for i in range(size))
                for k in range(size))
            object.__setattr__(self, "_deriv", deriv)
        return self._deriv


def eval_j(structure, points):
    """Evaluate J at a point (2n,) or batch (P, 2n); real output (..., 2n, 2n)."""
    pts = np.asarray(points, dtype=float)
    single = pts.ndim == 1
    if single:
        pts = pts[None, :]
    size = structure.real_dim
    out = np.empty((pts.shape[0], size, size))
    for i in range(size):
        for j in range(size):
            out[:, i, j] = structure.matrix[i][j].evaluate(pts).real
    return out[0] if single else out


def eval_j_derivatives(structure, points):
    """Exact entry partials at a batch: DJ[p, k, i, j] = d J_{ij} / dx^k at p."""
    pts = np.asarray(points, dtype=float)
    if pts.ndim == 1:
        pts = pts[None, :]
    size = structure.real_dim
    deriv = structure._deriv_matrix()
    out = np.zeros((pts.shape[0], size, size, size))
    for k in range(size):
        for i in range(size):
            for j in range(size):
                entry = deriv[k][i][j]
                if not entry.is_zero:
                    out[:, k, i, j] = entry.evaluate(pts).real
    return out


def standard_structure(n, box=None):
    """The flat structure: each adjacent pair (x^{2j-1}, x^{2j}) is one z^j."""
    if box is None:
        box = Box((-1.0,) * (2 * n), (1.0,) * (2 * n))
    size = 2 * n
    matrix = [[Polynomial.zero(size) for _ in range(size)] for _ in range(size)]
    for j in range(n):
        matrix[2 * j + 1][2 * j] = Polynomial.constant(size, 1.0)
        matrix[2 * j][2 * j + 1] = Polynomial.constant(size, -1.0)
    return ACStructure(n, box, matrix)


def check_acs(structure, grid=None, tol=defaults.TOL_ACS):
    """Verify J(p)^2 = -I over a lattice; metric is the worst max-norm defect."""
    if grid is None:
        grid = structure.default_grid()
    j = eval_j(structure, grid.points)
    eye = np.eye(structure.real_dim)
    defect = np.einsum("pik,pkj->pij", j, j) + eye
    residual = float(np.max(np.abs(defect)))
    return make_report(
        task="check_acs",
        metrics={"acs_residual": residual, "grid_points": float(len(grid))},
        tolerances={"acs_residual": tol},
    )


def pullback(structure, omega, points):
    """Pull a covector field back through J: (J* omega)(X) = omega(J X).

    ``omega`` is a constant covector (2n,) or a pointwise batch (P, 2n);
    the result has components (J* omega)_j = sum_i omega_i J_{ij}.
    """
    pts = np.asarray(points)
    single = pts.ndim == 1
    if single:
        pts = pts[None, :]
    j = eval_j(structure, pts)
    om = np.asarray(omega)
    if om.ndim == 1:
        om = np.broadcast_to(om, (pts.shape[0], om.shape[0]))
    if om.shape != (pts.shape[0], structure.real_dim):
        raise DomainError(
            f"covector batch shape {om.shape} does not match points and dimension")
    out = np.einsum("pi,pij->pj", om, j)
    return out[0] if single else out


@dataclass
class SplitTypeResult:
    """Pointwise eigenspace splitting of J into i and -i parts."""

    dims: tuple                 # (dim of i-eigenspace, dim of -i-eigenspace)
    eigen_residual: float       # worst |J v -/+ i v| over all basis vectors
    bases_plus: np.ndarray      # (P, n, 2n) complex, rows are basis vectors
    bases_minus: np.ndarray     # (P, n, 2n)
    points: np.ndarray


def _canonical_vector(v):
    """Unit max-norm, first significant component rotated to positive real."""
    scale = np.max(np.abs(v))
    v = v / scale
    for c in v:
        if abs(c) > 1e-9:
            v = v * (abs(c) / c)
            break
    return v


def _eigenspace_basis(j_matrix, eigenvalue, svd_rel_tol):
    a = j_matrix.astype(complex) - eigenvalue * np.eye(j_matrix.shape[0])
    _, sigma, vh = np.linalg.svd(a)
    cutoff = svd_rel_tol * sigma[0] if sigma[0] > 0 else svd_rel_tol
    rank = int(np.sum(sigma > cutoff))
    basis = [_canonical_vector(v) for v in np.conj(vh[rank:])]
    basis.sort(key=lambda v: tuple(x for c in v for x in (round(c.real, 9), round(c.imag, 9))))
    return basis


def split_type(structure, points=None, svd_rel_tol=defaults.SVD_REL_TOL):
    """Split C^{2n} into the i and -i eigenspaces of J at each point.

    Raises DegenerateStructureError unless both spaces have dimension n
    everywhere.  Basis vectors are canonically normalized and sorted, so the
    result is deterministic.
    """
    if points is None:
        points = structure.default_grid().points
    pts = np.asarray(points, dtype=float)
    if pts.ndim == 1:
        pts = pts[None, :]
    n, size = structure.n, structure.real_dim
    j = eval_j(structure, pts)
    plus = np.zeros((pts.shape[0], n, size), dtype=complex)
    minus = np.zeros((pts.shape[0], n, size), dtype=complex)
    for p in range(pts.shape[0]):
        b_plus = _eigenspace_basis(j[p], 1j, svd_rel_tol)
        b_minus = _eigenspace_basis(j[p], -1j, svd_rel_tol)
        if len(b_plus) != n or len(b_minus) != n:
            raise DegenerateStructureError(
                f"eigenspace dimensions ({len(b_plus)}, {len(b_minus)}) != ({n}, {n}) "
                f"at point {tuple(pts[p])}")
        plus[p] = np.array(b_plus)
        minus[p] = np.array(b_minus)
    res_plus = np.einsum("pij,pkj->pki", j.astype(complex), plus) - 1j * plus
    res_minus = np.einsum("pij,pkj->pki", j.astype(complex), minus) + 1j * minus
    residual = float(max(np.max(np.abs(res_plus)), np.max(np.abs(res_minus))))
    return SplitTypeResult(
        dims=(n, n),
        eigen_residual=residual,
        bases_plus=plus,
        bases_minus=minus,
        points=pts,
    )


def nijenhuis(structure, points):
    """Nijenhuis tensor on coordinate fields, exact derivatives throughout.

    Returns N with shape (P, 2n, 2n, 2n): N[p, i, a, b] is component i of
    N(d/dx^a, d/dx^b) at point p.  Antisymmetry in (a, b) is exact because
    the two halves are computed once and subtracted.
    """
    pts = np.asarray(points, dtype=float)
    single = pts.ndim == 1
    if single:
        pts = pts[None, :]
    j = eval_j(structure, pts)
    dj = eval_j_derivatives(structure, pts)
    # half[p, i, a, b] = sum_k J_{ka} d_k J_{ib} + sum_k J_{ik} d_b J_{ka}
    half = (np.einsum("pka,pkib->piab", j, dj)
            + np.einsum("pik,pbka->piab", j, dj))
    out = half - half.transpose(0, 1, 3, 2)
    return out[0] if single else out


def integrability_report(structure, grid=None, tol=defaults.TOL_INTEGRABILITY):
    """Largest Nijenhuis component over a lattice, compared against ``tol``.

    The check passes when the tensor vanishes to tolerance (an integrable
    structure); scenarios that expect obstruction flip the expectation.
    """
    if grid is None:
        grid = structure.default_grid()
    n_tensor = nijenhuis(structure, grid.points)
    residual = float(np.max(np.abs(n_tensor)))
    return make_report(
        task="integrability",
        metrics={"integrability_residual": residual, "grid_points": float(len(grid))},
        tolerances={"integrability_residual": tol},
    )
