"""Default tolerances and size caps shared across the toolkit."""

TOOLKIT_VERSION = "0.1.0"

# Dimension and degree envelope.
DIM_CAP = 4            # largest complex dimension n; real dimension is 2n
DEGREE_CAP = 6         # largest polynomial total degree handled symbolically

# Named tolerances.  Scenario tasks and the CLI --tol flag override by name.
TOL_ACS = 1e-10        # max-norm of J(p)^2 + I over a verification grid
TOL_EIGEN = 1e-8       # eigen-residual for the (1,0)/(0,1) splitting
TOL_CR = 1e-10         # Cauchy-Riemann residual for pass/fail checks
TOL_INTEGRABILITY = 1e-6   # max-norm of the Nijenhuis tensor over a grid
TOL_DET = 1e-6         # smallest acceptable |det| of a chart Jacobian
TOL_FIT = 1e-8         # max residual of a polynomial least-squares fit
TOL_HOLO = 1e-9        # max |conjugate-monomial coefficient| in a full fit
TOL_COCYCLE = 1e-8     # max cocycle defect on a triple overlap
TOL_MAP = 1e-9         # structure-compatibility residual for local maps
TOL_DIAGRAM = 1e-8     # commutation residual for defined-over diagrams
TOL_INVERT = 1e-9      # round-trip residual for local-map inverses
SVD_REL_TOL = 1e-8     # relative singular-value cutoff (rank / nullspace)

# Relative factors resolved against a box diameter at call time.
CLUSTER_TOL_FACTOR = 1e-6   # fiber clustering resolution
DEDUP_TOL_FACTOR = 1e-9     # map-equality tolerance inside a family

# Fit and grid defaults.
FIT_DEGREE = 4
GRID_PER_AXIS = 5           # lattice density for map/axiom checks


def default_solver_grid(degree):
    """Lattice density used by the CR solver when none is given."""
    return 2 * degree + 1


DEFAULT_TOLERANCES = {
    "tol_acs": TOL_ACS,
    "tol_eigen": TOL_EIGEN,
    "tol_cr": TOL_CR,
    "tol_integrability": TOL_INTEGRABILITY,
    "tol_det": TOL_DET,
    "tol_fit": TOL_FIT,
    "tol_holo": TOL_HOLO,
    "tol_cocycle": TOL_COCYCLE,
    "tol_map": TOL_MAP,
    "tol_diagram": TOL_DIAGRAM,
    "tol_invert": TOL_INVERT,
    "svd_rel_tol": SVD_REL_TOL,
}
