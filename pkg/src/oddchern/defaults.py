"""One place for every numeric default the library and CLI use.

All values are echoed into reports so a run is reproducible from its output.
"""

# Gauss-Legendre nodes per angular coordinate, keyed by sphere dimension.
NODES_PER_ANGLE = {1: 64, 2: 48, 3: 32, 4: 32, 5: 24}

# Reduced per-angle budget used for mapping-degree checks on 5-dimensional
# domains, where the default table would produce tens of millions of nodes.
DEGREE_CHECK_NODES_PER_ANGLE = {1: 32, 2: 24, 3: 16, 4: 16, 5: 14}

# Collapse-map radius in stereographic units; the identity region |w| <= R
# then carries the bulk of the product measure.
COLLAPSE_RADIUS = 4.0

# Deformation-parameter integral for the boundary transgression form:
# Gauss-Legendre on [0, T_MAX]; the tail beyond T_MAX is bounded by
# exp(-T_MAX**2) * poly and neglected.
T_MAX = 8.0
T_NODES = 200

# Finite-difference steps (Richardson-extrapolated 5-point stencils).
FD_STEP = 1e-4

# Tolerances.
DEGREE_RESIDUAL_TOL = 1e-4      # |value - nearest integer|
DEGREE_IMAG_TOL = 1e-8          # imaginary contamination, relative
CONVERGENCE_TOL = 1e-6          # resolution-doubling agreement
TWO_PATH_TOL = 1e-7             # gamma quadrature vs closed form
UNITARY_TOL = 1e-12             # ||v* v - Id|| on unitarized models
MIN_SINGULAR_VALUE = 1e-8       # invertibility floor for matrix maps

# Convergence escalation: resolution scales tried in order.
RESOLUTION_SCALES = (0.5, 1.0, 2.0, 4.0)

# Scale ladder for degrees of maps pulled back through the collapse map.
# Their integrands concentrate near the gluing annulus and converge slowly
# and non-monotonically, so consecutive-step agreement is judged against a
# looser tolerance while integrality is still held to DEGREE_RESIDUAL_TOL.
SPLIT_DEGREE_SCALES = (1.0, 2.0)
SPLIT_DEGREE_TOL = 2e-4

# Node-batch size for chunked evaluation over large grids.
CHUNK = 400_000
