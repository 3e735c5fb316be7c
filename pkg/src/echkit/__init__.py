"""echkit: embedded contact homology computations at desk scale.

Modules
-------
f2           sparse matrices over F2
homalg       graded complexes, homology, chain maps, cones and tensor products
ech_core     Reeb orbit sets, action truncation and filtered towers
models       ellipsoid, S^1 x S^2 and random model complexes
connect      the connected-sum cone and its comparison with the derived tensor product
index        Conley-Zehnder, Fredholm and ECH indices
asymptotics  linearized flow at the handle orbit and asymptotic operator spectra
spectral     ECH spectral invariants c_sigma and c_k
io           file formats
cli          the ``echkit`` command
"""

from .asymptotics import (
    ResolutionError,
    asymptotic_spectrum,
    flow_report,
    spectrum_report,
    weinstein_flow,
)
from .connect import (
    ConeData,
    EquivalenceError,
    build_cone_complex,
    chain_equivalence,
    connected_sum_homology,
    theorem_comparison,
)
from .ech_core import (
    FilteredTower,
    LDegeneracyError,
    Orbit,
    OrbitSet,
    enumerate_orbit_sets,
    stabilization_profile,
    truncate,
)
from .f2 import SparseF2Matrix
from .homalg import (
    ChainMap,
    ClassLabel,
    Generator,
    GradedComplex,
    MissingUMapError,
    ValidationError,
    derived_tensor,
    homology,
    induced_map,
    mapping_cone,
    tensor,
    validate,
)
from .index import (
    CZDegeneracyError,
    CurveData,
    Trivialization,
    check_index_inequality,
    cz_iterate,
    curve_ech_index,
    fredholm_index,
)
from .models import ellipsoid, random_model, s1_x_s2, s3, unit_complex
from .spectral import InsufficientDepthError, c_k, c_sigma, conjecture_sweep, spectrum_table

__all__ = [
    "asymptotic_spectrum",
    "build_cone_complex",
    "c_k",
    "c_sigma",
    "chain_equivalence",
    "ChainMap",
    "check_index_inequality",
    "ClassLabel",
    "ConeData",
    "conjecture_sweep",
    "connected_sum_homology",
    "curve_ech_index",
    "CurveData",
    "cz_iterate",
    "CZDegeneracyError",
    "derived_tensor",
    "ellipsoid",
    "enumerate_orbit_sets",
    "EquivalenceError",
    "FilteredTower",
    "flow_report",
    "fredholm_index",
    "Generator",
    "GradedComplex",
    "homology",
    "induced_map",
    "InsufficientDepthError",
    "LDegeneracyError",
    "mapping_cone",
    "MissingUMapError",
    "Orbit",
    "OrbitSet",
    "random_model",
    "ResolutionError",
    "s1_x_s2",
    "s3",
    "SparseF2Matrix",
    "spectrum_report",
    "spectrum_table",
    "stabilization_profile",
    "tensor",
    "theorem_comparison",
    "Trivialization",
    "truncate",
    "unit_complex",
    "validate",
    "ValidationError",
    "weinstein_flow",
]

__version__ = "0.1.0"
