"""Exact computations with the Berstein-Schwarz class of cyclic groups.

The package builds free resolutions over Z[Z_m], diagonal approximations and
twisted cup products, and uses them to certify statements about products of
lens spaces.  Every nontrivial claim comes with a witness that
:func:`bscat.replay.recheck` can re-validate.
"""
from .exactla import InputError, LatticeSolver, smith, invariant_factors
from .kernels import BACKEND, available_backends
from .groupring import CyclicRingElement, GModule, aug_ideal, regular_module, trivial_module
from .complexes import FreeComplex, PreconditionError, diagonal, lens_complex, periodic_resolution
from .cohomology import KOSZUL, PLAIN, CohClass, Cochain, cohomology_group, cup, is_coboundary
from .berstein import (
    bs_cayley,
    bs_delta,
    bs_order,
    bs_power,
    decompose,
    vanish_bruteforce,
    vanish_structured,
)
from .lensarith import (
    LensSpec,
    bezout,
    bounds_report,
    cup_length_lower,
    emss_parallelizable,
    olum_equivalent,
)

__version__ = "0.1.0"
