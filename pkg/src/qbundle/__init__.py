"""Exact computations for quantum principal bundles over function algebras of finite groups,
the Laurent algebra, and the Dunkl hybrid bundle of a Coxeter group."""
from .checks import Check, CheckList
from .linalg import Scalar, Vec, S
from .hopf import FiniteGroup, FunctionAlgebra, LaurentAlgebra, Corepresentation, TruncationOverflow
from .catalogue import catalogue_group, decompose_regular, list_catalogue
from .fodc import Fodc, reflection_fodc
from .envelope import Envelope, build_envelope
from .qpb import (Qpb, BundleCalculus, TranslationMap, BalancedTensor, build_finite_bundle, regular_bundle,
                  multi_orbit_bundle, build_u1_example)
from .gauge import ConvolutionMap, ModuleAutomorphism, F_from_f, f_from_F, convolve, convolution_inverse
from .dunkl import RootSystem, Multiplicity, build_root_system, coxeter_group, dunkl_derivative, build_dunkl_bundle

__all__ = [
    "Check", "CheckList", "Scalar", "Vec", "S", "FiniteGroup", "FunctionAlgebra", "LaurentAlgebra",
    "Corepresentation", "TruncationOverflow", "catalogue_group", "decompose_regular", "list_catalogue", "Fodc",
    "reflection_fodc", "Envelope", "build_envelope", "Qpb", "BundleCalculus", "TranslationMap", "BalancedTensor",
    "build_finite_bundle", "regular_bundle", "multi_orbit_bundle", "build_u1_example", "ConvolutionMap",
    "ModuleAutomorphism", "F_from_f", "f_from_F", "convolve", "convolution_inverse", "RootSystem", "Multiplicity",
    "build_root_system", "coxeter_group", "dunkl_derivative", "build_dunkl_bundle",
]

__version__ = "0.1.0"
