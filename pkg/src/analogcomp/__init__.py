"""Analog compression toolkit: dimension estimates, Hölder codecs and rate-distortion bounds for subshifts."""
from .model import (
    Block,
    BudgetError,
    DimensionError,
    DyadicGrid,
    Empirical,
    FullShift,
    HolderSpec,
    ProductIID,
    ReciprocalAlphabet,
    ResolutionError,
    ShiftAverageProduct,
    SparseNK,
    VanishingCubes,
    enumerate_words,
    norm_distance,
    tau_distance,
)

__version__ = "0.1.0"

__all__ = [
    "Block", "BudgetError", "DimensionError", "DyadicGrid", "Empirical", "FullShift", "HolderSpec", "ProductIID",
    "ReciprocalAlphabet", "ResolutionError", "ShiftAverageProduct", "SparseNK", "VanishingCubes",
    "enumerate_words", "norm_distance", "tau_distance", "__version__",
]
