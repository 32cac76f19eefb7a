"""Stable tropical coordinates on persistence barcodes, exact barcode
distances, and sweep-filtration persistent homology of binary images."""

__version__ = "0.1.0"

from .barcode import Barcode, Interval, canonicalize, equivalent, from_birth_death, pad
from .coords import (
    CoordinateSpec,
    OrbitSpec,
    RationalE,
    Sigma,
    SumLengths,
    SumMaxGap,
    SumMinXmd,
    e_eval,
    featurize,
    find_separating,
    mnist_features,
    sigma_eval,
)
from .metrics import (
    bottleneck,
    bottleneck_oracle,
    diag_dist,
    interval_dist,
    wasserstein,
    wasserstein_oracle,
)
from .persistence import (
    BinaryImage,
    GrayImage,
    SweepDirection,
    connected_component_count,
    persistent_homology,
    sweep_filtration,
    threshold,
)
from .tropical import parse_tropical, to_rational_normal_form, to_text, trop_eval

__all__ = [
    "Barcode",
    "Interval",
    "canonicalize",
    "equivalent",
    "from_birth_death",
    "pad",
    "CoordinateSpec",
    "OrbitSpec",
    "RationalE",
    "Sigma",
    "SumLengths",
    "SumMaxGap",
    "SumMinXmd",
    "e_eval",
    "featurize",
    "find_separating",
    "mnist_features",
    "sigma_eval",
    "bottleneck",
    "bottleneck_oracle",
    "diag_dist",
    "interval_dist",
    "wasserstein",
    "wasserstein_oracle",
    "BinaryImage",
    "GrayImage",
    "SweepDirection",
    "connected_component_count",
    "persistent_homology",
    "sweep_filtration",
    "threshold",
    "parse_tropical",
    "to_rational_normal_form",
    "to_text",
    "trop_eval",
    "__version__",
]
