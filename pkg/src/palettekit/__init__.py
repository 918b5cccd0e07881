"""Palettes, paintings of 3-graphs, palette Lagrangians and related finite machinery."""

from .core import (
    BudgetExceeded,
    DegenerateInputError,
    Equipartition,
    Painting,
    Palette,
    ParseError,
    ThreeGraph,
    WeightVector,
    blow_up,
    canonical_form,
    density,
    format_graph,
    format_palette,
    induced,
    parse_graph,
    parse_palette,
    reverse,
    shadow,
)
from .hom import blowup_containment, dominates, embedding_exists, find_homomorphism, is_isomorphic
from .lagrangian import grid_oracle, is_reduced, lambda_eval, lambda_grad, maximize_lagrangian
from .painting import count_paintings, find_painting, is_deficient, is_family_deficient, paints, shadow_linear

__version__ = "0.1.0"
