"""Optimal information foraging: diet and platform choice models, lexical
measures of text samples, trend statistics and synthetic simulations."""

__version__ = "0.1.0"

from .foraging import (  # noqa: E402
    DietSolution,
    ExponentialSaturating,
    InfoItem,
    PatchType,
    PlatformParams,
    PowerDiminishing,
    ResidenceSolution,
    diet_rate,
    generalized_rate,
    holling_rate,
    merge_platform,
    min_item_size,
    mvt_solve,
    optimal_diet,
    patches_as_prey,
    platform_included,
    rate_gradient_wrt_prevalence,
)
from .lexical import (  # noqa: E402
    LexicalMeasuresTransformer,
    TextSample,
    clean_and_tokenize,
    truncate_last,
    type_token_ratio,
    word_entropy,
    zipf_exponent,
)
