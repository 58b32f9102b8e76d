"""nestkit: construct, verify, search for, and certify nestings of block designs."""

from nestkit.core import (
    BaseBlock,
    BaseBlockSystem,
    Design,
    DesignParams,
    Nesting,
    NestingError,
    NewPoint,
    PairCountTable,
    PointUniverse,
    Resolution,
    ResolutionClass,
    as_block,
    augment,
    develop,
    pair_counts,
)

__version__ = "0.1.0"
