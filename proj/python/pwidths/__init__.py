"""Widths of the round sphere: exact tables, sweepouts, phase transitions, scattering, geodesic nets.

Every ``run``-style function returns the same JSON document as the matching CLI subcommand,
with ``passed`` and ``failures`` describing its built-in assertions.
"""

from ._core import (
    PwidthsError,
    __version__,
    crofton,
    ellipsoid_tune,
    glue,
    h0,
    isqrt,
    kink_transmission,
    minmax1,
    nets,
    principal_geodesic_lengths,
    principal_lengths_jacobian,
    quantize,
    scatter,
    solve_axisymmetric,
    weyl_constant,
    widths_table,
)

__all__ = [
    "PwidthsError",
    "__version__",
    "crofton",
    "ellipsoid_tune",
    "glue",
    "h0",
    "isqrt",
    "kink_transmission",
    "minmax1",
    "nets",
    "principal_geodesic_lengths",
    "principal_lengths_jacobian",
    "quantize",
    "scatter",
    "solve_axisymmetric",
    "weyl_constant",
    "widths_table",
]
