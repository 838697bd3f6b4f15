"""Tate-Shafarevich groups of multinorm-one tori over global fields.

Two independent computation routes for the obstruction groups attached to a
product of cyclic p-power extensions: an exhaustive combinatorial sweep and a
closed-form assembly from patching degrees and degrees of freedom.  The CLI
cross-checks them.
"""

from .abelian import (
    BudgetExceeded,
    Character,
    PGroup,
    Subgroup,
    annihilator,
    cyclic_subgroups,
    image_is_cyclic,
    intersect,
    join,
    quotient_invariants,
    subgroup_from_generators,
)
from .fields import (
    FieldConfig,
    IntersectionNotBase,
    NonSeparatingAmbient,
    NonSurjectiveCharacter,
    NormalizedConfig,
    ShaInputError,
    TooFewFields,
    validate_and_normalize,
)
from .places import LocalData, Place, locally_cyclic, noncyclic_places
from .oracle import (
    Classification,
    ShaReport,
    aprime,
    classify,
    compute_G_and_Gomega,
    delta,
    i_n,
    omega_contains,
    quotient_by_D,
    sigma_contains,
    varpi_r,
)
from .structure import (
    StructureResult,
    assemble,
    criterion_trivial,
    shortcut_bicyclic_subfields,
    shortcut_linearly_disjoint,
)
from .kummer import KummerSpec, build_kummer, is_fourth_power_local

__all__ = [name for name in dir() if not name.startswith("_")]
