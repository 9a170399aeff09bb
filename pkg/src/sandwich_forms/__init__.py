"""Dirichlet forms on finite node sets, their active main parts, and the
forms sandwiched between the two."""
from .capacity import capacity, capacity_projected_gradient, equilibrium_potential, is_polar
from .core import (
    GraphForm,
    MeasureSpace,
    QuadForm,
    diagonal_form,
    evaluate,
    form_from_graph,
    form_norm,
    graph_from_form,
    is_markovian,
    killing_weights,
    same_form,
)
from .decomposition import active_main_part, killing_part, part_form, part_monotonicity_check
from .domination import (
    DominationReport,
    dominates,
    dominates_form,
    dominates_semigroup,
    ouhabaz_equivalence_test,
    semigroup,
    semigroups,
    spectrum,
)
from .errors import *  # noqa: F401,F403
from .measure_rep import (
    equivalence_suite,
    from_indicator_values,
    is_local,
    is_monotone,
    is_positive,
    representing_measure,
)
from .models import fractional_form, grid2d_laplacian, interval_laplacian, path_graph
from .sandwich import (
    AdmissiblePair,
    SandwichVerdict,
    enumerate_sandwiched,
    killing_mode_check,
    pair_dominates,
    recover_pair,
    restricted_form,
    sandwich_check,
)

__version__ = "0.1.0"
