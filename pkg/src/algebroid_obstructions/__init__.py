"""Integrability obstructions for transitive Lie algebroids over the 2-sphere.

Computes the Mackenzie class pairing, the Crainic-Fernandes monodromy and the
Meinrenken clutching value, and checks that they agree up to the expected
inversion.
"""
from .lie_core import (
    CIRCLE,
    REALS,
    SO3_MODEL,
    SU2_MODEL,
    CenterElement,
    GroupModel,
    NotCentral,
    OutOfInjectivityRadius,
    Real,
    Sign,
    Trivial,
    covering_lift,
    covering_project,
    identify_center,
)
from .geometry import (
    PolarCover,
    SquareMap,
    TetraCover,
    TwoForm,
    OneFormField,
    area_form,
    bump_form,
    degree_map,
    local_primitive,
    surface_integral,
    unit_square_map,
)
from .maurer_cartan import (
    NotFlat,
    PathSample,
    integrate_along_path,
    loop_monodromy,
    mc_residual,
    quasiperiodic_solve,
)
from .cech import coboundary, fundamental_pairing, is_cocycle
from .obstructions import (
    DEFAULT_SIGNS,
    GluedSpec,
    ObstructionReport,
    PrequantizationSpec,
    SignConventions,
    TransitionDataSpec,
    cf_monodromy_prequantization,
    cf_monodromy_trivial,
    clutching_value,
    mackenzie_pairing,
    pullback_spec,
    so3_clutching_spec,
    verify_theorem1,
)

__version__ = "0.1.0"
