"""Prestressed frame model of a self-temperature-compensated MEMS resonator."""

from .analysis import (
    OptimizeResult,
    SweepResult,
    TcfReport,
    classify_resonator_mode,
    design_tcf,
    frequency_at_temperature,
    modal_analysis,
    model_tcf,
    optimize_ratio,
    ratio_evaluator,
    ratio_sweep,
    tcf_from_points,
    tcf_linear_fit,
)
from .eigen import ModalResult, generalized_modes
from .errors import TcfsimError
from .fem import FrameModel, assemble, static_solve
from .layout import build_clamped_beam, build_frame_layout
from .materials import (
    SILICON,
    AnchorModel,
    BeamSpec,
    DesignParams,
    Material,
    effective_perforated_properties,
    material_at_temperature,
)
from .prestress import PrestressState, prestress_state

__version__ = "0.1.0"
