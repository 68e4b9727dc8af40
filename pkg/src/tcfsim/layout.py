"""Frame layouts: the compensated resonator and test fixtures."""

from __future__ import annotations

import math

from .errors import ConfigurationError
from .fem import FrameBuilder, FrameModel
from .materials import BeamSpec, DesignParams, Material

RESONATOR = "resonator"
TRUSS = "truss"
COMP_LEFT = "comp_left"
COMP_RIGHT = "comp_right"

MIN_ELEMENTS = 4


def _check_mesh(elements_per_beam):
    if int(elements_per_beam) != elements_per_beam or elements_per_beam < MIN_ELEMENTS:
        raise ConfigurationError(
            f"elements_per_beam must be an integer >= {MIN_ELEMENTS}, got {elements_per_beam}"
        )
    return int(elements_per_beam)


def build_frame_layout(d: DesignParams, mat: Material, elements_per_beam: int = 16) -> FrameModel:
    """Build the in-plane frame of the self-compensated resonator.

    The resonator runs from its anchor at the origin up to the midpoint of a
    horizontal truss at ``y = l2``.  Two compensating beams hang from the
    truss ends down to anchors at ``y = l2 - l1``.  Wings are lumped at the
    truss ends.  The truss must have an even element count so that its
    midpoint is a node.
    """
    n = _check_mesh(elements_per_beam)
    if n % 2:
        raise ConfigurationError(f"elements_per_beam must be even, got {n}")
    for name in ("l1", "l2", "truss_length", "truss_width", "w_res", "w_comp", "thickness"):
        v = getattr(d, name)
        if not (math.isfinite(v) and v > 0):
            raise ConfigurationError(f"{name} must be finite and > 0, got {v}")

    res = BeamSpec(d.l2, d.w_res, d.thickness, 0.0, mat)
    truss_half = BeamSpec(d.truss_length / 2, d.truss_width, d.thickness, 0.0, mat)
    comp = BeamSpec(d.l1, d.w_comp, d.thickness, d.comp_porosity, mat, d.porosity_exponent)

    half = d.truss_length / 2
    y_comp = d.l2 - d.l1
    b = FrameBuilder()
    a_res = b.node(0.0, 0.0)
    top = b.node(0.0, d.l2)
    left = b.node(-half, d.l2)
    right = b.node(half, d.l2)
    a_left = b.node(-half, y_comp)
    a_right = b.node(half, y_comp)

    b.member(RESONATOR, a_res, top, res, n)
    b.member(TRUSS, left, top, truss_half, n // 2)
    b.member(TRUSS, top, right, truss_half, n // 2)
    b.member(COMP_LEFT, a_left, left, comp, n)
    b.member(COMP_RIGHT, a_right, right, comp, n)

    for node in (a_res, a_left, a_right):
        b.anchor(node)
    b.mass(left, d.wing_mass, d.wing_inertia)
    b.mass(right, d.wing_mass, d.wing_inertia)
    return b.build()


def build_clamped_beam(
    beam: BeamSpec, elements_per_beam: int = 16, axial_release: bool = False
) -> FrameModel:
    """Isolated clamped-clamped beam along +y, tagged as the resonator.

    With ``axial_release`` the top end may slide along the beam axis, so
    thermal expansion is unconstrained and no prestress builds up.
    """
    n = _check_mesh(elements_per_beam)
    b = FrameBuilder()
    bottom = b.node(0.0, 0.0)
    top = b.node(0.0, beam.length)
    b.member(RESONATOR, bottom, top, beam, n)
    b.anchor(bottom)
    if axial_release:
        b.fix(top, (0, 2))
    else:
        b.anchor(top)
    return b.build()


def resonator_beam(d: DesignParams, mat: Material) -> BeamSpec:
    return BeamSpec(d.l2, d.w_res, d.thickness, 0.0, mat)
