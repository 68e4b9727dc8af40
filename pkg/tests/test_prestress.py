from dataclasses import replace

import numpy as np
import pytest

from tcfsim import AnchorModel, DesignParams, Material, build_frame_layout, prestress_state
from tcfsim.fem import FrameBuilder
from tcfsim.layout import COMP_LEFT, COMP_RIGHT, RESONATOR
from tcfsim.materials import BeamSpec, material_at_temperature
from tcfsim import oracles


def resonator_force(model, state):
    n = state.axial_forces[model.member_elements(RESONATOR)]
    assert np.ptp(n) <= 1e-9 * np.abs(n).max()
    return n.mean()


def test_reference_temperature_is_stress_free(frame, silicon):
    st = prestress_state(frame, silicon, silicon.t_ref)
    assert np.abs(st.axial_forces).max() <= 1e-15


def test_clamped_bar_at_80c(silicon):
    b = FrameBuilder()
    a, c = b.node(0, 0), b.node(0, 560e-6)
    b.member(RESONATOR, a, c, BeamSpec(560e-6, 2e-6, 20e-6), 8)
    b.anchor(a)
    b.anchor(c)
    st = prestress_state(b.build(), silicon, 80.0)
    # -E(80) A cte 55, evaluated independently
    assert st.axial_forces == pytest.approx(np.full(8, -8.497337369136e-4), rel=1e-10)


def test_two_spring_mismatch_oracle(silicon):
    # stiff truss so that its bending compliance is a small series term
    d = DesignParams(truss_width=30e-6)
    T = 80.0
    E, _ = material_at_temperature(silicon, T)
    N = {}
    for l1 in (540e-6, d.l2):
        m = build_frame_layout(replace(d, l1=l1), silicon, 16)
        N[l1] = resonator_force(m, prestress_state(m, silicon, T))
    k_res = E * d.w_res * d.thickness / d.l2
    k_comp = E * (1 - d.comp_porosity) ** 3 * d.w_comp * d.thickness / 540e-6
    k_truss = 192 * E * d.thickness * d.truss_width**3 / 12 / d.truss_length**3
    mismatch = silicon.cte * (T - silicon.t_ref) * (d.l2 - 540e-6)
    expected = oracles.series_mismatch_force(mismatch, k_res, 2 * k_comp, k_truss)
    assert N[540e-6] - N[d.l2] == pytest.approx(expected, rel=0.03)
    assert N[540e-6] < 0


def test_linear_in_temperature_rise():
    # fixed modulus isolates the linear thermal problem
    mat = Material(tce=0.0)
    m = build_frame_layout(DesignParams(), mat, 8)
    n1 = prestress_state(m, mat, mat.t_ref + 20).axial_forces
    n2 = prestress_state(m, mat, mat.t_ref + 40).axial_forces
    assert n2 == pytest.approx(2 * n1, rel=1e-9, abs=1e-9 * np.abs(n1).max())


def test_equal_lengths_reduce_resonator_force(silicon):
    forces = {}
    for ratio in (1.0, 0.946):
        m = build_frame_layout(DesignParams().with_ratio(ratio), silicon, 16)
        forces[ratio] = resonator_force(m, prestress_state(m, silicon, 80.0))
    assert abs(forces[1.0]) < abs(forces[0.946])


@pytest.mark.parametrize("anchors", [AnchorModel.rigid(), AnchorModel.substrate(2.6e-6)])
def test_compensating_beams_share_load(frame, silicon, anchors):
    st = prestress_state(frame, silicon, -40.0, anchors)
    left = st.axial_forces[frame.member_elements(COMP_LEFT)]
    right = st.axial_forces[frame.member_elements(COMP_RIGHT)]
    assert left == pytest.approx(right, rel=1e-9)
    assert st.residual <= 1e-10


def test_substrate_expansion_flips_sign(silicon):
    m = build_frame_layout(DesignParams().with_ratio(0.9), silicon, 16)
    rigid = resonator_force(m, prestress_state(m, silicon, 80.0))
    fast = resonator_force(m, prestress_state(m, silicon, 80.0, AnchorModel.substrate(2.6e-6)))
    assert rigid < 0 < fast
