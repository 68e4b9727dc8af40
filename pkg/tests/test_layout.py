import numpy as np
import pytest

from tcfsim import DesignParams, build_frame_layout
from tcfsim.errors import ConfigurationError
from tcfsim.layout import COMP_LEFT, COMP_RIGHT, RESONATOR, TRUSS


def test_default_layout_counts(frame):
    # 4 members x 16 elements; shared end nodes give 4n + 1 nodes
    assert len(frame.elements) == 64
    assert len(frame.nodes) == 65
    assert len(frame.anchors) == 3
    assert len(frame.fixed_dofs) == 9
    members = {e.member for e in frame.elements}
    assert members == {RESONATOR, TRUSS, COMP_LEFT, COMP_RIGHT}
    for m in members:
        assert len(frame.member_elements(m)) == 16


def test_geometry_of_default_layout(frame, design):
    res = frame.member_nodes(RESONATOR)
    ys = frame.nodes[res, 1]
    assert np.allclose(frame.nodes[res, 0], 0.0)
    assert ys.min() == 0.0 and ys.max() == pytest.approx(design.l2)
    anchors = frame.nodes[list(frame.anchors)]
    expected = [(-50e-6, 20e-6), (0.0, 0.0), (50e-6, 20e-6)]
    assert np.allclose(sorted(map(tuple, anchors)), expected, rtol=0, atol=1e-15)
    truss = frame.nodes[frame.member_nodes(TRUSS)]
    assert np.allclose(truss[:, 1], design.l2)
    assert truss[:, 0].min() == pytest.approx(-50e-6)


def test_equal_lengths_put_all_anchors_on_baseline(silicon):
    m = build_frame_layout(DesignParams(l1=560e-6), silicon, 8)
    assert np.allclose(m.nodes[list(m.anchors), 1], 0.0)


def test_mirror_symmetry(frame):
    coords = {tuple(np.round(xy, 15)) for xy in frame.nodes}
    for x, y in frame.nodes:
        if x != 0:
            assert (round(-x, 15), round(y, 15)) in coords
    fixed_nodes = sorted({d // 3 for d in frame.fixed_dofs})
    xs = sorted(frame.nodes[fixed_nodes, 0])
    assert xs == pytest.approx([-x for x in reversed(xs)])
    left = [e.spec for e in frame.elements if e.member == COMP_LEFT]
    right = [e.spec for e in frame.elements if e.member == COMP_RIGHT]
    assert left == right


def test_lumped_wing_masses_placed_at_truss_ends(silicon):
    m = build_frame_layout(DesignParams(wing_mass=1e-9, wing_inertia=1e-20), silicon, 8)
    pts = sorted(tuple(m.nodes[lm.node]) for lm in m.lumped_masses)
    assert pts == pytest.approx([(-50e-6, 560e-6), (50e-6, 560e-6)])


def test_total_mass(silicon):
    d = DesignParams(wing_mass=2e-10)
    m = build_frame_layout(d, silicon, 16)
    rho = silicon.rho
    t = d.thickness
    expected = (
        rho * d.w_res * t * d.l2
        + rho * d.truss_width * t * d.truss_length
        + 2 * rho * (1 - d.comp_porosity) * d.w_comp * t * d.l1
        + 2 * d.wing_mass
    )
    assert m.structural_mass() == pytest.approx(expected, rel=1e-12)


@pytest.mark.parametrize("n", [2, 3, 5, 4.5])
def test_bad_mesh_rejected(design, silicon, n):
    with pytest.raises(ConfigurationError):
        build_frame_layout(design, silicon, n)
