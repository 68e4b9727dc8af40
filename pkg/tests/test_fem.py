import numpy as np
import pytest
import scipy.linalg

from tcfsim import SILICON, BeamSpec, Material, assemble, build_clamped_beam, static_solve
from tcfsim.errors import MechanismError, ModelError
from tcfsim.fem import (
    Element,
    FrameBuilder,
    critical_axial_force,
    element_geometric_stiffness,
    element_matrices,
    expand,
    recover_axial_forces,
    thermal_equivalent_loads,
)
from tcfsim import oracles

UNIT = Material(e_ref=1.0, rho=1.0, tce=0.0, cte=1.0)


def skew_element(spec=None):
    spec = spec or BeamSpec(1e-4, 2e-6, 2e-5)
    return Element((0, 1), ((1e-5, 2e-5), (7e-5, 1e-4)), spec)


class TestElementMatrices:
    def test_symmetric(self):
        k, m = element_matrices(skew_element())
        assert np.array_equal(k, k.T)
        assert np.array_equal(m, m.T)

    def test_rigid_body_nullspace(self):
        e = skew_element()
        k, _ = element_matrices(e)
        (x1, y1), (x2, y2) = e.xy
        modes = [
            np.array([1, 0, 0, 1, 0, 0.0]),
            np.array([0, 1, 0, 0, 1, 0.0]),
            np.array([-y1, x1, 1, -y2, x2, 1.0]),
        ]
        for r in modes:
            assert np.linalg.norm(k @ r) <= 1e-9 * np.linalg.norm(k) * np.linalg.norm(r)

    def test_unit_axial_stiffness(self):
        e = Element((0, 1), ((0, 0), (1, 0)), BeamSpec(1.0, 1.0, 1.0, material=UNIT))
        k, _ = element_matrices(e)
        assert k[0, 0] == pytest.approx(1.0)
        assert k[0, 3] == pytest.approx(-1.0)

    def test_mass_sums_to_element_mass(self):
        e = skew_element()
        _, m = element_matrices(e)
        ux = np.array([1, 0, 0, 1, 0, 0.0])
        mass = SILICON.rho * e.spec.area * e.length
        assert ux @ m @ ux == pytest.approx(mass, rel=1e-12)

    def test_zero_length_rejected(self):
        e = Element((0, 1), ((0, 0), (0, 0)), BeamSpec(1.0, 1.0, 1.0))
        with pytest.raises(ModelError):
            element_matrices(e)


class TestGeometricStiffness:
    def test_zero_force(self):
        assert not element_geometric_stiffness(skew_element(), 0.0).any()

    def test_linear_in_force(self):
        e = skew_element()
        assert np.allclose(element_geometric_stiffness(e, 2e-5), 2 * element_geometric_stiffness(e, 1e-5),
                           rtol=1e-14, atol=0)

    def test_buckling_load_of_clamped_beam(self, cc_model, beam):
        n_cr = critical_axial_force(cc_model)
        assert n_cr == pytest.approx(oracles.euler_critical_load(beam.material.e_ref, beam.inertia, beam.length),
                                     rel=0.01)


class TestAssemble:
    def test_zero_prestress_gives_zero_geometric_matrix(self, frame):
        assert not assemble(frame).K_G.any()

    def test_symmetry_and_positive_mass(self, frame):
        N = np.linspace(-1e-5, 1e-5, len(frame.elements))
        s = assemble(frame, None, N)
        for A in (s.K, s.M, s.K_G):
            assert np.abs(A - A.T).max() <= 1e-12 * np.abs(A).max()
        assert np.linalg.eigvalsh(s.M).min() > 0

    def test_unconstrained_has_three_rigid_modes(self, frame):
        free = type(frame)(frame.nodes, frame.elements, ())
        K = assemble(free).K
        d = 1 / np.sqrt(np.diag(K))
        lam = np.linalg.eigvalsh(K * d[:, None] * d[None, :])
        assert np.sum(np.abs(lam) <= 1e-8 * lam.max()) == 3

    def test_lumped_mass_locality(self, silicon):
        from tcfsim import DesignParams, build_frame_layout

        a = build_frame_layout(DesignParams(wing_mass=1e-10, wing_inertia=1e-21), silicon, 8)
        b = build_frame_layout(DesignParams(wing_mass=2e-10, wing_inertia=2e-21), silicon, 8)
        diff = assemble(b).M - assemble(a).M
        rows, cols = np.nonzero(diff)
        assert np.array_equal(rows, cols)
        assert len(rows) == 6

    def test_missing_state_rejected(self, frame):
        with pytest.raises(ModelError):
            assemble(frame, N=np.zeros(3))


def cantilever(n, length=560e-6):
    b = FrameBuilder()
    root, tip = b.node(0, 0), b.node(length, 0)
    chain = b.member("resonator", root, tip, BeamSpec(length, 2e-6, 20e-6), n)
    b.anchor(root)
    return b.build(), chain


class TestStaticSolve:
    def test_zero_load(self):
        assert not static_solve(np.eye(3), np.zeros(3)).any()

    def test_one_dof(self):
        assert static_solve(np.array([[2.0]]), np.array([4.0])) == pytest.approx([2.0])

    def test_cantilever_tip_load(self):
        model, chain = cantilever(16)
        s = assemble(model)
        f = np.zeros(model.n_dof)
        f[3 * chain[-1] + 1] = 1e-6
        u = expand(model, static_solve(s.K, f[s.dof_map]))
        # F L^3 / 3 E I evaluated independently
        assert u[3 * chain[-1] + 1] == pytest.approx(2.7269565217391302e-05, rel=1e-6)

    def test_refinement_reduces_error(self):
        # nodal-lumped uniform load, so the Hermite solution is not nodally exact
        q, L = 1e-3, 560e-6
        I = 20e-6 * 2e-6**3 / 12
        exact = q * L**4 / (8 * SILICON.e_ref * I)
        errs = []
        for n in (4, 8, 16):
            model, chain = cantilever(n, L)
            s = assemble(model)
            f = np.zeros(model.n_dof)
            h = L / n
            for i, node in enumerate(chain[1:], 1):
                f[3 * node + 1] = q * h * (0.5 if i == n else 1.0)
            u = expand(model, static_solve(s.K, f[s.dof_map]))
            errs.append(abs(u[3 * chain[-1] + 1] - exact))
        assert errs[0] > errs[1] > errs[2]

    def test_mechanism_detected(self, frame):
        free = type(frame)(frame.nodes, frame.elements, ())
        K = assemble(free).K
        with pytest.raises(MechanismError):
            static_solve(K, np.ones(K.shape[0]))

    def test_residual_bound_on_frame(self, frame):
        s = assemble(frame)
        # forces in N, moments in N*m with element-length lever arms
        f = np.random.default_rng(3).normal(size=frame.n_dof) * 1e-6
        f[2::3] *= 35e-6
        f = f[s.dof_map]
        u = static_solve(s.K, f)
        assert np.linalg.norm(s.K @ u - f) <= 1e-10 * np.linalg.norm(f)


def clamped_bar(release=False):
    b = FrameBuilder()
    a, c = b.node(0, 0), b.node(1e-4, 0)
    b.member("resonator", a, c, BeamSpec(1e-4, 2e-6, 20e-6), 4)
    b.anchor(a)
    if release:
        b.fix(c, (1, 2))
    else:
        b.anchor(c)
    return b.build()


class TestThermal:
    def test_no_heating_no_load(self, frame):
        f, u_c = thermal_equivalent_loads(frame, 0.0, {n: (0.0, 0.0) for n in frame.anchors})
        assert not f.any() and not u_c.any()

    def test_clamped_bar_compression(self):
        m = clamped_bar()
        f, u_c = thermal_equivalent_loads(m, 55.0)
        s = assemble(m)
        u = expand(m, static_solve(s.K, f), u_c) if f.size else u_c
        N = recover_axial_forces(m, u, 55.0)
        expected = oracles.constrained_bar_force(1.61e11, 4e-11, 2.4e-6, 55.0)
        assert N == pytest.approx(np.full(4, expected), rel=1e-10)
        assert expected == pytest.approx(-0.00085008, rel=1e-12)

    def test_free_bar_stress_free(self):
        m = clamped_bar(release=True)
        f, u_c = thermal_equivalent_loads(m, 55.0)
        s = assemble(m)
        u = expand(m, static_solve(s.K, f), u_c)
        N = recover_axial_forces(m, u, 55.0)
        assert np.abs(N).max() <= 1e-12 * 0.00085

    def test_prescribed_anchor_stretch(self):
        m = clamped_bar()
        f, u_c = thermal_equivalent_loads(m, 0.0, {m.anchors[1]: (1e-9, 0.0)})
        s = assemble(m)
        u = expand(m, static_solve(s.K, f), u_c)
        N = recover_axial_forces(m, u, 0.0)
        assert N == pytest.approx(np.full(4, 1.61e11 * 4e-11 * 1e-9 / 1e-4), rel=1e-10)

    def test_symmetric_load_gives_mirrored_displacements(self, frame):
        f, u_c = thermal_equivalent_loads(frame, 30.0)
        s = assemble(frame)
        u = expand(frame, static_solve(s.K, f), u_c)
        lookup = {tuple(np.round(xy * 1e9)): i for i, xy in enumerate(frame.nodes)}
        norm = np.linalg.norm(u)
        for i, (x, y) in enumerate(frame.nodes):
            j = lookup[tuple(np.round(np.array([-x, y]) * 1e9))]
            assert abs(u[3 * i] + u[3 * j]) <= 1e-9 * norm
            assert abs(u[3 * i + 1] - u[3 * j + 1]) <= 1e-9 * norm
