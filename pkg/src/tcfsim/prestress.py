"""Static thermal stress state of the frame at a uniform temperature."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .fem import FrameModel, assemble, expand, recover_axial_forces, static_solve, thermal_equivalent_loads
from .materials import AnchorModel, Material, material_at_temperature


@dataclass(frozen=True)
class PrestressState:
    temperature: float
    axial_forces: np.ndarray  # N per element, tension positive
    displacements: np.ndarray  # full-length nodal vector
    modulus: np.ndarray  # base E(T) per element
    residual: float  # ||K u - f|| / ||f|| of the static solve (0 if f = 0)


def prestress_state(
    model: FrameModel, mat: Material, T: float, anchor_model: AnchorModel | None = None
) -> PrestressState:
    """Axial forces from uniform heating to ``T`` with the given anchor motion."""
    anchor_model = anchor_model or AnchorModel.rigid()
    E_T, _ = material_at_temperature(mat, T)
    n_el = len(model.elements)
    E = np.full(n_el, E_T)
    dT = np.full(n_el, T - mat.t_ref)
    anchor_disp = {
        node: anchor_model.displacement(model.nodes[node], T, mat.t_ref) for node in model.anchors
    }
    f, u_c = thermal_equivalent_loads(model, dT, anchor_disp, E)
    sysm = assemble(model, E)
    u_free = static_solve(sysm.K, f)
    fn = np.linalg.norm(f)
    residual = float(np.linalg.norm(sysm.K @ u_free - f) / fn) if fn > 0 else 0.0
    u = expand(model, u_free, u_c)
    N = recover_axial_forces(model, u, dT, E)
    return PrestressState(float(T), N, u, E, residual)
