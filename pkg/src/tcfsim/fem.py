"""Planar Euler-Bernoulli frame: element matrices, assembly and static solves.

Every node carries three DOFs ``(u_x, u_y, theta)``; global DOF ``3*i + k``.
Axial forces are tension positive throughout.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
import scipy.linalg

from .errors import MechanismError, ModelError, NumericalError
from .materials import BeamSpec

DOF_PER_NODE = 3
STATIC_RTOL = 1e-10


@dataclass(frozen=True)
class Element:
    nodes: tuple[int, int]
    xy: tuple[tuple[float, float], tuple[float, float]]
    spec: BeamSpec
    member: str = ""

    @property
    def length(self) -> float:
        (x1, y1), (x2, y2) = self.xy
        return math.hypot(x2 - x1, y2 - y1)

    @property
    def direction(self) -> tuple[float, float]:
        (x1, y1), (x2, y2) = self.xy
        L = self.length
        if not L > 0:
            raise ModelError(f"element {self.nodes} has zero length")
        return (x2 - x1) / L, (y2 - y1) / L

    def dofs(self) -> np.ndarray:
        i, j = self.nodes
        return np.array([3 * i, 3 * i + 1, 3 * i + 2, 3 * j, 3 * j + 1, 3 * j + 2])


@dataclass(frozen=True)
class LumpedMass:
    node: int
    mass: float
    inertia: float = 0.0


@dataclass(frozen=True)
class FrameModel:
    """Nodes, elements, fixed DOFs and lumped masses of a planar frame."""

    nodes: np.ndarray
    elements: tuple[Element, ...]
    fixed_dofs: tuple[int, ...]
    lumped_masses: tuple[LumpedMass, ...] = ()
    anchors: tuple[int, ...] = ()

    def __post_init__(self):
        n = len(self.nodes)
        for e in self.elements:
            if not all(0 <= k < n for k in e.nodes):
                raise ModelError(f"element {e.nodes} references a missing node")
            if not e.length > 0:
                raise ModelError(f"element {e.nodes} has zero length")
        for lm in self.lumped_masses:
            if not 0 <= lm.node < n:
                raise ModelError(f"lumped mass at missing node {lm.node}")

    @property
    def n_dof(self) -> int:
        return DOF_PER_NODE * len(self.nodes)

    @property
    def free_dofs(self) -> np.ndarray:
        mask = np.ones(self.n_dof, dtype=bool)
        mask[list(self.fixed_dofs)] = False
        return np.flatnonzero(mask)

    def member_elements(self, member: str) -> list[int]:
        return [i for i, e in enumerate(self.elements) if e.member == member]

    def member_nodes(self, member: str) -> list[int]:
        nodes = {k for i in self.member_elements(member) for k in self.elements[i].nodes}
        return sorted(nodes)

    def structural_mass(self) -> float:
        total = 0.0
        for e in self.elements:
            _, rho_eff = e.spec.effective(e.spec.material.e_ref)
            total += rho_eff * e.spec.area * e.length
        return total + sum(lm.mass for lm in self.lumped_masses)


class FrameBuilder:
    """Incremental construction of a :class:`FrameModel`."""

    def __init__(self):
        self._nodes: list[tuple[float, float]] = []
        self._elements: list[Element] = []
        self._fixed: set[int] = set()
        self._masses: list[LumpedMass] = []
        self._anchors: list[int] = []

    def node(self, x: float, y: float) -> int:
        if not (math.isfinite(x) and math.isfinite(y)):
            raise ModelError(f"non-finite node coordinates ({x}, {y})")
        self._nodes.append((float(x), float(y)))
        return len(self._nodes) - 1

    def member(self, name, start, end, spec, n_el) -> list[int]:
        """Subdivide a straight member between two existing nodes.

        Returns the node indices along the member, ``start`` first.
        """
        x0, y0 = self._nodes[start]
        x1, y1 = self._nodes[end]
        chain = [start]
        for k in range(1, n_el):
            s = k / n_el
            chain.append(self.node(x0 + s * (x1 - x0), y0 + s * (y1 - y0)))
        chain.append(end)
        for a, b in zip(chain[:-1], chain[1:]):
            self._elements.append(Element((a, b), (self._nodes[a], self._nodes[b]), spec, name))
        return chain

    def fix(self, node: int, dofs=(0, 1, 2)):
        self._fixed.update(3 * node + k for k in dofs)

    def anchor(self, node: int):
        self.fix(node)
        self._anchors.append(node)

    def mass(self, node: int, m: float, inertia: float = 0.0):
        if m or inertia:
            self._masses.append(LumpedMass(node, m, inertia))

    def build(self) -> FrameModel:
        return FrameModel(
            nodes=np.array(self._nodes, dtype=float),
            elements=tuple(self._elements),
            fixed_dofs=tuple(sorted(self._fixed)),
            lumped_masses=tuple(self._masses),
            anchors=tuple(self._anchors),
        )


def _rotation(e: Element) -> np.ndarray:
    c, s = e.direction
    r = np.array([[c, s, 0.0], [-s, c, 0.0], [0.0, 0.0, 1.0]])
    T = np.zeros((6, 6))
    T[:3, :3] = r
    T[3:, 3:] = r
    return T


def element_matrices(e: Element, E: float | None = None) -> tuple[np.ndarray, np.ndarray]:
    """Global-axis stiffness and consistent mass of one frame element.

    ``E`` is the unperforated modulus at the current temperature; it
    defaults to the reference modulus of the element material.
    """
    if E is None:
        E = e.spec.material.e_ref
    L = e.length
    if not L > 0:
        raise ModelError(f"element {e.nodes} has zero length")
    E_eff, rho_eff = e.spec.effective(E)
    A, I = e.spec.area, e.spec.inertia
    a = E_eff * A / L
    b = E_eff * I / L**3
    k = np.array(
        [
            [a, 0, 0, -a, 0, 0],
            [0, 12 * b, 6 * b * L, 0, -12 * b, 6 * b * L],
            [0, 6 * b * L, 4 * b * L**2, 0, -6 * b * L, 2 * b * L**2],
            [-a, 0, 0, a, 0, 0],
            [0, -12 * b, -6 * b * L, 0, 12 * b, -6 * b * L],
            [0, 6 * b * L, 2 * b * L**2, 0, -6 * b * L, 4 * b * L**2],
        ]
    )
    mu = rho_eff * A * L
    m = np.zeros((6, 6))
    m[np.ix_([0, 3], [0, 3])] = mu / 6.0 * np.array([[2.0, 1.0], [1.0, 2.0]])
    bend = [1, 2, 4, 5]
    m[np.ix_(bend, bend)] = mu / 420.0 * np.array(
        [
            [156, 22 * L, 54, -13 * L],
            [22 * L, 4 * L**2, 13 * L, -3 * L**2],
            [54, 13 * L, 156, -22 * L],
            [-13 * L, -3 * L**2, -22 * L, 4 * L**2],
        ]
    )
    T = _rotation(e)
    k, m = T.T @ k @ T, T.T @ m @ T
    return 0.5 * (k + k.T), 0.5 * (m + m.T)


def element_geometric_stiffness(e: Element, N: float) -> np.ndarray:
    """Consistent geometric stiffness of the element under axial force ``N``."""
    if not math.isfinite(N):
        raise ModelError(f"non-finite axial force {N!r}")
    L = e.length
    g = np.zeros((6, 6))
    bend = [1, 2, 4, 5]
    g[np.ix_(bend, bend)] = (N / (30.0 * L)) * np.array(
        [
            [36, 3 * L, -36, 3 * L],
            [3 * L, 4 * L**2, -3 * L, -(L**2)],
            [-36, -3 * L, 36, -3 * L],
            [3 * L, -(L**2), -3 * L, 4 * L**2],
        ]
    )
    T = _rotation(e)
    g = T.T @ g @ T
    return 0.5 * (g + g.T)


@dataclass
class SystemMatrices:
    """Global matrices restricted to the free DOFs listed in ``dof_map``."""

    K: np.ndarray
    M: np.ndarray
    K_G: np.ndarray
    dof_map: np.ndarray
    K_full: np.ndarray = field(repr=False, default=None)

    @property
    def K_total(self) -> np.ndarray:
        return self.K + self.K_G


def _full_matrices(model: FrameModel, E, N, free_dofs=None):
    n = model.n_dof
    K = np.zeros((n, n))
    M = np.zeros((n, n))
    G = np.zeros((n, n))
    for i, e in enumerate(model.elements):
        ke, me = element_matrices(e, E[i])
        idx = e.dofs()
        K[np.ix_(idx, idx)] += ke
        M[np.ix_(idx, idx)] += me
        if N[i] != 0.0:
            G[np.ix_(idx, idx)] += element_geometric_stiffness(e, N[i])
    for lm in model.lumped_masses:
        M[3 * lm.node, 3 * lm.node] += lm.mass
        M[3 * lm.node + 1, 3 * lm.node + 1] += lm.mass
        M[3 * lm.node + 2, 3 * lm.node + 2] += lm.inertia
    return K, M, G


def _state_arrays(model: FrameModel, E=None, N=None):
    n_el = len(model.elements)
    if E is None:
        E = [e.spec.material.e_ref for e in model.elements]
    if N is None:
        N = np.zeros(n_el)
    E = np.asarray(E, dtype=float)
    N = np.asarray(N, dtype=float)
    if E.shape != (n_el,) or N.shape != (n_el,):
        raise ModelError(
            f"element state must cover all {n_el} elements "
            f"(got E{E.shape}, N{N.shape})"
        )
    return E, N


def assemble(model: FrameModel, E=None, N=None) -> SystemMatrices:
    """Assemble K, M and K_G with the fixed DOFs eliminated.

    ``E`` and ``N`` are per-element base modulus and axial force; ``None``
    means reference modulus and zero prestress respectively.
    """
    E, N = _state_arrays(model, E, N)
    K, M, G = _full_matrices(model, E, N)
    free = model.free_dofs
    ix = np.ix_(free, free)
    return SystemMatrices(K[ix], M[ix], G[ix], free, K_full=K)


def _residual(K, u, f):
    # extended precision so refinement is not limited by cancellation in K @ u
    ld = np.longdouble
    return (f.astype(ld) - K.astype(ld) @ u.astype(ld)).astype(float)


def static_solve(K: np.ndarray, f: np.ndarray) -> np.ndarray:
    """Solve ``K u = f`` for a symmetric positive definite ``K``.

    Jacobi scaling plus iterative refinement keeps the relative residual
    below ``STATIC_RTOL`` on the badly scaled micro-scale systems.
    """
    K = np.asarray(K, dtype=float)
    f = np.asarray(f, dtype=float)
    if K.ndim != 2 or K.shape[0] != K.shape[1] or f.shape != (K.shape[0],):
        raise ModelError(f"incompatible shapes K{K.shape}, f{f.shape}")
    fn = np.linalg.norm(f)
    if fn == 0.0:
        return np.zeros_like(f)
    d = np.diag(K)
    if np.any(d <= 0):
        raise MechanismError("mechanism or buckled model: non-positive diagonal stiffness")
    s = 1.0 / np.sqrt(d)
    Ks = K * s[:, None] * s[None, :]
    try:
        factor = scipy.linalg.cho_factor(Ks, check_finite=True)
    except np.linalg.LinAlgError as exc:
        raise MechanismError(f"mechanism or buckled model: {exc}") from None
    u = s * scipy.linalg.cho_solve(factor, s * f)
    for _ in range(4):
        r = _residual(K, u, f)
        if np.linalg.norm(r) <= STATIC_RTOL * fn:
            return u
        u = u + s * scipy.linalg.cho_solve(factor, s * r)
    r = np.linalg.norm(_residual(K, u, f)) / fn
    if not r <= STATIC_RTOL:
        raise NumericalError(f"static residual {r:.3g} exceeds {STATIC_RTOL:g}")
    return u


def thermal_equivalent_loads(model: FrameModel, dT, anchor_disp=None, E=None):
    """Equivalent nodal loads of free thermal expansion and anchor motion.

    Args:
        dT: Temperature rise per element (degC).
        anchor_disp: Mapping node -> (dx, dy) of prescribed anchor
            translations; anchor rotations stay zero.
        E: Per-element base modulus; reference modulus if omitted.

    Returns:
        ``(f_free, u_prescribed)``: load on the free DOFs and the full-length
        vector of prescribed displacements (zero on free DOFs).
    """
    E, _ = _state_arrays(model, E, None)
    dT = np.broadcast_to(np.asarray(dT, dtype=float), (len(model.elements),))
    f = np.zeros(model.n_dof)
    for i, e in enumerate(model.elements):
        if dT[i] == 0.0:
            continue
        E_eff, _ = e.spec.effective(E[i])
        P = E_eff * e.spec.area * e.spec.material.cte * dT[i]
        c, s = e.direction
        f[e.dofs()] += P * np.array([-c, -s, 0.0, c, s, 0.0])
    u_c = np.zeros(model.n_dof)
    if anchor_disp:
        for node, (dx, dy) in anchor_disp.items():
            for k, v in ((0, dx), (1, dy)):
                dof = 3 * node + k
                if dof not in model.fixed_dofs:
                    raise ModelError(f"prescribed displacement on free DOF {dof}")
                u_c[dof] = v
    free = model.free_dofs
    f_free = f[free]
    if np.any(u_c):
        K, _, _ = _full_matrices(model, E, np.zeros(len(model.elements)))
        f_free = f_free - K[np.ix_(free, np.arange(model.n_dof))] @ u_c
    return f_free, u_c


def recover_axial_forces(model: FrameModel, u_full, dT, E=None) -> np.ndarray:
    """Axial force of every element from full-length nodal displacements."""
    E, _ = _state_arrays(model, E, None)
    dT = np.broadcast_to(np.asarray(dT, dtype=float), (len(model.elements),))
    N = np.empty(len(model.elements))
    for i, e in enumerate(model.elements):
        c, s = e.direction
        i1, i2 = e.nodes
        du = u_full[3 * i2 : 3 * i2 + 2] - u_full[3 * i1 : 3 * i1 + 2]
        elong = c * du[0] + s * du[1]
        E_eff, _ = e.spec.effective(E[i])
        N[i] = E_eff * e.spec.area * (elong / e.length - e.spec.material.cte * dT[i])
    return N


def expand(model: FrameModel, u_free, u_prescribed=None) -> np.ndarray:
    """Scatter a free-DOF vector into a full-length vector."""
    u = np.zeros(model.n_dof) if u_prescribed is None else np.array(u_prescribed, dtype=float)
    u[model.free_dofs] = u_free
    return u


def critical_axial_force(model: FrameModel, E=None, pattern=None) -> float:
    """Smallest compressive load factor making ``K + K_G`` singular.

    ``pattern`` gives the per-element axial force for a unit load factor
    (default: unit tension in every element).  Returns the magnitude of the
    compressive load factor at first buckling.
    """
    E, N = _state_arrays(model, E, pattern if pattern is not None else np.ones(len(model.elements)))
    sysm = assemble(model, E, N)
    mu = scipy.linalg.eigh(sysm.K_G, sysm.K, eigvals_only=True)
    mu_max = mu.max()
    if not mu_max > 0:
        raise NumericalError("load pattern cannot buckle the model in compression")
    return 1.0 / mu_max
