"""Frequency versus temperature, TCF extraction and length-ratio design."""

from __future__ import annotations

import logging
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from functools import partial
from typing import Callable, Sequence

import numpy as np

from .eigen import ModalResult, generalized_modes
from .errors import ClassificationError, DomainError, NumericalError, TcfsimError
from .fem import FrameModel, _rotation, assemble, element_matrices
from .layout import RESONATOR, build_frame_layout
from .materials import AnchorModel, DesignParams, Material, material_at_temperature
from .prestress import PrestressState, prestress_state

log = logging.getLogger(__name__)

MIN_ENERGY_FRACTION = 0.5
MODE_JUMP_LIMIT = 0.10
DEFAULT_T_RANGE = (-40.0, 80.0)
GOLDEN = (math.sqrt(5.0) - 1.0) / 2.0


@dataclass(frozen=True)
class ModalReport:
    """Modal solve of one structure at one temperature."""

    temperature: float
    modes: ModalResult
    fractions: np.ndarray
    index: int
    prestress: PrestressState | None

    @property
    def frequency(self) -> float:
        return float(self.modes.frequencies[self.index])

    @property
    def separation(self) -> float | None:
        """Gap (Hz) from the resonator mode to the next higher mode."""
        if self.index + 1 >= self.modes.n_modes:
            return None
        return float(self.modes.frequencies[self.index + 1] - self.frequency)


def resonator_energy_fractions(modes: ModalResult, model: FrameModel) -> np.ndarray:
    """Share of each mode's kinetic energy in bending of the resonator beam."""
    shapes = np.zeros((model.n_dof, modes.n_modes))
    shapes[model.free_dofs] = modes.shapes
    total = np.zeros(modes.n_modes)
    res = np.zeros(modes.n_modes)
    bend = [1, 2, 4, 5]
    for e in model.elements:
        _, me = element_matrices(e)
        phi = shapes[e.dofs()]
        total += np.einsum("ij,ik,kj->j", phi, me, phi)
        if e.member == RESONATOR:
            T = _rotation(e)
            local = T @ phi
            m_local = T @ me @ T.T
            res += np.einsum("ij,ik,kj->j", local[bend], m_local[np.ix_(bend, bend)], local[bend])
    for lm in model.lumped_masses:
        d = 3 * lm.node
        total += lm.mass * (shapes[d] ** 2 + shapes[d + 1] ** 2) + lm.inertia * shapes[d + 2] ** 2
    with np.errstate(invalid="ignore", divide="ignore"):
        frac = np.where(total > 0, res / np.where(total > 0, total, 1.0), 0.0)
    return frac


def classify_resonator_mode(modes: ModalResult, model: FrameModel, fractions=None) -> int:
    """Index of the lowest mode dominated by resonator-beam bending."""
    if modes.n_modes < 1:
        raise ClassificationError("no modes to classify")
    if fractions is None:
        fractions = resonator_energy_fractions(modes, model)
    hits = np.flatnonzero(fractions >= MIN_ENERGY_FRACTION)
    if hits.size == 0:
        raise ClassificationError(
            "mode identification failed: no mode has >= "
            f"{MIN_ENERGY_FRACTION:.0%} resonator kinetic energy among the first {modes.n_modes}"
        )
    return int(hits[0])


def modal_analysis(
    model: FrameModel,
    mat: Material,
    T: float,
    anchor_model: AnchorModel | None = None,
    n_modes: int = 6,
    axial_forces=None,
) -> ModalReport:
    """Prestressed modal solve at temperature ``T``.

    ``axial_forces`` overrides the thermal prestress with imposed
    per-element forces (tension positive).
    """
    E_T, _ = material_at_temperature(mat, T)
    E = np.full(len(model.elements), E_T)
    state = None
    if axial_forces is None:
        state = prestress_state(model, mat, T, anchor_model)
        N = state.axial_forces
    else:
        N = np.broadcast_to(np.asarray(axial_forces, dtype=float), (len(model.elements),))
    sysm = assemble(model, E, N)
    modes = generalized_modes(sysm.K_total, sysm.M, min(n_modes, len(sysm.dof_map)))
    fractions = resonator_energy_fractions(modes, model)
    idx = classify_resonator_mode(modes, model, fractions)
    return ModalReport(float(T), modes, fractions, idx, state)


def frequency_at_temperature(
    design: DesignParams, mat: Material, T: float, mesh: int = 16, n_modes: int = 6
) -> tuple[float, int]:
    """Resonator flexural frequency (Hz) and its mode index at ``T``."""
    model = build_frame_layout(design, mat, mesh)
    rep = modal_analysis(model, mat, T, design.anchor_model, n_modes)
    return rep.frequency, rep.index


def tcf_from_points(f1, T1, f2, T2):
    """Two-point TCF in ppm/degC referred to ``f1``."""
    if T1 == T2:
        raise DomainError("tcf_from_points needs two different temperatures")
    if not f1 > 0:
        raise DomainError(f"reference frequency must be positive, got {f1}")
    return 1e6 * (f2 - f1) / (f1 * (T2 - T1))


@dataclass(frozen=True)
class TcfReport:
    samples: tuple[tuple[float, float], ...]
    slope: float  # ppm/degC
    f_ref: float  # Hz at t_ref
    max_fit_residual: float  # ppm
    t_ref: float = 25.0
    mode_jump: bool = False


def tcf_linear_fit(samples, t_ref: float = 25.0, f_ref: float | None = None) -> TcfReport:
    """Least-squares slope of relative frequency (ppm) against temperature.

    The reference frequency is ``f_ref`` when given, else the sample taken
    at ``t_ref``, else the linear fit of f(T) evaluated at ``t_ref``.
    """
    samples = tuple((float(T), float(f)) for T, f in samples)
    T = np.array([s[0] for s in samples])
    f = np.array([s[1] for s in samples])
    if len(np.unique(T)) < 2:
        raise DomainError("tcf_linear_fit needs at least two distinct temperatures")
    if not np.all(np.isfinite(f)) or np.any(f <= 0):
        raise NumericalError("frequencies must be finite and positive")
    x = T - t_ref
    if f_ref is None:
        at_ref = np.flatnonzero(T == t_ref)
        if at_ref.size:
            f_ref = float(f[at_ref[0]])
        else:
            b, a = np.polyfit(x, f, 1)
            f_ref = float(a)
    rel = 1e6 * (f - f_ref) / f_ref
    slope, offset = np.polyfit(x, rel, 1)
    resid = rel - (slope * x + offset)

    order = np.argsort(T)
    jumps = np.abs(np.diff(f[order])) / f[order][:-1]
    jump = bool(np.any(jumps > MODE_JUMP_LIMIT))
    if jump:
        log.warning("frequency changes by more than %.0f%% between adjacent samples", 100 * MODE_JUMP_LIMIT)
    return TcfReport(samples, float(slope), f_ref, float(np.abs(resid).max()), t_ref, jump)


def temperature_grid(t_range=DEFAULT_T_RANGE, n_T: int = 7) -> np.ndarray:
    t_min, t_max = t_range
    if n_T < 2 or not t_max > t_min:
        raise DomainError(f"bad temperature grid {t_range} x {n_T}")
    return np.linspace(t_min, t_max, n_T)


def model_tcf(
    model: FrameModel,
    mat: Material,
    temperatures: Sequence[float],
    anchor_model: AnchorModel | None = None,
    n_modes: int = 6,
    imposed_axial: Callable[[float], object] | None = None,
) -> TcfReport:
    """TCF of a prebuilt model over ``temperatures``.

    ``imposed_axial(T)`` may replace the thermal prestress by externally
    applied axial forces.
    """
    def freq(T):
        forces = None if imposed_axial is None else imposed_axial(T)
        return modal_analysis(model, mat, T, anchor_model, n_modes, forces).frequency

    samples = [(float(T), freq(T)) for T in temperatures]
    f_ref = freq(mat.t_ref)
    return tcf_linear_fit(samples, mat.t_ref, f_ref)


def design_tcf(
    design: DesignParams,
    mat: Material,
    t_range=DEFAULT_T_RANGE,
    n_T: int = 7,
    mesh: int = 16,
    n_modes: int = 6,
) -> TcfReport:
    model = build_frame_layout(design, mat, mesh)
    return model_tcf(model, mat, temperature_grid(t_range, n_T), design.anchor_model, n_modes)


@dataclass(frozen=True)
class SweepRow:
    ratio: float
    f_at_tref: float
    tcf: float
    report: TcfReport = field(repr=False)


@dataclass(frozen=True)
class SweepResult:
    rows: tuple[SweepRow, ...]
    bracket: tuple[float, float] | None  # adjacent ratios around a TCF sign change

    @property
    def direction(self) -> int:
        """+1 if TCF strictly increases with ratio, -1 if strictly decreases, else 0."""
        rows = sorted(self.rows, key=lambda r: r.ratio)
        d = np.diff([r.tcf for r in rows])
        if d.size and np.all(d > 0):
            return 1
        if d.size and np.all(d < 0):
            return -1
        return 0


def _sweep_row(ratio, design, mat, t_range, n_T, mesh, n_modes) -> SweepRow:
    try:
        rep = design_tcf(design.with_ratio(ratio), mat, t_range, n_T, mesh, n_modes)
    except TcfsimError as exc:
        raise type(exc)(f"ratio {ratio}: {exc}") from exc
    return SweepRow(float(ratio), rep.f_ref, rep.slope, rep)


def ratio_sweep(
    design: DesignParams,
    mat: Material,
    ratios: Sequence[float],
    t_range=DEFAULT_T_RANGE,
    n_T: int = 7,
    mesh: int = 16,
    n_modes: int = 6,
    workers: int = 1,
) -> SweepResult:
    """TCF for each length ratio ``l1/l2``, in input order.

    Rows are independent; ``workers > 1`` evaluates them in separate
    processes without changing the result.
    """
    ratios = [float(r) for r in ratios]
    if not ratios:
        raise DomainError("ratio_sweep needs at least one ratio")
    for r in ratios:
        if not 0.0 < r <= 1.0:
            raise DomainError(f"ratio {r} outside (0, 1]")
    if n_T < 3:
        raise DomainError(f"ratio_sweep needs n_T >= 3, got {n_T}")
    job = partial(_sweep_row, design=design, mat=mat, t_range=t_range, n_T=n_T, mesh=mesh, n_modes=n_modes)
    if workers > 1 and len(ratios) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            rows = tuple(pool.map(job, ratios))
    else:
        rows = tuple(job(r) for r in ratios)

    bracket = None
    ordered = sorted({(r.ratio, r.tcf) for r in rows})
    for (r0, g0), (r1, g1) in zip(ordered[:-1], ordered[1:]):
        if g0 * g1 <= 0 and r0 < r1:
            bracket = (r0, r1)
            break
    return SweepResult(rows, bracket)


@dataclass(frozen=True)
class OptimizeResult:
    ratio: float
    tcf: float
    evaluations: int
    bracket_lo: float
    bracket_hi: float
    sign_change: bool
    converged: bool  # |tcf| <= tol_tcf


def optimize_ratio(
    evaluator: Callable[[float], float],
    bracket: tuple[float, float] = (0.90, 1.00),
    tol_ratio: float = 1e-4,
    tol_tcf: float = 0.5,
) -> OptimizeResult:
    """Find the length ratio that nulls (or minimizes |TCF|) within ``bracket``.

    Bisection when the TCF changes sign across the bracket, golden-section
    minimization of |TCF| otherwise.  The returned ratio is the evaluated
    point with the smallest |TCF|.
    """
    lo, hi = float(bracket[0]), float(bracket[1])
    if not (0.0 < lo < hi <= 1.0):
        raise DomainError(f"bracket must satisfy 0 < lo < hi <= 1, got {bracket}")
    if not tol_ratio > 0:
        raise DomainError("tol_ratio must be positive")
    calls = 0
    best = (math.inf, None)

    def g(r):
        nonlocal calls, best
        calls += 1
        v = float(evaluator(r))
        if not math.isfinite(v):
            raise NumericalError(f"non-finite TCF {v} at ratio {r}")
        if abs(v) < best[0]:
            best = (abs(v), (r, v))
        return v

    g_lo, g_hi = g(lo), g(hi)
    sign_change = g_lo * g_hi <= 0
    if sign_change:
        while hi - lo > tol_ratio and g_lo != 0.0 and g_hi != 0.0:
            mid = 0.5 * (lo + hi)
            g_mid = g(mid)
            if g_mid == 0.0:
                lo = hi = mid
            elif (g_mid < 0) == (g_lo < 0):
                lo, g_lo = mid, g_mid
            else:
                hi, g_hi = mid, g_mid
    else:
        a, b = lo, hi
        c = b - GOLDEN * (b - a)
        d = a + GOLDEN * (b - a)
        gc, gd = abs(g(c)), abs(g(d))
        while b - a > tol_ratio:
            if gc < gd:
                b, d, gd = d, c, gc
                c = b - GOLDEN * (b - a)
                gc = abs(g(c))
            else:
                a, c, gc = c, d, gd
                d = a + GOLDEN * (b - a)
                gd = abs(g(d))
        lo, hi = a, b
    r_star, g_star = best[1]
    log.info("optimize_ratio: %d evaluations, ratio* = %.6f", calls, r_star)
    return OptimizeResult(r_star, g_star, calls, lo, hi, sign_change, abs(g_star) <= tol_tcf)


def _ratio_tcf(ratio, design, mat, t_range, n_T, mesh, n_modes) -> float:
    return design_tcf(design.with_ratio(ratio), mat, t_range, n_T, mesh, n_modes).slope


def ratio_evaluator(design, mat, t_range=DEFAULT_T_RANGE, n_T=7, mesh=16, n_modes=6):
    """Picklable ``ratio -> TCF`` callable for :func:`optimize_ratio`."""
    return partial(_ratio_tcf, design=design, mat=mat, t_range=t_range, n_T=n_T, mesh=mesh, n_modes=n_modes)


@dataclass(frozen=True)
class Sensitivity:
    l1: float
    tcf: float
    dtcf_dl1: float  # ppm/degC per metre


def l1_sensitivity(design, mat, t_range=DEFAULT_T_RANGE, n_T=7, mesh=16, n_modes=6, step=1e-6):
    """Finite-difference derivative of TCF with respect to the compensating length.

    Central difference, falling back to one-sided at ``l1 = l2``.
    """
    from dataclasses import replace

    def tcf(l1):
        return design_tcf(replace(design, l1=l1), mat, t_range, n_T, mesh, n_modes).slope

    t0 = tcf(design.l1)
    hi = min(design.l1 + step, design.l2)
    lo = design.l1 - step
    if hi == design.l1:
        deriv = (t0 - tcf(lo)) / step
    else:
        deriv = (tcf(hi) - tcf(lo)) / (hi - lo)
    return Sensitivity(design.l1, t0, deriv)
