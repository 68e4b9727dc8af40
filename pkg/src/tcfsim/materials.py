"""Material, cross-section and design-parameter types."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

from .errors import ConfigurationError, DomainError

# Linear E(T) is trusted only while the relative change stays below this.
LINEARITY_LIMIT = 0.1


@dataclass(frozen=True)
class Material:
    """Isotropic material with a linear temperature dependence of stiffness.

    Attributes:
        e_ref: Young's modulus at ``t_ref`` (Pa).
        rho: Density (kg/m^3).
        tce: Temperature coefficient of Young's modulus (1/degC).
        cte: Thermal expansion coefficient (1/degC).
        t_ref: Reference temperature (degC).
    """

    e_ref: float = 1.61e11
    rho: float = 2330.0
    tce: float = -7.406e-6
    cte: float = 2.4e-6
    t_ref: float = 25.0

    def __post_init__(self):
        for name in ("e_ref", "rho", "tce", "cte", "t_ref"):
            if not math.isfinite(getattr(self, name)):
                raise ConfigurationError(f"material {name} must be finite")
        if self.e_ref <= 0:
            raise ConfigurationError("material e_ref must be positive")
        if self.rho <= 0:
            raise ConfigurationError("material rho must be positive")


# Table values for the silicon device layer.
SILICON = Material()


def material_at_temperature(m: Material, T: float) -> tuple[float, float]:
    """Return ``(E, free_strain)`` of ``m`` at temperature ``T`` (degC)."""
    if not math.isfinite(T):
        raise DomainError(f"temperature {T!r} is not finite")
    dT = T - m.t_ref
    if abs(m.tce * dT) >= LINEARITY_LIMIT:
        raise DomainError(
            f"temperature {T} degC is outside the linear modulus domain "
            f"(|tce*(T - t_ref)| = {abs(m.tce * dT):.3g} >= {LINEARITY_LIMIT})"
        )
    return m.e_ref * (1.0 + m.tce * dT), m.cte * dT


def effective_perforated_properties(E, rho, p, k=3.0):
    """Smeared stiffness and density of a member perforated with etch holes.

    ``E_eff = E (1 - p)**k`` and ``rho_eff = rho (1 - p)`` where ``p`` is the
    hole area fraction.
    """
    if not 0.0 <= p < 1.0:
        raise DomainError(f"porosity must satisfy 0 <= p < 1, got {p}")
    if k < 1.0:
        raise DomainError(f"stiffness exponent must be >= 1, got {k}")
    solid = 1.0 - p
    return E * solid**k, rho * solid


@dataclass(frozen=True)
class BeamSpec:
    """Rectangular prismatic member of the in-plane frame.

    ``width`` is the in-plane dimension (bending direction), ``thickness``
    the out-of-plane device-layer dimension.
    """

    length: float
    width: float
    thickness: float
    porosity: float = 0.0
    material: Material = SILICON
    porosity_exponent: float = 3.0

    def __post_init__(self):
        for name in ("length", "width", "thickness"):
            v = getattr(self, name)
            if not (math.isfinite(v) and v > 0):
                raise ConfigurationError(f"beam {name} must be finite and > 0, got {v}")
        if not 0.0 <= self.porosity < 1.0:
            raise ConfigurationError(f"beam porosity must be in [0, 1), got {self.porosity}")
        if self.porosity_exponent < 1.0:
            raise ConfigurationError("porosity_exponent must be >= 1")

    @property
    def area(self) -> float:
        return self.width * self.thickness

    @property
    def inertia(self) -> float:
        """In-plane second moment of area ``t w^3 / 12``."""
        return self.thickness * self.width**3 / 12.0

    def effective(self, E: float) -> tuple[float, float]:
        """(E_eff, rho_eff) at base modulus ``E`` after perforation smearing."""
        return effective_perforated_properties(
            E, self.material.rho, self.porosity, self.porosity_exponent
        )


@dataclass(frozen=True)
class AnchorModel:
    """How anchor points move with temperature.

    ``rigid`` anchors stay fixed in the lab frame.  ``substrate`` anchors are
    carried by a substrate expanding isotropically about the resonator
    anchor (the origin) with coefficient ``cte_sub``.
    """

    kind: str = "rigid"
    cte_sub: float = 0.0

    def __post_init__(self):
        if self.kind not in ("rigid", "substrate"):
            raise ConfigurationError(f"unknown anchor model {self.kind!r}")
        if not math.isfinite(self.cte_sub):
            raise ConfigurationError("cte_sub must be finite")

    @classmethod
    def rigid(cls) -> AnchorModel:
        return cls("rigid", 0.0)

    @classmethod
    def substrate(cls, cte_sub: float) -> AnchorModel:
        return cls("substrate", cte_sub)

    def displacement(self, position, T: float, t_ref: float) -> tuple[float, float]:
        if self.kind == "rigid":
            return 0.0, 0.0
        s = self.cte_sub * (T - t_ref)
        return s * position[0], s * position[1]


@dataclass(frozen=True)
class DesignParams:
    """Design of the self-compensated resonator (SI units).

    Defaults: resonator 560 x 2 um, compensating beams 540 x 40 um, 20 um
    device layer.  Truss size, compensating-beam porosity and wing lumps are
    not tabulated and are configuration choices.
    """

    l2: float = 560e-6
    w_res: float = 2e-6
    l1: float = 540e-6
    w_comp: float = 40e-6
    thickness: float = 20e-6
    comp_porosity: float = 0.25
    porosity_exponent: float = 3.0
    truss_length: float = 100e-6
    truss_width: float = 8e-6
    wing_mass: float = 0.0
    wing_inertia: float = 0.0
    anchor_model: AnchorModel = field(default_factory=AnchorModel)

    def __post_init__(self):
        for name in ("l2", "w_res", "l1", "w_comp", "thickness", "truss_length", "truss_width"):
            v = getattr(self, name)
            if not (math.isfinite(v) and v > 0):
                raise ConfigurationError(f"design {name} must be finite and > 0, got {v}")
        if self.l1 > self.l2:
            raise ConfigurationError(f"l1 ({self.l1}) must not exceed l2 ({self.l2})")
        if not 0.0 <= self.comp_porosity < 1.0:
            raise ConfigurationError("comp_porosity must be in [0, 1)")
        for name in ("wing_mass", "wing_inertia"):
            v = getattr(self, name)
            if not (math.isfinite(v) and v >= 0):
                raise ConfigurationError(f"design {name} must be finite and >= 0, got {v}")

    @property
    def ratio(self) -> float:
        return self.l1 / self.l2

    def with_ratio(self, ratio: float) -> DesignParams:
        from dataclasses import replace

        return replace(self, l1=ratio * self.l2)
