"""Physical constants, atomic species and Zeeman energy scales."""
from dataclasses import dataclass, replace
from fractions import Fraction

from scipy import constants as _codata

GAUSS = 1e-4  # tesla


@dataclass(frozen=True)
class PhysicalConstants:
    """CODATA values in SI units; override for dimensionless runs."""

    hbar: float = _codata.hbar
    bohr_magneton: float = _codata.physical_constants["Bohr magneton"][0]
    atomic_mass_unit: float = _codata.physical_constants["atomic mass constant"][0]

    def __post_init__(self):
        for name in ("hbar", "bohr_magneton", "atomic_mass_unit"):
            if not getattr(self, name) > 0:
                raise ValueError(f"{name} must be strictly positive")


SI = PhysicalConstants()


@dataclass(frozen=True)
class AtomSpecies:
    name: str
    mass: float
    lande_g: float
    level: str = ""
    J: float | None = None

    def __post_init__(self):
        if not self.mass > 0:
            raise ValueError("mass must be positive")
        if self.lande_g != self.lande_g or abs(self.lande_g) == float("inf"):
            raise ValueError("Lande g must be finite")


@dataclass(frozen=True)
class ZeemanState:
    species: AtomSpecies
    m_quantum: int

    def __post_init__(self):
        J = self.species.J
        if J is not None and abs(self.m_quantum) > J:
            raise ValueError(f"|M| = {abs(self.m_quantum)} exceeds J = {J}")

    def with_m(self, m_quantum):
        return replace(self, m_quantum=m_quantum)


class UndefinedLandeError(ValueError):
    pass


def lande_g(L, S, J):
    """LS-coupling Lande factor; exact rational arithmetic when given ints
    or Fractions (half-integers as ``Fraction(1, 2)``)."""
    L, S, J = (x if isinstance(x, float) else Fraction(x) for x in (L, S, J))
    if J <= 0:
        raise UndefinedLandeError("Lande g is undefined for J = 0")
    jj = J * (J + 1)
    return 1 + (jj + S * (S + 1) - L * (L + 1)) / (2 * jj)


def zeeman_amplitude(state, B, constants=SI):
    """Signed Zeeman energy scale ``g mu_B M B`` in joules (``B`` in tesla)."""
    if B < 0:
        raise ValueError("field magnitude must be non-negative")
    return state.species.lande_g * constants.bohr_magneton * state.m_quantum * B


ARGON_MASS_U = 39.948

ARGON_3P2 = AtomSpecies(
    name="Ar*",
    mass=ARGON_MASS_U * SI.atomic_mass_unit,
    lande_g=float(lande_g(1, 1, 2)),
    level="3P2",
    J=2,
)


def argon_state(M=2, mass_u=ARGON_MASS_U, g=None):
    species = ARGON_3P2
    if mass_u != ARGON_MASS_U or g is not None:
        species = replace(
            species,
            mass=mass_u * SI.atomic_mass_unit,
            lande_g=species.lande_g if g is None else float(g),
        )
    return ZeemanState(species, M)
