"""Physical constants (CODATA 2018) as an immutable value object."""

from dataclasses import dataclass


@dataclass(frozen=True)
class PhysicalConstants:
    c: float = 2.99792458e8        # speed of light, m/s (exact)
    hbar: float = 1.054571817e-34  # reduced Planck constant, J s
    eps0: float = 8.8541878128e-12  # vacuum permittivity, F/m
    e_charge: float = 1.602176634e-19  # elementary charge, C (exact)


CONSTANTS = PhysicalConstants()

_FIELDS = ("c", "hbar", "eps0", "e_charge")


def apply_overrides(overrides: dict) -> None:
    """Replace constant values at startup (before any physics runs).

    The shared instance is mutated in place so every module sees the
    override; values are fixed for the remainder of the process.
    """
    for key, value in overrides.items():
        if key not in _FIELDS:
            raise ValueError(f"unknown constant {key!r}")
        value = float(value)
        if value <= 0:
            raise ValueError(f"constant {key!r} must be positive")
        object.__setattr__(CONSTANTS, key, value)
