"""Transverse Gaussian-mode analysis and vacuum-field normalization.

Waist and Gouy formulas use the plano-concave geometry with the
*geometric* mirror separation (physical L + t_d, not optical path).
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from .constants import CONSTANTS
from .stack import GeometryError
from .tmm import FieldProfile

_FWHM_PER_W0 = np.sqrt(2.0 * np.log(2.0))  # intensity FWHM = w0 * sqrt(2 ln 2)


@dataclass(frozen=True)
class TransverseMode:
    waist_um: float              # 1/e^2 amplitude radius w0
    order: tuple[int, int] = (0, 0)
    gouy_offset_nm: float = 0.0  # extra mirror travel to restore resonance

    @property
    def intensity_fwhm_um(self) -> float:
        return self.waist_um * _FWHM_PER_W0


@dataclass(frozen=True)
class ModeVolumeReport:
    A_eff_um2: float
    longitudinal_integral_nm: float   # int eps_r |f|^2 dz / (eps_r* |f*|^2)
    V_eff_um3: float
    E_vac_max_diamond: float          # V/m at the diamond-internal field maximum
    E_vac_global_max: float           # V/m at the global eps-weighted optimum
    z_max_diamond_nm: float
    z_max_global_nm: float
    wavelength_nm: float


def waist_from_fwhm(fwhm_um: float) -> float:
    return fwhm_um / _FWHM_PER_W0


def beam_waist(R_um: float, geometric_length_um: float, lam_nm: float,
               waist_fwhm_override_um: Optional[float] = None) -> TransverseMode:
    """Fundamental-mode waist of the plano-concave resonator.

    w0^2 = (lambda/pi) sqrt(Lg (R - Lg)).  A measured intensity-FWHM
    override takes precedence when provided.
    """
    if waist_fwhm_override_um is not None:
        return TransverseMode(waist_from_fwhm(waist_fwhm_override_um))
    Lg = geometric_length_um
    if not (0.0 < Lg < R_um):
        raise GeometryError(f"unstable: need 0 < Lg={Lg} < R={R_um} um")
    lam_um = lam_nm * 1e-3
    w0 = np.sqrt((lam_um / np.pi) * np.sqrt(Lg * (R_um - Lg)))
    return TransverseMode(float(w0))


def transverse_offsets(R_um: float, geometric_length_um: float, lam_nm: float,
                       max_order: int) -> list[float]:
    """Resonance shift (in mirror-travel nm) per transverse order m+n.

    Offset_k = k (lambda / 2 pi) arccos(sqrt(1 - Lg/R)); equally spaced
    in the combined order.
    """
    Lg = geometric_length_um
    if not (0.0 < Lg < R_um):
        raise GeometryError(f"unstable: need 0 < Lg={Lg} < R={R_um} um")
    step = (lam_nm / (2.0 * np.pi)) * np.arccos(np.sqrt(1.0 - Lg / R_um))
    return [k * float(step) for k in range(max_order + 1)]


def effective_area(mode: TransverseMode) -> float:
    """Transverse mode area in um^2: integral of exp(-2 r^2/w0^2) -> pi w0^2 / 2."""
    if mode.waist_um <= 0:
        raise ValueError("waist must be positive")
    return np.pi * mode.waist_um ** 2 / 2.0


def vacuum_field(profile: FieldProfile, A_eff_um2: float,
                 lam_nm: Optional[float] = None) -> ModeVolumeReport:
    """Vacuum-field normalization of a resonant standing-wave profile.

    V_eff = A_eff * int eps_r(z) |f(z)|^2 dz / (eps_r(z*) |f(z*)|^2) with z*
    the diamond-internal field maximum; E_vac(z*) = sqrt(hbar w / (2 eps0
    eps_r(z*) V_eff)).  The global-maximum variant (z* chosen to maximize
    E_vac anywhere in the stack) is reported alongside.
    """
    lam = profile.resonant_wavelength if lam_nm is None else lam_nm
    z, amp, eps = profile.z, profile.amplitude, profile.eps_r
    integral = np.trapezoid(eps * amp ** 2, z)  # nm * (eps |f|^2) units

    dmask = profile.mask_for_layer("diamond")
    if not dmask.any():
        raise ValueError("profile has no diamond layer; diamond-maximum undefined")

    def evac_at(i: int) -> float:
        # hbar w / (2 eps0 eps_r V_eff), V_eff = A * integral/(eps_i f_i^2)
        V_eff_m3 = (A_eff_um2 * 1e-12) * (integral * 1e-9) / (eps[i] * amp[i] ** 2)
        w = 2.0 * np.pi * CONSTANTS.c / (lam * 1e-9)
        return float(np.sqrt(CONSTANTS.hbar * w / (2.0 * CONSTANTS.eps0 * eps[i] * V_eff_m3)))

    # E_vac at z is prop. to |f(z)| (the eps factors cancel), so the maxima
    # are the field maxima.  Layer boundaries carry duplicate samples from
    # both sides; break ties toward the diamond-side sample (largest eps)
    # so the reported eps_r and integral refer to the diamond.
    didx = np.flatnonzero(dmask)
    amax = amp[didx].max()
    cand = didx[amp[didx] >= amax - 1e-12 * amax]
    i_d = int(cand[np.argmax(eps[cand])])
    i_g = int(np.argmax(amp))
    e_d, e_g = evac_at(i_d), evac_at(i_g)

    V_eff_um3 = A_eff_um2 * (integral * 1e-3) / (eps[i_d] * amp[i_d] ** 2)
    return ModeVolumeReport(
        A_eff_um2=float(A_eff_um2),
        longitudinal_integral_nm=float(integral / (eps[i_d] * amp[i_d] ** 2)),
        V_eff_um3=float(V_eff_um3),
        E_vac_max_diamond=e_d,
        E_vac_global_max=e_g,
        z_max_diamond_nm=float(z[i_d]),
        z_max_global_nm=float(z[i_g]),
        wavelength_nm=float(lam),
    )
