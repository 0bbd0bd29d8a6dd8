"""One-dimensional transfer-matrix solver at normal incidence.

Spectra, resonance finding, mode dispersion lambda_res(L) and
intracavity standing-wave field profiles.  Scalar (polarization-
degenerate) treatment; wavelengths in nm.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .stack import CavityAssembly, Layer


@dataclass(frozen=True)
class StackResponse:
    wavelength: float
    r: complex
    t: complex
    R_power: float
    T_power: float


@dataclass
class BranchSample:
    L: float
    lambda_res: float
    slope: float = np.nan         # d(lambda)/dL, filled by dispersion_map
    diamond_fraction: float = np.nan


@dataclass
class ModeBranch:
    samples: list[BranchSample]
    character: str = "mixed"       # "air-like" | "diamond-like" | "mixed"
    transverse_order: tuple[int, int] = (0, 0)

    @property
    def L_values(self) -> np.ndarray:
        return np.array([s.L for s in self.samples])

    @property
    def lambda_values(self) -> np.ndarray:
        return np.array([s.lambda_res for s in self.samples])

    def slope_at(self, lam: float) -> float:
        """Local slope of the branch at the sample closest to wavelength lam."""
        i = int(np.argmin(np.abs(self.lambda_values - lam)))
        return self.samples[i].slope


@dataclass
class FieldProfile:
    z: np.ndarray                  # nm, from the bottom substrate interface
    amplitude: np.ndarray          # |E(z)|, relative units
    eps_r: np.ndarray              # relative permittivity at each sample
    resonant_wavelength: float
    layer_edges: np.ndarray        # interface positions, nm
    layer_names: list[str]
    antinodes: np.ndarray          # nm
    nodes: np.ndarray              # nm

    def mask_for_layer(self, name: str) -> np.ndarray:
        mask = np.zeros_like(self.z, dtype=bool)
        for i, nm_ in enumerate(self.layer_names):
            if nm_ == name:
                mask |= (self.z >= self.layer_edges[i]) & (self.z <= self.layer_edges[i + 1])
        return mask


class ResonanceError(RuntimeError):
    """Raised when an operation requires a resonance that cannot be found."""


def characteristic_matrix(layer: Layer, lam: float) -> np.ndarray:
    """2x2 characteristic matrix of a single layer at wavelength lam (nm)."""
    if lam <= 0:
        raise ValueError("wavelength must be positive")
    delta = 2.0 * np.pi * layer.n * layer.thickness / lam
    c, s = np.cos(delta), np.sin(delta)
    return np.array([[c, 1j * s / layer.n], [1j * layer.n * s, c]])


def _stack_matrices(layers: Sequence[Layer], lams: np.ndarray) -> np.ndarray:
    """Composed characteristic matrices, vectorized over wavelength.

    Returns an array of shape (len(lams), 2, 2).
    """
    lams = np.asarray(lams, dtype=float)
    M = np.zeros((lams.size, 2, 2), dtype=complex)
    M[:, 0, 0] = 1.0
    M[:, 1, 1] = 1.0
    for layer in layers:
        if layer.thickness == 0.0:
            continue
        delta = 2.0 * np.pi * layer.n * layer.thickness / lams
        c, s = np.cos(delta), np.sin(delta)
        m00 = M[:, 0, 0] * c + M[:, 0, 1] * (1j * layer.n * s)
        m01 = M[:, 0, 0] * (1j * s / layer.n) + M[:, 0, 1] * c
        m10 = M[:, 1, 0] * c + M[:, 1, 1] * (1j * layer.n * s)
        m11 = M[:, 1, 0] * (1j * s / layer.n) + M[:, 1, 1] * c
        M[:, 0, 0], M[:, 0, 1], M[:, 1, 0], M[:, 1, 1] = m00, m01, m10, m11
    return M


def _rt_from_matrix(M: np.ndarray, n_in: complex, n_out: complex):
    B = M[..., 0, 0] + M[..., 0, 1] * n_out
    C = M[..., 1, 0] + M[..., 1, 1] * n_out
    denom = n_in * B + C
    r = (n_in * B - C) / denom
    t = 2.0 * n_in / denom
    return r, t


def stack_response(layers: Sequence[Layer], n_in: complex, n_out: complex,
                   lam: float) -> StackResponse:
    """Amplitude and power coefficients of a layer stack at one wavelength."""
    if len(layers) < 1:
        raise ValueError("need at least one layer")
    M = _stack_matrices(layers, np.array([lam]))
    r, t = _rt_from_matrix(M[0], complex(n_in), complex(n_out))
    R = float(np.abs(r) ** 2)
    T = float(np.real(n_out) / np.real(n_in) * np.abs(t) ** 2)
    return StackResponse(lam, complex(r), complex(t), R, T)


def transmission_spectrum(layers: Sequence[Layer], n_in: complex, n_out: complex,
                          lams: np.ndarray) -> np.ndarray:
    M = _stack_matrices(layers, lams)
    _, t = _rt_from_matrix(M, complex(n_in), complex(n_out))
    return np.real(n_out) / np.real(n_in) * np.abs(t) ** 2


def _golden_max(f, a: float, b: float, tol: float) -> float:
    invphi = (np.sqrt(5.0) - 1.0) / 2.0
    c = b - invphi * (b - a)
    d = a + invphi * (b - a)
    fc, fd = f(c), f(d)
    while (b - a) > tol:
        if fc > fd:
            b, d, fd = d, c, fc
            c = b - invphi * (b - a)
            fc = f(c)
        else:
            a, c, fc = c, d, fd
            d = a + invphi * (b - a)
            fd = f(d)
    return 0.5 * (a + b)


def _lorentzian_fwhm(f, lam0: float, T0: float) -> float:
    """Cold linewidth from a local Lorentzian fit of the transmission peak.

    Survives 1e-5-level peak transmissions where half-max bracketing on a
    coarse grid would fail.
    """
    # bracket the half-max point by doubling an offset
    d = 1e-5  # nm
    while f(lam0 + d) > 0.5 * T0 and d < 50.0:
        d *= 2.0
    offsets = np.linspace(-3.0 * d, 3.0 * d, 61)
    Ts = np.array([f(lam0 + o) for o in offsets])
    # 1/T of a Lorentzian is quadratic in detuning: fit T0/T = 1 + (2x/w)^2
    y = T0 / np.maximum(Ts, 1e-300) - 1.0
    coef = np.polyfit(offsets, y, 2)
    a = max(coef[0], 1e-300)
    return 2.0 / np.sqrt(a)


def find_resonances(assembly: CavityAssembly, lam_window: tuple[float, float],
                    scan_step: float = 0.001, refine_tol: float = 1e-6) -> list[dict]:
    """Transmission peaks of the assembly inside lam_window.

    Returns one dict per resonance: lambda_res (nm), cold_linewidth_nm,
    Q_cold.  Empty list when no peak lies in the window.
    """
    layers = assembly.layers()
    n_in, n_out = assembly.n_in, assembly.n_out
    lo, hi = lam_window
    lams = np.arange(lo, hi + scan_step, scan_step)
    T = transmission_spectrum(layers, n_in, n_out, lams)

    def f(lam):
        return transmission_spectrum(layers, n_in, n_out, np.array([lam]))[0]

    floor = max(T.max() * 1e-6, 1e-12)
    peaks = []
    for i in range(1, lams.size - 1):
        if T[i] > T[i - 1] and T[i] >= T[i + 1] and T[i] > floor:
            peaks.append(i)
    out = []
    for i in peaks:
        lam_res = _golden_max(f, lams[max(i - 1, 0)], lams[min(i + 1, lams.size - 1)],
                              refine_tol)
        T0 = f(lam_res)
        fwhm = _lorentzian_fwhm(f, lam_res, T0)
        if (i <= 1 or i >= lams.size - 2
                or lam_res - lo < 5.0 * fwhm or hi - lam_res < 5.0 * fwhm):
            warnings.warn(f"transmission peak at {lam_res:.3f} nm abuts the window edge")
        out.append({
            "lambda_res": float(lam_res),
            "cold_linewidth_nm": float(fwhm),
            "Q_cold": float(lam_res / fwhm),
            "peak_transmission": float(T0),
        })
    out.sort(key=lambda d: d["lambda_res"])
    return out


def field_profile(assembly: CavityAssembly, lam_res: float,
                  min_samples: int = 2000) -> FieldProfile:
    """Standing-wave |E(z)| through the stack at a resonant wavelength.

    Unit-amplitude illumination from the bottom substrate; amplitudes are
    relative.  Rejects wavelengths more than one cold linewidth away from
    the nearest transmission peak.
    """
    layers = [ly for ly in assembly.layers() if ly.thickness > 0]
    n_in, n_out = assembly.n_in, assembly.n_out

    # on-resonance check within one cold linewidth
    near = find_resonances(assembly, (lam_res - 0.5, lam_res + 0.5))
    if not near:
        raise ResonanceError(f"no resonance within 0.5 nm of {lam_res} nm")
    best = min(near, key=lambda d: abs(d["lambda_res"] - lam_res))
    if abs(best["lambda_res"] - lam_res) > best["cold_linewidth_nm"]:
        raise ResonanceError(
            f"{lam_res} nm is {abs(best['lambda_res'] - lam_res):.4g} nm from the "
            f"nearest resonance ({best['lambda_res']:.6f} nm), more than one "
            f"linewidth ({best['cold_linewidth_nm']:.4g} nm)")

    resp = stack_response(layers, n_in, n_out, lam_res)
    total = sum(ly.thickness for ly in layers)
    edges = np.concatenate([[0.0], np.cumsum([ly.thickness for ly in layers])])

    # [E; H] at the top (exit) interface: transmitted forward wave only
    EH_top = np.array([resp.t, n_out * resp.t], dtype=complex)

    zs, amps, eps = [], [], []
    # walk from the top layer downward; inside each layer
    # [E(z); H(z)] = M(thickness from z to layer top) @ [E; H]_layer_top
    EH_upper = EH_top
    for idx in range(len(layers) - 1, -1, -1):
        ly = layers[idx]
        dz = min(lam_res / (20.0 * ly.n.real), total / min_samples)
        npts = max(int(np.ceil(ly.thickness / dz)) + 1, 8)
        z_local = np.linspace(0.0, ly.thickness, npts)  # from layer bottom
        d_to_top = ly.thickness - z_local
        delta = 2.0 * np.pi * ly.n * d_to_top / lam_res
        c, s = np.cos(delta), np.sin(delta)
        E = c * EH_upper[0] + (1j * s / ly.n) * EH_upper[1]
        H = (1j * ly.n * s) * EH_upper[0] + c * EH_upper[1]
        zs.append(edges[idx] + z_local)
        amps.append(np.abs(E))
        eps.append(np.full(npts, (ly.n ** 2).real))
        EH_upper = np.array([E[0], H[0]])

    z = np.concatenate(zs[::-1])
    amp = np.concatenate(amps[::-1])
    eps_r = np.concatenate(eps[::-1])
    order = np.argsort(z, kind="stable")
    z, amp, eps_r = z[order], amp[order], eps_r[order]

    anti, node = _extrema(z, amp)
    return FieldProfile(z, amp, eps_r, lam_res, edges,
                        [ly.name for ly in layers], anti, node)


def _extrema(z: np.ndarray, amp: np.ndarray):
    antinodes, nodes = [], []
    for i in range(1, z.size - 1):
        if amp[i] >= amp[i - 1] and amp[i] > amp[i + 1]:
            antinodes.append(z[i])
        if amp[i] <= amp[i - 1] and amp[i] < amp[i + 1]:
            nodes.append(z[i])
    return np.array(antinodes), np.array(nodes)


def diamond_energy_fraction(profile: FieldProfile) -> float:
    """Fraction of eps_r |E|^2 energy residing in the diamond layer."""
    w = profile.eps_r * profile.amplitude ** 2
    total = np.trapezoid(w, profile.z)
    mask = profile.mask_for_layer("diamond")
    if not mask.any():
        return 0.0
    return float(np.trapezoid(w[mask], profile.z[mask]) / total)


def dispersion_map(assembly: CavityAssembly, L_values: np.ndarray,
                   lam_window: tuple[float, float],
                   scan_step: float = 0.002,
                   classify: bool = True) -> list[ModeBranch]:
    """Track resonances across an air-gap scan into continuous branches.

    Branch association is nearest-neighbor in (L, lambda) with slope
    extrapolation; slopes are centered differences along each branch.
    """
    L_values = np.asarray(L_values, dtype=float)
    if not np.all(np.diff(L_values) > 0):
        raise ValueError("L grid must be strictly increasing")

    open_branches: list[list[BranchSample]] = []
    closed: list[list[BranchSample]] = []
    for L in L_values:
        res = find_resonances(assembly.with_air_gap(L), lam_window,
                              scan_step=scan_step)
        lams = [r["lambda_res"] for r in res]
        matched = set()
        next_open = []
        for br in open_branches:
            dL = L - br[-1].L
            slope = 0.5
            if len(br) >= 2:
                slope = (br[-1].lambda_res - br[-2].lambda_res) / (br[-1].L - br[-2].L)
            pred = br[-1].lambda_res + slope * dL
            cand = [(abs(lam - pred), j) for j, lam in enumerate(lams) if j not in matched]
            tol = max(3.0 * scan_step, 0.6 * dL)
            if cand and min(cand)[0] < tol:
                _, j = min(cand)
                matched.add(j)
                br.append(BranchSample(L, lams[j]))
                next_open.append(br)
            else:
                closed.append(br)
        for j, lam in enumerate(lams):
            if j not in matched:
                next_open.append([BranchSample(L, lam)])
        open_branches = next_open
    closed.extend(open_branches)

    branches = []
    for samples in closed:
        if len(samples) < 2:
            continue
        Ls = np.array([s.L for s in samples])
        lams_ = np.array([s.lambda_res for s in samples])
        slopes = np.gradient(lams_, Ls)
        for s, sl in zip(samples, slopes):
            s.slope = float(sl)
        br = ModeBranch(samples)
        if classify:
            _classify_branch(assembly, br)
        branches.append(br)
    branches.sort(key=lambda b: (b.samples[0].L, b.samples[0].lambda_res))
    return branches


def _classify_branch(assembly: CavityAssembly, branch: ModeBranch) -> None:
    fracs = []
    idxs = {0, len(branch.samples) // 2, len(branch.samples) - 1}
    for i in sorted(idxs):
        s = branch.samples[i]
        try:
            prof = field_profile(assembly.with_air_gap(s.L), s.lambda_res)
        except ResonanceError:
            continue
        frac = diamond_energy_fraction(prof)
        s.diamond_fraction = frac
        fracs.append(frac)
    if not fracs:
        return
    if max(fracs) < 0.25:
        branch.character = "air-like"
    elif min(fracs) > 0.75:
        branch.character = "diamond-like"
    else:
        branch.character = "mixed"
