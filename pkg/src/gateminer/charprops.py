"""Optical band gap from the wavelength of maximum absorption."""

from __future__ import annotations

from dataclasses import dataclass

# h*c in eV*nm, rounded as is customary for quick band-gap estimates
HC_EV_NM = 1240.0


@dataclass(frozen=True)
class BandGapResult:
    lambda_nm: float
    e_g_ev: float


def optical_band_gap(lambda_nm: float) -> BandGapResult:
    """``E_g = 1240 / lambda`` with lambda in nm and E_g in eV."""
    lambda_nm = float(lambda_nm)
    if not lambda_nm > 0:
        raise ValueError(f"wavelength must be positive, got {lambda_nm}")
    return BandGapResult(lambda_nm, HC_EV_NM / lambda_nm)


def format_ev(result: BandGapResult) -> str:
    """Four significant figures, trailing zeros kept: ``3.333``, ``1.000``."""
    return f"{result.e_g_ev:#.4g}"
