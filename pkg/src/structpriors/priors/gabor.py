"""Random Gabor filters as an implicit weight prior for first-layer convs.

A filter is the real part of a Gabor function: a Gaussian envelope times a
sinusoidal carrier, evaluated on the filter grid after rotating coordinates
by the orientation. Randomness comes from uniform draws of the five Gabor
parameters; RGB filters additionally scale each channel by a random
coefficient, with a 30% chance of a near-equal ("black & white") triple.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from ..rng import SeededRng

# Hyperprior ranges (all sampled half-open [a, b)).
THETA_RANGE = (0.0, math.pi)
SIGMA_RANGE = (2.0, 10.0)
WAVELENGTH_MIN = 1.0
PSI_RANGE = (-math.pi, math.pi)
GAMMA_RANGE = (0.0, 1.5)
BW_PROBABILITY = 0.3
BW_SCALE_RANGE = (0.8, 1.0)
COLOR_SCALE_RANGE = (-1.0, 1.0)


@dataclass(frozen=True)
class GaborParams:
    """One draw of Gabor parameters plus per-channel color coefficients."""

    theta: float  # orientation, [0, pi)
    sigma: float  # Gaussian envelope scale, pixels
    wavelength: float  # carrier wavelength, pixels, [1, f_w]
    psi: float  # carrier phase, [-pi, pi)
    gamma: float  # spatial aspect ratio, [0, 1.5]
    bw_flag: bool = False  # True: near-equal channel scales
    betas: tuple[float, float, float] = (1.0, 1.0, 1.0)

    def to_dict(self) -> dict:
        return {
            "theta": self.theta,
            "sigma": self.sigma,
            "wavelength": self.wavelength,
            "psi": self.psi,
            "gamma": self.gamma,
            "bw_flag": self.bw_flag,
            "betas": list(self.betas),
        }

    @classmethod
    def from_dict(cls, d: dict) -> "GaborParams":
        return cls(
            theta=d["theta"],
            sigma=d["sigma"],
            wavelength=d["wavelength"],
            psi=d["psi"],
            gamma=d["gamma"],
            bw_flag=d["bw_flag"],
            betas=tuple(d["betas"]),
        )


def sample_gabor_params(rng: SeededRng, f_w: int, color: str = "grayscale") -> GaborParams:
    """Draw one filter's parameters from the uniform hyperpriors.

    For `color="rgb"` a single bw/color split is drawn per filter
    (P(bw) = 0.3), then one scale per channel: U[0.8, 1) for b&w,
    U[-1, 1) for color. Grayscale filters keep unit scales.
    """
    if f_w < 1:
        raise ValueError("f_w must be >= 1")
    if color not in ("grayscale", "rgb"):
        raise ValueError(f"unknown color mode {color!r}")
    gen = rng.generator()
    theta = gen.uniform(*THETA_RANGE)
    sigma = gen.uniform(*SIGMA_RANGE)
    wavelength = gen.uniform(WAVELENGTH_MIN, float(f_w)) if f_w > 1 else 1.0
    psi = gen.uniform(*PSI_RANGE)
    gamma = gen.uniform(*GAMMA_RANGE)
    bw_flag = False
    betas = (1.0, 1.0, 1.0)
    if color == "rgb":
        p_bw = gen.uniform(0.0, 1.0)
        bw_flag = p_bw <= BW_PROBABILITY
        lo, hi = BW_SCALE_RANGE if bw_flag else COLOR_SCALE_RANGE
        betas = tuple(gen.uniform(lo, hi) for _ in range(3))
    return GaborParams(theta, sigma, wavelength, psi, gamma, bw_flag, betas)


def eval_gabor(p: GaborParams, f_w: int, centered: bool = True) -> np.ndarray:
    """Evaluate the filter on an f_w x f_w grid; entry [row, col].

    Grid coordinates are 1..f_w along each axis (x = column, y = row).
    With `centered=True` (default) they are shifted by (f_w + 1)/2 so the
    envelope peaks mid-filter; `centered=False` keeps the literal 1-based
    corner-peaked variant for comparison.
    """
    if f_w % 2 == 0 or f_w < 1:
        raise ValueError("f_w must be odd and >= 1")
    coords = np.arange(1, f_w + 1, dtype=np.float64)
    if centered:
        coords = coords - (f_w + 1) / 2.0
    x = coords[None, :]
    y = coords[:, None]
    x_r = x * math.cos(p.theta) + y * math.sin(p.theta)
    y_r = -x * math.sin(p.theta) + y * math.cos(p.theta)
    envelope = np.exp(-(x_r**2 + p.gamma * y_r**2) / (2.0 * p.sigma**2))
    carrier = np.cos(2.0 * math.pi * x_r / p.wavelength + p.psi)
    return envelope * carrier


def colorize(p: GaborParams, mono: np.ndarray) -> np.ndarray:
    """Scale a single-channel filter into 3 channels: channel i = betas[i] * mono."""
    if mono.ndim != 2:
        raise ValueError(f"mono filter must be 2-D, got shape {mono.shape}")
    return np.stack([b * mono for b in p.betas], axis=0)


def add_filter_noise(rng: SeededRng, filt: np.ndarray, sigma_g: float) -> np.ndarray:
    """Relax the strict Gabor shape with i.i.d. N(0, sigma_g^2) noise."""
    if sigma_g < 0:
        raise ValueError("sigma_g must be >= 0")
    if sigma_g == 0.0:
        return filt.copy()
    gen = rng.generator()
    return filt + gen.normal(0.0, sigma_g, size=filt.shape)


@dataclass
class GaborBank:
    """A sampled first-layer filter bank before moment matching.

    `raw_weights` is (n_filters, in_channels, f_w, f_w) exactly as produced
    by evaluate + colorize + noise; with sigma_g = 0 and grayscale filters it
    reproduces `eval_gabor` of the logged `params` bit-exactly.
    """

    raw_weights: np.ndarray
    params: tuple[GaborParams, ...]


def sample_gabor_bank(
    rng: SeededRng,
    n_filters: int,
    f_w: int,
    in_channels: int,
    sigma_g: float = 0.0,
    centered: bool = True,
) -> GaborBank:
    """Sample a full bank of independent Gabor filters.

    Each filter owns two substreams (parameters, noise) so banks are
    reproducible filter-by-filter regardless of evaluation order.
    """
    if in_channels not in (1, 3):
        raise ValueError(f"Gabor filters support 1 or 3 input channels, got {in_channels}")
    color = "rgb" if in_channels == 3 else "grayscale"
    weights = np.empty((n_filters, in_channels, f_w, f_w), dtype=np.float64)
    params: list[GaborParams] = []
    for i in range(n_filters):
        frng = rng.child(f"filter{i:03d}")
        p = sample_gabor_params(frng.child("params"), f_w, color)
        mono = eval_gabor(p, f_w, centered=centered)
        filt = colorize(p, mono) if color == "rgb" else mono[None, :, :]
        weights[i] = add_filter_noise(frng.child("noise"), filt, sigma_g)
        params.append(p)
    return GaborBank(weights, tuple(params))
