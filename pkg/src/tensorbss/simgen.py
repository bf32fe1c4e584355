"""Latent-series generators, mixing-matrix samplers and the two benchmark settings.

The ARMA setting and the SV (stochastic volatility / GARCH) setting each
define 12 mutually independent scalar component series that fill a
3 x 2 x 2 latent tensor cell-by-cell in the linear layout order (first
index fastest).
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.signal import lfilter

from .tensor import unvectorize

__all__ = [
    "ArmaSpec",
    "GarchSpec",
    "SvSpec",
    "gen_arma",
    "gen_garch",
    "gen_sv",
    "gen_latent_setting",
    "gen_mixing",
    "mix",
    "arma_setting_specs",
    "sv_setting_specs",
    "SETTINGS",
]

BURN_IN = 1000
MAX_MIXING_COND = 1e6


@dataclass
class ArmaSpec:
    """ARMA(p, q) driven by standard normal innovations.

    Empty coefficient vectors give i.i.d. noise.  An entry of
    ("uniform", q) in place of the MA vector requests q coefficients drawn
    fresh from U(-1, 1) at generation time.
    """

    phi: tuple = ()
    theta: tuple = ()
    random_ma_order: int | None = None


@dataclass
class GarchSpec:
    """GARCH(len(alpha), len(beta)); intercept set for unit unconditional variance."""

    alpha: tuple = ()
    beta: tuple = ()

    def __post_init__(self):
        if sum(self.alpha) + sum(self.beta) >= 1:
            raise ValueError("GARCH stationarity requires sum(alpha) + sum(beta) < 1")


@dataclass
class SvSpec:
    """Stochastic volatility with latent log-variance AR(1) and t innovations."""

    mu: float
    phi: float
    sigma: float
    nu: float = np.inf  # inf means Gaussian innovations

    def __post_init__(self):
        if not abs(self.phi) < 1:
            raise ValueError("latent AR parameter must satisfy |phi| < 1")
        if self.sigma <= 0:
            raise ValueError("latent volatility must be positive")
        if not (self.nu > 2 or np.isinf(self.nu)):
            raise ValueError("innovation degrees of freedom must exceed 2 (or be inf)")


def _rescale(x: np.ndarray, center: bool = True) -> np.ndarray:
    if center:
        x = x - x.mean()
    sd = x.std()
    if sd == 0:
        raise ValueError("degenerate (constant) generated series")
    return x / sd


def gen_arma(spec: ArmaSpec, t: int, rng: np.random.Generator) -> np.ndarray:
    """Generate a length-T ARMA series, burn-in discarded, zero mean unit variance."""
    if t < 1:
        raise ValueError("series length must be positive")
    theta = np.asarray(spec.theta, dtype=float)
    if spec.random_ma_order is not None:
        theta = rng.uniform(-1.0, 1.0, spec.random_ma_order)
    phi = np.asarray(spec.phi, dtype=float)
    n = t + BURN_IN
    eps = rng.standard_normal(n)
    x = lfilter(np.r_[1.0, theta], np.r_[1.0, -phi], eps)[BURN_IN:]
    if not np.all(np.isfinite(x)):
        raise ValueError("ARMA recursion diverged (non-stationary parameters?)")
    return _rescale(x)


def gen_garch(spec: GarchSpec, t: int, rng: np.random.Generator) -> np.ndarray:
    """Generate a GARCH series with unit unconditional variance, then rescale."""
    if t < 1:
        raise ValueError("series length must be positive")
    alpha = np.asarray(spec.alpha, dtype=float)
    beta = np.asarray(spec.beta, dtype=float)
    omega = 1.0 - alpha.sum() - beta.sum()
    q, pl = len(alpha), len(beta)
    n = t + BURN_IN
    eps = rng.standard_normal(n)
    y2 = np.ones(q)  # pre-sample squared values at the unconditional variance
    s2 = np.ones(pl)
    y = np.empty(n)
    for k in range(n):
        var = omega
        if q:
            var += alpha @ y2
        if pl:
            var += beta @ s2
        yk = np.sqrt(var) * eps[k]
        y[k] = yk
        if q:
            y2 = np.r_[yk * yk, y2[:-1]]
        if pl:
            s2 = np.r_[var, s2[:-1]]
    y = y[BURN_IN:]
    if not np.all(np.isfinite(y)):
        raise ValueError("GARCH recursion diverged")
    return _rescale(y, center=False)


def gen_sv(spec: SvSpec, t: int, rng: np.random.Generator) -> np.ndarray:
    """Generate a stochastic volatility series, burn-in discarded, unit variance."""
    if t < 1:
        raise ValueError("series length must be positive")
    n = t + BURN_IN
    eta = rng.standard_normal(n)
    h0 = spec.mu + spec.sigma / np.sqrt(1.0 - spec.phi ** 2) * rng.standard_normal()
    # h_t - mu follows AR(1) with coefficient phi and innovations sigma*eta
    dev = lfilter([1.0], [1.0, -spec.phi], spec.sigma * eta,
                  zi=[spec.phi * (h0 - spec.mu)])[0]
    h = spec.mu + dev
    if np.isinf(spec.nu):
        innov = rng.standard_normal(n)
    else:
        # standardized t innovations: unit variance for nu > 2
        innov = rng.standard_t(spec.nu, n) * np.sqrt((spec.nu - 2.0) / spec.nu)
    y = np.exp(0.5 * h) * innov
    y = y[BURN_IN:]
    if not np.all(np.isfinite(y)):
        raise ValueError("SV recursion produced non-finite values")
    return _rescale(y, center=False)


def arma_setting_specs() -> list:
    """The 12 ARMA-setting component models, in cell order."""
    return [
        ArmaSpec(phi=(0.9,)),
        ArmaSpec(phi=(-0.9,)),
        ArmaSpec(theta=(0.5, -0.5)),
        ArmaSpec(phi=(-0.5, -0.3)),
        ArmaSpec(phi=(0.5, -0.3, 0.1, -0.1), theta=(0.7, -0.3)),
        ArmaSpec(phi=(-0.7, 0.1), theta=(0.9, 0.3, 0.1, -0.1)),
        ArmaSpec(random_ma_order=5),
        ArmaSpec(random_ma_order=10),
        ArmaSpec(random_ma_order=20),
        ArmaSpec(random_ma_order=30),
        ArmaSpec(random_ma_order=40),
        ArmaSpec(random_ma_order=50),
    ]


def sv_setting_specs() -> list:
    """The 12 SV-setting component models (6 SV, 6 GARCH), in cell order."""
    return [
        SvSpec(-10.0, 0.98, 0.2, np.inf),
        SvSpec(-5.0, -0.98, 0.2, 10.0),
        SvSpec(-10.0, 0.7, 0.7, np.inf),
        SvSpec(-5.0, -0.70, 0.7, 10.0),
        SvSpec(-9.0, 0.20, 0.01, np.inf),
        SvSpec(-9.0, -0.20, 0.01, 10.0),
        GarchSpec(alpha=(0.7,)),
        GarchSpec(alpha=(0.2,), beta=(0.2,)),
        GarchSpec(alpha=(0.1,), beta=(0.8,)),
        GarchSpec(alpha=(0.20, 0.10, 0.05, 0.01)),
        GarchSpec(alpha=(0.05, 0.03, 0.01), beta=(0.5,)),
        GarchSpec(alpha=(0.20, 0.14, 0.12, 0.10, 0.05, 0.05, 0.04, 0.03, 0.02, 0.01)),
    ]


SETTINGS = {"arma": arma_setting_specs, "sv": sv_setting_specs}


def _gen_component(spec, t: int, rng: np.random.Generator) -> np.ndarray:
    if isinstance(spec, ArmaSpec):
        return gen_arma(spec, t, rng)
    if isinstance(spec, GarchSpec):
        return gen_garch(spec, t, rng)
    if isinstance(spec, SvSpec):
        return gen_sv(spec, t, rng)
    raise TypeError(f"unknown component spec {type(spec).__name__}")


def gen_latent_setting(setting: str, t: int, rng: np.random.Generator,
                       dims=(3, 2, 2)) -> np.ndarray:
    """Generate the latent tensor series for one of the benchmark settings.

    The component models fill the tensor cells in linear-layout order
    (first index fastest); returns shape (T, *dims).
    """
    if setting not in SETTINGS:
        raise ValueError(f"unknown setting {setting!r}; expected one of {sorted(SETTINGS)}")
    specs = SETTINGS[setting]()
    dims = tuple(int(d) for d in dims)
    if int(np.prod(dims)) != len(specs):
        raise ValueError(f"dims {dims} hold {int(np.prod(dims))} cells, "
                         f"setting defines {len(specs)} component models")
    comps = np.column_stack([_gen_component(s, t, rng) for s in specs])
    return np.stack([unvectorize(row, dims) for row in comps])


def gen_mixing(dims, kind: str, rng: np.random.Generator) -> list:
    """Sample one square mixing matrix per mode.

    kind 'gaussian': i.i.d. standard normal entries, resampled while the
    condition number exceeds 1e6.  kind 'haar': Haar-uniform orthogonal
    matrices via QR with the R-diagonal sign correction.
    """
    if kind not in ("gaussian", "haar"):
        raise ValueError(f"unknown mixing kind {kind!r}; expected 'gaussian' or 'haar'")
    mats = []
    for p in dims:
        p = int(p)
        if kind == "gaussian":
            a = rng.standard_normal((p, p))
            while np.linalg.cond(a) > MAX_MIXING_COND:
                a = rng.standard_normal((p, p))
        else:
            q, r = np.linalg.qr(rng.standard_normal((p, p)))
            signs = np.sign(np.diag(r))
            signs[signs == 0] = 1.0
            a = q * signs
        mats.append(a)
    return mats


def mix(zs: np.ndarray, mats) -> np.ndarray:
    """Apply the chained mode products Z x_1 A_1 ... x_r A_r frame-wise."""
    from .tensor import series_mode_product

    out = np.asarray(zs, dtype=float)
    if len(mats) != out.ndim - 1:
        raise ValueError(f"got {len(mats)} mixing matrices for order-{out.ndim - 1} series")
    for m, a in enumerate(mats, start=1):
        out = series_mode_product(out, a, m)
    return out
