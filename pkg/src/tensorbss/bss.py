"""Whitening plus joint diagonalization: the ten unmixing estimators.

Vector path: SOBI, gFOBI, gJADE and the lag-{0} special cases FOBI, JADE.
Tensor path: TSOBI, TgFOBI, TgJADE and TFOBI, TJADE.

The tensor pipeline is one-pass: center, estimate all mode covariances,
standardize from every mode simultaneously, build the per-mode matrix
sets from the same standardized series, diagonalize each mode, and form
the per-mode unmixers Gamma^m = U_m^T (Sigma_0^m)^{-1/2}.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import moments
from .linalg import JointDiagResult, RankDeficiencyError, joint_diagonalize, sym_inv_sqrt
from .tensor import center, series_mode_product

__all__ = [
    "METHOD_NAMES",
    "MethodConfig",
    "UnmixingResult",
    "method_config",
    "whiten_vector",
    "whiten_tensor",
    "unmix_vector",
    "unmix_tensor",
    "unmix",
    "apply_unmixing",
]

DEFAULT_SOBI_LAGS = tuple(range(1, 13))
DEFAULT_G_LAGS = tuple(range(0, 13))

# method name -> (family, tensor path?, default lags)
METHOD_NAMES = {
    "sobi": ("sobi", False, DEFAULT_SOBI_LAGS),
    "gfobi": ("gfobi", False, DEFAULT_G_LAGS),
    "gjade": ("gjade", False, DEFAULT_G_LAGS),
    "fobi": ("gfobi", False, (0,)),
    "jade": ("gjade", False, (0,)),
    "tsobi": ("sobi", True, DEFAULT_SOBI_LAGS),
    "tgfobi": ("gfobi", True, DEFAULT_G_LAGS),
    "tgjade": ("gjade", True, DEFAULT_G_LAGS),
    "tfobi": ("gfobi", True, (0,)),
    "tjade": ("gjade", True, (0,)),
}


@dataclass
class MethodConfig:
    """Which moment family to diagonalize and over which lags."""

    family: str  # sobi | gfobi | gjade
    lags: tuple
    tol: float = 1e-12
    max_sweeps: int = 100
    half_pairs: bool = False  # gjade only: use i <= j instead of all (i, j)

    def __post_init__(self):
        if self.family not in ("sobi", "gfobi", "gjade"):
            raise ValueError(f"unknown method family {self.family!r}")
        lags = tuple(sorted(set(int(v) for v in self.lags)))
        if not lags or any(v < 0 for v in lags):
            raise ValueError("lag set must be a non-empty set of non-negative integers")
        if self.family == "sobi" and 0 in lags:
            raise ValueError("the sobi family uses lags >= 1")
        self.lags = lags


def method_config(name: str, lags=None, **kwargs) -> tuple[MethodConfig, bool]:
    """Resolve one of the ten method names to (config, uses tensor path)."""
    key = name.lower()
    if key not in METHOD_NAMES:
        raise ValueError(f"unknown method {name!r}; expected one of {sorted(METHOD_NAMES)}")
    family, tensor_path, default_lags = METHOD_NAMES[key]
    if lags is None:
        lags = default_lags
    elif key in ("fobi", "jade", "tfobi", "tjade") and tuple(lags) != (0,):
        raise ValueError(f"{name} is defined by the lag set {{0}}")
    return MethodConfig(family=family, lags=tuple(lags), **kwargs), tensor_path


@dataclass
class UnmixingResult:
    """Per-mode unmixers and the recovered series for one fitted method."""

    mode_unmixers: list  # Gamma^m = U_m^T W_m, one per mode
    rotations: list  # U_m
    whiteners: list  # W_m = (Sigma_0^m)^{-1/2}
    mean: np.ndarray  # training temporal mean frame
    recovered: np.ndarray
    diagnostics: dict = field(default_factory=dict)


def whiten_vector(xs: np.ndarray):
    """Whiten a centered vector series; returns (whitened, W = Sigma_0^{-1/2})."""
    xs = np.asarray(xs, dtype=float)
    w = sym_inv_sqrt(moments.sigma_tau(xs, 0, symmetrize=True))
    return xs @ w.T, w


def whiten_tensor(xs: np.ndarray):
    """Simultaneously standardize a centered tensor series from all modes.

    All mode covariances are estimated from the input series; the
    standardization is not re-estimated between modes.
    """
    xs = np.asarray(xs, dtype=float)
    r = xs.ndim - 1
    whiteners = []
    for m in range(1, r + 1):
        try:
            whiteners.append(sym_inv_sqrt(moments.mode_cov(xs, m)))
        except RankDeficiencyError as exc:
            raise RankDeficiencyError(f"mode {m}: {exc}") from exc
    out = xs
    for m, w in enumerate(whiteners, start=1):
        out = series_mode_product(out, w, m)
    return out, whiteners


def _vector_matrix_set(ys: np.ndarray, cfg: MethodConfig) -> list:
    p = ys.shape[1]
    mats = []
    if cfg.family == "sobi":
        for tau in cfg.lags:
            mats.append(moments.sigma_tau(ys, tau, symmetrize=True))
    elif cfg.family == "gfobi":
        for tau in cfg.lags:
            mats.append(moments.b_tau(ys, tau))
    else:
        for tau in cfg.lags:
            grid = moments.b_tau_grid(ys, tau)
            s = moments.sigma_tau(ys, tau)
            for i in range(1, p + 1):
                jstart = i if cfg.half_pairs else 1
                for j in range(jstart, p + 1):
                    mats.append(moments._c_from_parts(grid[i - 1, j - 1], s, i, j, p))
    return mats


def _mode_matrix_set(ys: np.ndarray, mode: int, cfg: MethodConfig) -> list:
    mats = []
    if cfg.family == "sobi":
        for tau in cfg.lags:
            mats.append(moments.mode_autocov(ys, mode, tau, symmetrize=True))
    elif cfg.family == "gfobi":
        for tau in cfg.lags:
            mats.append(moments.mode_b_tau(ys, mode, tau))
    else:
        for tau in cfg.lags:
            grid = moments.mode_c_grid(ys, mode, tau)
            p = grid.shape[0]
            for i in range(1, p + 1):
                jstart = i if cfg.half_pairs else 1
                for j in range(jstart, p + 1):
                    mats.append(grid[i - 1, j - 1])
    return mats


def unmix_vector(xs: np.ndarray, cfg: MethodConfig) -> UnmixingResult:
    """Fit a vector method: center, whiten, diagonalize the family's matrix set."""
    xs = np.asarray(xs, dtype=float)
    if xs.ndim != 2:
        raise ValueError("vector methods expect a series of shape (T, p)")
    if xs.shape[0] <= max(cfg.lags):
        raise ValueError("series shorter than the largest lag")
    mean = xs.mean(axis=0)
    xc = xs - mean
    ys, w = whiten_vector(xc)
    res = joint_diagonalize(_vector_matrix_set(ys, cfg), tol=cfg.tol,
                            max_sweeps=cfg.max_sweeps)
    gamma = res.rotation.T @ w
    return UnmixingResult(
        mode_unmixers=[gamma],
        rotations=[res.rotation],
        whiteners=[w],
        mean=mean,
        recovered=xc @ gamma.T,
        diagnostics={"joint_diag": [_diag_summary(res)]},
    )


def unmix_tensor(xs: np.ndarray, cfg: MethodConfig) -> UnmixingResult:
    """Fit a tensor method over all modes (the one-pass tensor pipeline)."""
    xs = np.asarray(xs, dtype=float)
    if xs.ndim < 2:
        raise ValueError("tensor methods expect a series of shape (T, p_1, ..., p_r)")
    if xs.shape[0] <= max(cfg.lags):
        raise ValueError("series shorter than the largest lag")
    r = xs.ndim - 1
    mean = xs.mean(axis=0)
    xc = xs - mean
    ys, whiteners = whiten_tensor(xc)
    rotations = []
    gammas = []
    diag_info = []
    out = ys
    for m in range(1, r + 1):
        res = joint_diagonalize(_mode_matrix_set(ys, m, cfg), tol=cfg.tol,
                                max_sweeps=cfg.max_sweeps)
        rotations.append(res.rotation)
        gammas.append(res.rotation.T @ whiteners[m - 1])
        diag_info.append(_diag_summary(res))
        out = series_mode_product(out, res.rotation.T, m)
    return UnmixingResult(
        mode_unmixers=gammas,
        rotations=rotations,
        whiteners=whiteners,
        mean=mean,
        recovered=out,
        diagnostics={"joint_diag": diag_info},
    )


def unmix(xs: np.ndarray, method: str, lags=None, **kwargs) -> UnmixingResult:
    """Fit one of the ten methods by name.

    Vector methods applied to tensor input operate on the vectorized frames.
    """
    from .tensor import series_components

    cfg, tensor_path = method_config(method, lags, **kwargs)
    xs = np.asarray(xs, dtype=float)
    if tensor_path:
        return unmix_tensor(xs, cfg)
    if xs.ndim > 2:
        xs = series_components(xs)
    return unmix_vector(xs, cfg)


def apply_unmixing(xs: np.ndarray, result: UnmixingResult) -> np.ndarray:
    """Apply a fitted unmixing to a series of the same frame shape."""
    xs = np.asarray(xs, dtype=float)
    if xs.shape[1:] != result.mean.shape and not (
        result.mean.ndim == 0 and xs.ndim == 1
    ):
        raise ValueError(
            f"frame shape {xs.shape[1:]} does not match fitted shape {result.mean.shape}"
        )
    out = xs - result.mean
    if out.ndim == 2 and len(result.mode_unmixers) == 1:
        return out @ result.mode_unmixers[0].T
    for m, gamma in enumerate(result.mode_unmixers, start=1):
        out = series_mode_product(out, gamma, m)
    return out


def _diag_summary(res: JointDiagResult) -> dict:
    return {
        "objective": res.objective,
        "sweeps_used": res.sweeps_used,
        "converged": res.converged,
    }
