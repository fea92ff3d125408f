"""Gaussian secret-key rates and nonparametric mutual-information estimates."""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.spatial import cKDTree
from scipy.special import digamma

from .channel import ChannelStats, ar_covariance, cascade_scale, direct_scale, rb_cross_covariance
from .ris import RisConfig, reflection_coeffs


def gaussian_mi(var_x: float, var_y: float, cov_xy: float) -> float:
    """I(X;Y) in bits for a real bivariate Gaussian; ``inf`` if singular."""
    if var_x < 0 or var_y < 0:
        raise ValueError("variances must be nonnegative")
    if var_x == 0 or var_y == 0:
        return 0.0
    det = var_x * var_y - cov_xy**2
    if det < -1e-12 * var_x * var_y:
        raise ValueError("not a valid covariance (|cov| exceeds the variance product)")
    if det <= 0:
        return math.inf
    return 0.5 * math.log2(var_x * var_y / det)


def complex_gaussian_mi(var_x: float, var_y: float, cov_xy: complex) -> float:
    """I(X;Y) in bits for circularly-symmetric complex Gaussians.

    Twice the real-valued figure at the same correlation magnitude.
    """
    return 2.0 * gaussian_mi(var_x, var_y, abs(cov_xy))


@dataclass(frozen=True, eq=False)
class GaussObsModel:
    """Joint covariance of (x_A, x_B, z).

    ``cov`` is complex for circularly-symmetric observations (rates in bits
    per complex observation) and real otherwise.
    """

    cov: np.ndarray
    noise_var: float = 0.0

    def __post_init__(self):
        c = np.asarray(self.cov)
        if c.shape not in ((2, 2), (3, 3)):
            raise ValueError("cov must be 2x2 or 3x3")
        if not np.allclose(c, c.conj().T, atol=1e-12 * max(1.0, np.abs(c).max())):
            raise ValueError("cov must be Hermitian")
        w = np.linalg.eigvalsh(c)
        if w.min() < -1e-10 * max(1.0, np.abs(w).max()):
            raise ValueError(f"cov is not positive semi-definite (min eigenvalue {w.min():.3g})")
        if self.noise_var < 0:
            raise ValueError("noise_var must be nonnegative")
        object.__setattr__(self, "cov", c)

    @property
    def is_complex(self) -> bool:
        return np.iscomplexobj(self.cov)

    def pair_cov(self) -> np.ndarray:
        """Covariance of (x_A, x_B) conditioned on z (Schur complement)."""
        c = self.cov
        if c.shape == (2, 2):
            return c
        vz = c[2, 2].real
        if vz <= 0:
            return c[:2, :2]
        b = c[:2, 2:3]
        return c[:2, :2] - (b @ b.conj().T) / vz


def _pair_mi(p: np.ndarray, is_complex: bool) -> float:
    va, vb = float(p[0, 0].real), float(p[1, 1].real)
    # clip tiny negative residues from the Schur complement
    va, vb = max(va, 0.0), max(vb, 0.0)
    cab = p[0, 1]
    if is_complex:
        return complex_gaussian_mi(va, vb, cab)
    return gaussian_mi(va, vb, float(cab.real))


def conditional_mi(model: GaussObsModel) -> float:
    """I(x_A; x_B | z) in bits (unconditioned for a 2x2 model)."""
    return _pair_mi(model.pair_cov(), model.is_complex)


def reference_power(stats: ChannelStats) -> float:
    """Mean composite power of the strongest UT under a unit-modulus config.

    This is the power the SNR of the multi-user analysis is referred to; it
    does not depend on the configuration, so curves of different algorithms
    share one noise level.
    """
    g = stats.gains.sum()
    ris = stats.var_ar * g * np.array(stats.var_rb) * cascade_scale(stats) ** 2
    return float(ris.max() + stats.var_direct * direct_scale(stats) ** 2)


def noise_var_for(stats: ChannelStats, snr_db: float) -> float:
    if math.isnan(snr_db) or snr_db == -math.inf:
        raise ValueError(f"invalid SNR {snr_db!r}")
    if snr_db == math.inf:
        return 0.0
    return reference_power(stats) / 10 ** (snr_db / 10)


def cascade_kernels(stats: ChannelStats) -> np.ndarray:
    """(M, M, N, N) array of R_a ⊙ R_b,mm' (gamma calibration included).

    ``Cov(g_m, g_m') = c^T K[m, m'] c^*`` for reflection coefficients ``c``,
    since ``g_m = c^T (h_ar ⊙ h_rb[:, m])``.
    """
    m = stats.n_uts
    ra = ar_covariance(stats)
    s = cascade_scale(stats)
    n = stats.n_elements
    out = np.empty((m, m, n, n), dtype=complex)
    for i in range(m):
        for j in range(m):
            out[i, j] = ra * rb_cross_covariance(stats, i, j) * s[i] * s[j]
    return out


def direct_block(stats: ChannelStats) -> np.ndarray:
    """Direct-link part of the gain covariance.

    Every UT sees the same direct realization, so the block is constant.
    """
    return stats.var_direct * direct_scale(stats) ** 2 * np.ones((stats.n_uts, stats.n_uts))


def gain_covariance(stats: ChannelStats, coeffs: np.ndarray) -> np.ndarray:
    """M x M covariance of the true composite gains g_m under ``coeffs``."""
    k = cascade_kernels(stats)
    c = np.asarray(coeffs, dtype=complex)
    return np.einsum("i,abij,j->ab", c, k, c.conj()) + direct_block(stats)


def _cfg_coeffs(cfg) -> np.ndarray:
    return reflection_coeffs(cfg) if isinstance(cfg, RisConfig) else np.asarray(cfg, dtype=complex)


def observation_cov(stats: ChannelStats, cfg, snr_db: float, ut_m: int, ut_cond: int | None = None) -> GaussObsModel:
    """Complex covariance of (Alice's estimate, UT m's estimate, g_{m'}).

    Both estimates are the true gain g_m plus independent noise; the
    conditioning variable is UT m''s noiseless gain. With ``ut_cond=None``
    a 2x2 model is returned.
    """
    if not 0 <= ut_m < stats.n_uts:
        raise IndexError(f"ut {ut_m} out of range")
    if ut_cond is not None and not 0 <= ut_cond < stats.n_uts:
        raise IndexError(f"ut {ut_cond} out of range")
    nv = noise_var_for(stats, snr_db)
    g = gain_covariance(stats, _cfg_coeffs(cfg))
    v = g[ut_m, ut_m].real
    if ut_cond is None:
        cov = np.array([[v + nv, v], [v, v + nv]], dtype=complex)
    else:
        c = g[ut_m, ut_cond]
        vz = g[ut_cond, ut_cond].real
        cov = np.array([[v + nv, v, c], [v, v + nv, c], [np.conj(c), np.conj(c), vz]], dtype=complex)
    return GaussObsModel(cov, nv)


def rates_from_gain_cov(g: np.ndarray, nv: float) -> np.ndarray | float:
    """Sum over UTs of the worst-case conditional rate, from gain covariance.

    Closed form of :func:`conditional_mi` on the (x_A, x_B, g_m') model:
    with conditional signal variance ``V' = V - |C|^2 / V_z`` the rate is
    ``log2((V' + nv)^2 / ((V' + nv)^2 - V'^2))``. ``g`` is (M, M) or a
    batch (..., M, M); the result has the batch shape.
    """
    g = np.asarray(g)
    m = g.shape[-1]
    v = np.diagonal(g, axis1=-2, axis2=-1).real
    if m == 1:
        vc = v
    else:
        vz = v[..., None, :]
        with np.errstate(divide="ignore", invalid="ignore"):
            expl = np.where(vz > 0, np.abs(g) ** 2 / vz, 0.0)
        vc = v[..., :, None] - expl
        idx = np.arange(m)
        vc[..., idx, idx] = np.inf
        vc = vc.min(axis=-1)
    vc = np.maximum(vc, 0.0)
    if nv == 0.0:
        r = np.where(vc > 0, np.inf, 0.0)
    else:
        s = vc + nv
        r = np.log2(s * s / (nv * (s + vc)))
    out = r.sum(axis=-1)
    return float(out) if out.ndim == 0 else out


def sum_secret_key_rate(stats: ChannelStats, cfg, snr_db: float) -> float:
    """Σ_m min_{m'≠m} I(x_A^m; x_B^m | g_m') in bits per observation."""
    g = gain_covariance(stats, _cfg_coeffs(cfg))
    return rates_from_gain_cov(g, noise_var_for(stats, snr_db))


# ----------------------------------------------------------------------- KSG


def _as_columns(x) -> np.ndarray:
    x = np.asarray(x)
    if np.iscomplexobj(x):
        x = np.stack([x.real, x.imag], axis=-1) if x.ndim == 1 else np.concatenate([x.real, x.imag], axis=1)
    x = np.asarray(x, dtype=float)
    return x[:, None] if x.ndim == 1 else x


def ksg_mi(samples_x, samples_y, k_neighbors: int = 4, *, jitter_seed: int = 0) -> float:
    """Kraskov-Stögbauer-Grassberger estimator (algorithm 1), in bits.

    Complex inputs are split into real and imaginary coordinates. Max-norm
    neighbourhoods; marginal counts use a strict radius. Ties are broken
    by a deterministic jitter of 1e-10 times each coordinate's scale.
    """
    x = _as_columns(samples_x)
    y = _as_columns(samples_y)
    n = x.shape[0]
    if y.shape[0] != n:
        raise ValueError("sample counts differ")
    if k_neighbors < 1:
        raise ValueError("k_neighbors must be >= 1")
    if n < max(50, k_neighbors + 1):
        raise ValueError(f"need at least {max(50, k_neighbors + 1)} samples, got {n}")
    rng = np.random.default_rng(jitter_seed)
    x = x + 1e-10 * (np.std(x, axis=0) + 1e-300) * rng.standard_normal(x.shape)
    y = y + 1e-10 * (np.std(y, axis=0) + 1e-300) * rng.standard_normal(y.shape)
    joint = np.hstack([x, y])
    eps = cKDTree(joint).query(joint, k=k_neighbors + 1, p=np.inf)[0][:, -1]
    r = np.nextafter(eps, 0)
    nx = cKDTree(x).query_ball_point(x, r, p=np.inf, return_length=True) - 1
    ny = cKDTree(y).query_ball_point(y, r, p=np.inf, return_length=True) - 1
    nats = digamma(k_neighbors) + digamma(n) - np.mean(digamma(nx + 1) + digamma(ny + 1))
    return float(nats / math.log(2))
