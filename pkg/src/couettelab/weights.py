"""Time-dependent weight, resonant intervals and the Gevrey multipliers.

For each frequency pair (k, eta) the weight w_k(t, eta) starts flat at
exp(-mu*sqrt(eta)), rises through an exponential-of-quadratic profile on
[sqrt(eta), 2*eta] and settles at 1, with a resonant dip by the factor
k^2/eta across the interval centered at the critical time eta/k.  The
multipliers built on it are

    J  = exp(mu*sqrt|eta|)/w + exp(mu*sqrt|k|)
    Jt = exp(mu*sqrt|eta|)/w
    A  = exp(lambda(t)|k,eta|^s) <k,eta>^sigma J      (At likewise with Jt)

All evaluators accept scalars or arrays and exist in plain and log form;
J and A overflow float64 once mu*sqrt(eta) gets large, so sweeps use the
log variants.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from functools import lru_cache

import numpy as np
from scipy.integrate import quad
from scipy.optimize import brentq

from .grid import GridSpec

__all__ = [
    "WeightParams",
    "ResonantInterval",
    "LambdaProfile",
    "WeightEvaluator",
    "critical_time",
    "critical_interval",
    "weight_nr",
    "weight_value",
    "weight_dt",
    "log_weight_value",
]


@dataclass(frozen=True)
class WeightParams:
    """Constants of the multiplier apparatus.

    c = 1 + 2 * growth_const * beta must land in (3/2, 10); mu defaults to
    4c but can be overridden (plotted weight profiles are far more legible
    with a smaller mu than the working value 4c).
    """

    s: float = 0.6
    sigma: float = 11.0
    lam0: float = 0.8
    lam_inf: float = 0.4  # lambda'
    beta: float = 0.25
    growth_const: float = 1.6
    delta_lam: float | None = None
    mu_override: float | None = None

    def __post_init__(self) -> None:
        if not 0.5 < self.s <= 1.0:
            raise ValueError("s must lie in (1/2, 1]")
        if self.sigma <= 10.0:
            raise ValueError("sigma must exceed 10")
        if not self.lam0 > self.lam_inf > 0.0:
            raise ValueError("need lam0 > lam_inf > 0")
        if not 0.0 < self.beta < 0.5:
            raise ValueError("beta must lie in (0, 1/2)")
        if self.growth_const <= 0.0:
            raise ValueError("growth_const must be positive")
        if not 1.5 < self.c < 10.0:
            raise ValueError(f"c = 1 + 2*C*beta = {self.c} outside (3/2, 10)")
        if self.mu_override is not None and self.mu_override <= 0.0:
            raise ValueError("mu must be positive")
        if self.delta_lam is not None and self.delta_lam <= 0.0:
            raise ValueError("delta_lam must be positive")

    @property
    def c(self) -> float:
        return 1.0 + 2.0 * self.growth_const * self.beta

    @property
    def mu(self) -> float:
        return 4.0 * self.c if self.mu_override is None else self.mu_override

    def with_mu(self, mu: float) -> "WeightParams":
        return replace(self, mu_override=mu)


@dataclass(frozen=True)
class ResonantInterval:
    """Critical time window of mode (k, eta); kind is 'I', 'Itilde' or 'empty'."""

    k: int
    eta: float
    t_lo: float
    t_hi: float
    kind: str

    @property
    def empty(self) -> bool:
        return self.kind == "empty"

    def contains(self, t: float) -> bool:
        return (not self.empty) and self.t_lo <= t <= self.t_hi


def _resonant_k_max(eta: float) -> int:
    # floor(sqrt(eta)) with a guard so exact squares are not lost to roundoff
    return int(np.floor(np.sqrt(eta) + 1e-9))


def critical_time(k: int, eta: float) -> float:
    """t_{k, eta} = eta/k - eta/(2k(k+1)); by convention t_{0, eta} = 2*eta."""
    if eta < 0:
        raise ValueError("critical_time expects eta >= 0")
    if k == 0:
        return 2.0 * eta
    k = abs(k)
    return eta / k - eta / (2.0 * k * (k + 1))


def critical_interval(k: int, eta: float, kind: str = "I") -> ResonantInterval:
    """Resonant window around eta/k, or the empty interval.

    Nonempty needs eta*k >= 0 and 1 <= |k| <= floor(sqrt(|eta|)).  kind 'I'
    gives [t_{|k|,eta}, t_{|k|-1,eta}], kind 'Itilde' the symmetric window
    eta/k -+ eta/k^2.
    """
    if kind not in ("I", "Itilde"):
        raise ValueError("kind must be 'I' or 'Itilde'")
    a_eta = abs(eta)
    a_k = abs(k)
    if k == 0 or eta * k < 0 or a_k > _resonant_k_max(a_eta):
        return ResonantInterval(k, eta, np.nan, np.nan, "empty")
    if kind == "I":
        lo = critical_time(a_k, a_eta)
        hi = critical_time(a_k - 1, a_eta)
    else:
        center = a_eta / a_k
        half = a_eta / a_k**2
        lo, hi = center - half, center + half
    return ResonantInterval(k, eta, lo, hi, kind)


# ---------------------------------------------------------------------------
# The weight and its time derivative (vectorized cores)
# ---------------------------------------------------------------------------

def _fold_symmetry(k, eta):
    """Apply w_k(t, eta) = w_{-k}(t, -eta): reduce to eta >= 0."""
    k = np.asarray(k, dtype=float)
    eta = np.asarray(eta, dtype=float)
    sign = np.where(eta < 0, -1.0, 1.0)
    return k * sign, eta * sign


def _log_nr(t, eta, mu):
    """log w_NR on [sqrt(eta), 2 eta]; callers handle the flat branches."""
    rt = np.sqrt(eta)
    span = 2.0 * eta - rt
    return -mu * (rt - rt * ((t - rt) / span) ** 2)


def _resonance_geometry(k, eta):
    """Resonant center/edges for eta >= 0; k already sign-folded.

    Returns (resonant mask, center, lo, hi, a_left, a_right).  The left
    edge is clipped to sqrt(eta) so the resonant branch never reaches into
    the flat region; the slope on the clipped side is re-fitted so the
    weight stays continuous there.
    """
    with np.errstate(divide="ignore", invalid="ignore"):
        kk = np.where(k >= 1, k, 1.0)
        kmax = np.floor(np.sqrt(eta) + 1e-9)
        res = (k >= 1) & (k <= kmax) & (eta > 1.0)
        center = eta / kk
        half = eta / kk**2
        rt = np.sqrt(np.maximum(eta, 0.0))
        lo = np.maximum(rt, center - half)
        hi = center + half
        gamma = eta / kk**2
        a_right = np.where(gamma > 0, (gamma - 1.0) / gamma, 0.0)
        d_left = center - lo
        a_left = np.where(d_left > 0, (gamma - 1.0) / np.where(d_left > 0, d_left, 1.0), 0.0)
    return res, center, lo, hi, a_left, a_right


def log_weight_value(k, t, eta, mu: float):
    """log w_k(t, eta), exact in log space (no underflow for large eta)."""
    k, eta = _fold_symmetry(k, eta)
    t = np.asarray(t, dtype=float)
    k, t, eta = np.broadcast_arrays(k, t, eta)
    out = np.zeros(k.shape, dtype=float)

    active = eta > 1.0
    if not np.any(active):
        return out if out.shape else float(out)

    rt = np.sqrt(np.where(active, eta, 1.0))
    flat_lo = active & (t < rt)
    settled = active & (t > 2.0 * eta)
    mid = active & ~flat_lo & ~settled

    out[flat_lo] = -mu * rt[flat_lo]
    # settled branch stays 0 = log 1
    if np.any(mid):
        log_nr = _log_nr(t[mid], eta[mid], mu)
        res, center, lo, hi, a_l, a_r = _resonance_geometry(k[mid], eta[mid])
        inside = res & (t[mid] >= lo) & (t[mid] <= hi)
        tau = t[mid] - center
        a = np.where(tau >= 0, a_r, a_l)
        kk = np.where(k[mid] >= 1, k[mid], 1.0)
        log_factor = np.zeros_like(log_nr)
        log_factor[inside] = (
            np.log(kk[inside] ** 2 / eta[mid][inside])
            + np.log1p(a[inside] * np.abs(tau[inside]))
        )
        out[mid] = log_nr + log_factor
    if out.shape == ():
        return float(out)
    return out


def weight_value(k, t, eta, mu: float):
    """The weight w_k(t, eta) in (0, 1]."""
    res = np.exp(log_weight_value(k, t, eta, mu))
    return float(res) if np.ndim(res) == 0 else res


def weight_nr(t, eta, mu: float):
    """Non-resonant envelope w_NR(t, eta) including the flat branches."""
    t = np.asarray(t, dtype=float)
    eta = np.abs(np.asarray(eta, dtype=float))
    t, eta = np.broadcast_arrays(t, eta)
    out = np.ones(t.shape, dtype=float)
    active = eta > 1.0
    rt = np.sqrt(np.where(active, eta, 1.0))
    flat_lo = active & (t < rt)
    mid = active & (t >= rt) & (t <= 2.0 * eta)
    out[flat_lo] = np.exp(-mu * rt[flat_lo])
    out[mid] = np.exp(_log_nr(t[mid], eta[mid], mu))
    if out.shape == ():
        return float(out)
    return out


def weight_dt(k, t, eta, mu: float):
    """Analytic time derivative of w_k(t, eta).

    Zero on the flat branches; on the resonant window the derivative of the
    dip prefactor is included, so the value is negative while t approaches
    the critical time from the left.
    """
    k, eta = _fold_symmetry(k, eta)
    t = np.asarray(t, dtype=float)
    k, t, eta = np.broadcast_arrays(k, t, eta)
    out = np.zeros(k.shape, dtype=float)

    active = eta > 1.0
    rt = np.sqrt(np.where(active, eta, 1.0))
    mid = active & (t >= rt) & (t <= 2.0 * eta)
    if np.any(mid):
        tm, em, km = t[mid], eta[mid], k[mid]
        rtm = rt[mid]
        span = 2.0 * em - rtm
        w_nr = np.exp(_log_nr(tm, em, mu))
        dlog_nr = 2.0 * mu * rtm * (tm - rtm) / span**2
        res, center, lo, hi, a_l, a_r = _resonance_geometry(km, em)
        inside = res & (tm >= lo) & (tm <= hi)
        tau = tm - center
        a = np.where(tau >= 0, a_r, a_l)
        kk = np.where(km >= 1, km, 1.0)
        pref = (kk**2 / em) * (1.0 + a * np.abs(tau))
        dpref = (kk**2 / em) * a * np.sign(tau)
        val_nr = w_nr * dlog_nr
        val_res = dpref * w_nr + pref * val_nr
        out[mid] = np.where(inside, val_res, val_nr)
    if out.shape == ():
        return float(out)
    return out


# ---------------------------------------------------------------------------
# lambda(t)
# ---------------------------------------------------------------------------

class LambdaProfile:
    """Solution of the regularity-radius ODE.

    lambda(t) is constant 3/4 lam0 + 1/4 lam_inf up to t = 1 and then decays
    following  d lambda/dt = -delta * (1 + lambda) / <t>^(2s),  integrated in
    closed form through the quadrature of <tau>^(-2s).  Construction fails if
    delta is large enough for lambda to cross (lam0 + lam_inf)/2 at a finite
    horizon, which is reported in the error.
    """

    def __init__(self, params: WeightParams):
        self.params = params
        self.lam1 = 0.75 * params.lam0 + 0.25 * params.lam_inf
        self.floor = 0.5 * (params.lam0 + params.lam_inf)
        s = params.s
        self._integrand = lambda tau: (1.0 + tau * tau) ** (-s)
        tail, _ = quad(self._integrand, 1.0, np.inf)
        self._total_integral = tail
        budget = np.log((1.0 + self.lam1) / (1.0 + self.floor))
        delta_max = budget / tail
        if params.delta_lam is None:
            delta = min((params.lam0 - params.lam_inf) * s / 8.0, 0.9 * delta_max)
        else:
            delta = params.delta_lam
            if delta >= delta_max:
                horizon = self._crossing_time(delta, budget)
                raise ValueError(
                    f"delta_lam={delta} drives lambda below "
                    f"(lam0+lam_inf)/2={self.floor} at t~={horizon:.6g}"
                )
        self.delta = delta

    def _crossing_time(self, delta: float, budget: float) -> float:
        target = budget / delta
        if target >= self._total_integral:
            return np.inf
        fn = lambda T: quad(self._integrand, 1.0, T)[0] - target
        hi = 2.0
        while fn(hi) < 0:
            hi *= 2.0
        return brentq(fn, 1.0, hi)

    @lru_cache(maxsize=65536)
    def _accumulated(self, t: float) -> float:
        val, _ = quad(self._integrand, 1.0, t)
        return val

    def value(self, t: float) -> float:
        if t <= 1.0:
            return self.lam1
        return (1.0 + self.lam1) * np.exp(-self.delta * self._accumulated(float(t))) - 1.0

    def values(self, t) -> np.ndarray:
        """Vectorized value(); quadrature runs once per distinct time."""
        t = np.asarray(t, dtype=float)
        uniq, inverse = np.unique(t, return_inverse=True)
        vals = np.array([self.value(float(u)) for u in uniq])
        return vals[inverse].reshape(t.shape)

    def derivative(self, t: float) -> float:
        if t <= 1.0:
            return 0.0
        s = self.params.s
        return -self.delta * (1.0 + self.value(t)) / (1.0 + t * t) ** s

    def limit(self) -> float:
        return (1.0 + self.lam1) * np.exp(-self.delta * self._total_integral) - 1.0


# ---------------------------------------------------------------------------
# Bundled evaluator
# ---------------------------------------------------------------------------

class WeightEvaluator:
    """Pure evaluator for w, dt w, J, Jt, A, At and lambda(t).

    Lattice evaluation caches static geometry per grid so the simulation can
    reweight every report step cheaply.
    """

    def __init__(self, params: WeightParams | None = None):
        self.params = params if params is not None else WeightParams()
        self.lam = LambdaProfile(self.params)
        self._lattice_cache: dict = {}

    @property
    def mu(self) -> float:
        return self.params.mu

    # -- scalar/array evaluators ------------------------------------------
    def w(self, k, t, eta):
        return weight_value(k, t, eta, self.mu)

    def dt_w(self, k, t, eta):
        return weight_dt(k, t, eta, self.mu)

    def log_w(self, k, t, eta):
        return log_weight_value(k, t, eta, self.mu)

    def log_J(self, k, t, eta):
        k_arr = np.asarray(k, dtype=float)
        eta_arr = np.asarray(eta, dtype=float)
        log_w = log_weight_value(k, t, eta, self.mu)
        a = self.mu * np.sqrt(np.abs(eta_arr)) - log_w
        b = self.mu * np.sqrt(np.abs(k_arr)) * np.ones_like(a)
        return np.logaddexp(a, b)

    def log_Jtilde(self, k, t, eta):
        eta_arr = np.asarray(eta, dtype=float)
        return self.mu * np.sqrt(np.abs(eta_arr)) - log_weight_value(k, t, eta, self.mu)

    def J(self, k, t, eta):
        res = np.exp(self.log_J(k, t, eta))
        return float(res) if np.ndim(res) == 0 else res

    def Jtilde(self, k, t, eta):
        res = np.exp(self.log_Jtilde(k, t, eta))
        return float(res) if np.ndim(res) == 0 else res

    def _log_gevrey_part(self, k, t, eta):
        k_arr = np.asarray(k, dtype=float)
        eta_arr = np.asarray(eta, dtype=float)
        mag = np.abs(k_arr) + np.abs(eta_arr)
        lam_t = self.lam.value(float(t)) if np.ndim(t) == 0 else self.lam.values(t)
        p = self.params
        return lam_t * mag**p.s + p.sigma * 0.5 * np.log1p(mag**2)

    def log_A(self, k, t, eta):
        return self._log_gevrey_part(k, t, eta) + self.log_J(k, t, eta)

    def log_Atilde(self, k, t, eta):
        return self._log_gevrey_part(k, t, eta) + self.log_Jtilde(k, t, eta)

    def A(self, k, t, eta):
        res = np.exp(self.log_A(k, t, eta))
        return float(res) if np.ndim(res) == 0 else res

    def Atilde(self, k, t, eta):
        res = np.exp(self.log_Atilde(k, t, eta))
        return float(res) if np.ndim(res) == 0 else res

    def multiplier(self, which: str, k, t, eta):
        table = {"J": self.J, "Jtilde": self.Jtilde, "A": self.A, "Atilde": self.Atilde}
        if which not in table:
            raise ValueError(f"unknown multiplier {which!r}")
        return table[which](k, t, eta)

    def lambda_of_t(self, t: float) -> float:
        return self.lam.value(t)

    def lambda_dot(self, t: float) -> float:
        return self.lam.derivative(t)

    # -- lattice evaluation -----------------------------------------------
    def lattice_arrays(self, grid: GridSpec, t: float):
        """(w, dt_w, A, At) arrays on the grid lattice at time t."""
        key = grid
        if key not in self._lattice_cache:
            self._lattice_cache[key] = (grid.k_grid, grid.eta_grid)
        kg, eg = self._lattice_cache[key]
        w = weight_value(kg, t, eg, self.mu)
        dtw = weight_dt(kg, t, eg, self.mu)
        log_j = self.log_J(kg, t, eg)
        p = self.params
        lam_t = self.lam.value(float(t))
        log_gev = lam_t * grid.abs_l1**p.s + 0.5 * p.sigma * np.log(grid.bracket_sq)
        A = np.exp(log_gev + log_j)
        At = np.exp(log_gev + self.mu * np.sqrt(np.abs(eg)) - log_weight_value(kg, t, eg, self.mu))
        return w, dtw, A, At
