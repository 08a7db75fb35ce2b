"""Two-mode echo toy model and its growth envelopes.

The resonant/non-resonant pair evolves in the shifted time tau = t - eta/k:

    f_R'  = (beta / gamma) * f_NR
    f_NR' = beta * gamma / (1 + tau^2) * f_R

with gamma = |eta| / k^2 >= 1 and canonical data f_R = f_NR = 1 at
tau = -gamma.  Crossing the window [-gamma, gamma] amplifies both
components; the envelopes bound the transient by powers of
(1 + |tau|) / gamma with exponent growth_const * beta.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

__all__ = [
    "ToyParams",
    "ToyTrajectory",
    "EnvelopeReport",
    "MaxGrowth",
    "toy_integrate",
    "growth_envelope",
    "max_growth",
]


@dataclass(frozen=True)
class ToyParams:
    # growth_const defaults to the measured universal constant of the pair
    # dynamics (~0.4); the weight regime fixes its own larger value so that
    # 1 + 2*C*beta stays above 3/2.
    beta: float
    gamma: float
    growth_const: float = 0.4

    def __post_init__(self) -> None:
        if not 0.0 <= self.beta < 0.5:
            raise ValueError("beta must lie in [0, 1/2)")
        if self.gamma < 1.0:
            raise ValueError("gamma = eta/k^2 must be >= 1")
        if self.growth_const <= 0.0:
            raise ValueError("growth_const must be positive")


@dataclass
class ToyTrajectory:
    params: ToyParams
    tau: np.ndarray
    f_r: np.ndarray
    f_nr: np.ndarray

    def at(self, tau: float) -> tuple[float, float]:
        i = int(np.argmin(np.abs(self.tau - tau)))
        return float(self.f_r[i]), float(self.f_nr[i])


def _rhs(tau: float, y: np.ndarray, beta: float, gamma: float) -> np.ndarray:
    fr, fnr = y
    return np.array([beta / gamma * fnr, beta * gamma / (1.0 + tau * tau) * fr])


def toy_integrate(
    params: ToyParams,
    tau0: float | None = None,
    tau1: float | None = None,
    f_r0: float = 1.0,
    f_nr0: float = 1.0,
    step: float | None = None,
) -> ToyTrajectory:
    """Classical 4th-order integration with fixed step (default gamma/2048)."""
    if f_r0 <= 0.0 or f_nr0 <= 0.0:
        raise ValueError("initial data must be positive")
    g = params.gamma
    if tau0 is None:
        tau0 = -g
    if tau1 is None:
        tau1 = g
    if not tau0 < tau1:
        raise ValueError("need tau0 < tau1")
    if step is None:
        step = g / 2048.0
    if step <= 0.0:
        raise ValueError("step must be positive")
    n = max(2, int(math.ceil((tau1 - tau0) / step)))
    h = (tau1 - tau0) / n
    tau = tau0 + h * np.arange(n + 1)
    ys = np.empty((n + 1, 2))
    y = np.array([f_r0, f_nr0])
    ys[0] = y
    b, gam = params.beta, g
    for i in range(n):
        t = tau[i]
        k1 = _rhs(t, y, b, gam)
        k2 = _rhs(t + 0.5 * h, y + 0.5 * h * k1, b, gam)
        k3 = _rhs(t + 0.5 * h, y + 0.5 * h * k2, b, gam)
        k4 = _rhs(t + h, y + h * k3, b, gam)
        y = y + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
        ys[i + 1] = y
    return ToyTrajectory(params, tau, ys[:, 0], ys[:, 1])


@dataclass
class EnvelopeReport:
    params: ToyParams
    # smallest prefactors that keep each transient bound valid on its half-window
    c_r_neg: float
    c_nr_neg: float
    c_r_pos: float
    c_nr_pos: float
    c_overall: float
    amplification: float
    ratio_at_zero: float  # gamma * f_R(0) / f_NR(0), ~ 1 when the pair balances
    c_nr_vs_r: float  # f_NR <= C * gamma/(1+|tau|) * f_R on tau < 0
    conserved_monotone: bool

    def fitted(self) -> dict[str, float]:
        return {
            "c_r_neg": self.c_r_neg,
            "c_nr_neg": self.c_nr_neg,
            "c_r_pos": self.c_r_pos,
            "c_nr_pos": self.c_nr_pos,
            "c_overall": self.c_overall,
        }


def growth_envelope(params: ToyParams, traj: ToyTrajectory) -> EnvelopeReport:
    """Fit the minimal constants for the four transient bounds.

    With cb = growth_const * beta the bounds read

        f_R  <= C ((1+|tau|)/gamma)^(-cb)        on tau <= 0
        f_NR <= C ((1+|tau|)/gamma)^(-cb-1)      on tau <= 0
        f_R  <= C gamma^cb (1+tau)^(cb+1)        on tau >= 0
        f_NR <= C gamma^(cb+1) (1+tau)^cb        on tau >= 0

    and the overall amplification max(f_R, f_NR)(gamma) <= C gamma^(1+2cb).
    """
    if traj.params != params:
        raise ValueError("trajectory was produced with different parameters")
    if abs(traj.tau[0] + params.gamma) > 1e-9 or not (
        abs(traj.f_r[0] - 1.0) < 1e-12 and abs(traj.f_nr[0] - 1.0) < 1e-12
    ):
        raise ValueError("envelopes expect canonical data f_R = f_NR = 1 at tau = -gamma")
    g = params.gamma
    cb = params.growth_const * params.beta
    tau = traj.tau
    neg = tau <= 0.0
    pos = tau >= 0.0
    scaled = (1.0 + np.abs(tau)) / g

    c_r_neg = float(np.max(traj.f_r[neg] * scaled[neg] ** cb))
    c_nr_neg = float(np.max(traj.f_nr[neg] * scaled[neg] ** (cb + 1.0)))
    c_r_pos = float(np.max(traj.f_r[pos] / (g**cb * (1.0 + tau[pos]) ** (cb + 1.0))))
    c_nr_pos = float(np.max(traj.f_nr[pos] / (g ** (cb + 1.0) * (1.0 + tau[pos]) ** cb)))

    amp = float(max(traj.f_r[-1], traj.f_nr[-1]))
    c_overall = amp / g ** (1.0 + 2.0 * cb)

    i0 = int(np.argmin(np.abs(tau)))
    ratio0 = g * traj.f_r[i0] / traj.f_nr[i0]

    with np.errstate(divide="ignore"):
        c_nr_vs_r = float(
            np.max(traj.f_nr[neg] * (1.0 + np.abs(tau[neg])) / (g * traj.f_r[neg]))
        )

    # (gamma/beta) f_R^2 - ((1+tau^2)/(beta gamma)) f_NR^2 is nondecreasing on tau < 0
    monotone = True
    if params.beta > 0.0:
        q = (g / params.beta) * traj.f_r[neg] ** 2 - (
            (1.0 + tau[neg] ** 2) / (params.beta * g)
        ) * traj.f_nr[neg] ** 2
        monotone = bool(np.all(np.diff(q) >= -1e-7 * np.maximum(np.abs(q[:-1]), 1.0)))

    return EnvelopeReport(
        params=params,
        c_r_neg=c_r_neg,
        c_nr_neg=c_nr_neg,
        c_r_pos=c_r_pos,
        c_nr_pos=c_nr_pos,
        c_overall=c_overall,
        amplification=amp,
        ratio_at_zero=float(ratio0),
        c_nr_vs_r=c_nr_vs_r,
        conserved_monotone=monotone,
    )


@dataclass(frozen=True)
class MaxGrowth:
    eta: float
    c: float
    log_m_g: float
    m_g: float
    envelope_ratio: float

    @property
    def mu(self) -> float:
        return 4.0 * self.c


def max_growth(eta: float, c: float) -> MaxGrowth:
    """Accumulated worst-case growth (sqrt(eta)^N / N!)^(2c), N = floor(sqrt(eta)).

    Everything is computed in log space, so eta up to 1e6 and beyond is fine;
    envelope_ratio = M_G * eta^(mu/8) * exp(-(mu/2) sqrt(eta)) with mu = 4c is
    the Stirling-normalized value, bounded uniformly in eta.
    """
    if eta < 1.0:
        raise ValueError("eta must be >= 1")
    # the weight regime pins c to (3/2, 10); the growth formula itself is
    # also used with smaller visualization values, so only sanity-check here
    if not 0.0 < c < 10.0:
        raise ValueError("c must lie in (0, 10)")
    n = int(math.floor(math.sqrt(eta) + 1e-9))
    log_mg = 2.0 * c * (n * 0.5 * math.log(eta) - math.lgamma(n + 1.0))
    mu = 4.0 * c
    log_ratio = log_mg + (mu / 8.0) * math.log(eta) - (mu / 2.0) * math.sqrt(eta)
    m_g = math.exp(log_mg) if log_mg < 700.0 else math.inf
    return MaxGrowth(eta=eta, c=c, log_m_g=log_mg, m_g=m_g, envelope_ratio=math.exp(log_ratio))
