"""Pseudo-spectral integration of the zero-mean system in the sheared frame.

The vorticity in the moving frame obeys  dt f = -(u . grad f)  with
u = (-d_y phi, d_z phi) and the sheared inversion
phi_hat = -f_hat / (k^2 + (eta - k t)^2) for k != 0.  The x-average is the
standing hypothesis: under policy "project" the k = 0 row of the advection
output is removed every stage and its norm logged, under "monitor" it is
kept so the departure from the hypothesis can be measured.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field

import numpy as np

from .grid import GridSpec, SpectralField, zero_field, l2_norm
from .lineardyn import sheared_velocity
from .spectral import (
    apply_multiplier,
    dyadic_project,
    dyadic_scales,
    product_fields,
)
from .weights import WeightEvaluator, WeightParams

__all__ = [
    "SimConfig",
    "EchoSpec",
    "EnergyReport",
    "TriadReport",
    "EchoReport",
    "SimulationResult",
    "BlowupError",
    "biot_savart_moving",
    "nonlinear_rhs",
    "step",
    "energy_report",
    "triad_diagnostic",
    "run_simulation",
]


class BlowupError(RuntimeError):
    """Raised when the state leaves the finite/bounded regime."""


@dataclass(frozen=True)
class EchoSpec:
    k0: int
    eta_star: float
    background_eta: float = 0.0

    def daughter_eta(self, k: int) -> float:
        """Lattice frequency the cascade populates at column k < k0."""
        return self.eta_star - (self.k0 - k) * self.background_eta


@dataclass
class SimConfig:
    grid: GridSpec
    weight: WeightParams = field(default_factory=WeightParams)
    epsilon: float = 1e-2
    dt: float = 0.02
    t_end: float = 50.0
    t_start: float = 1.0
    modes: list = field(default_factory=list)  # (k, eta, complex amplitude)
    policy: str = "project"
    dealias: bool = True
    nonlinear: bool = True
    report_every: int = 25
    snapshot_every: int = 0
    triad_every: int = 0
    echo: EchoSpec | None = None
    blowup_factor: float = 1e6

    def __post_init__(self) -> None:
        if self.epsilon < 0:
            raise ValueError("epsilon must be nonnegative")
        if self.dt <= 0 or self.t_end <= self.t_start:
            raise ValueError("need dt > 0 and t_end > t_start")
        if self.policy not in ("project", "monitor"):
            raise ValueError("policy must be 'project' or 'monitor'")

    def initial_field(self) -> SpectralField:
        f = zero_field(self.grid, time_tag=self.t_start)
        for k, eta, amp in self.modes:
            if k == 0:
                raise ValueError("k = 0 seed modes contradict the zero-mean hypothesis")
            f.set_mode(int(k), float(eta), self.epsilon * complex(amp), conjugate=True)
        return f


def biot_savart_moving(f: SpectralField, t: float):
    """Moving-frame stream function and advecting velocity (u_z, u_y).

    phi_hat = -f_hat / (k^2 + (eta - k t)^2) on k != 0, zero on the k = 0
    row; u = (-i eta phi_hat, i k phi_hat).
    """
    g = f.grid
    kg = g.k_grid.astype(float)
    eg = g.eta_grid
    denom = kg**2 + (eg - kg * t) ** 2
    with np.errstate(divide="ignore", invalid="ignore"):
        phi = -f.coeffs / denom
    phi[g.k_max, :] = 0.0
    u_z = SpectralField(g, -1j * eg * phi, time_tag=t)
    u_y = SpectralField(g, 1j * kg * phi, time_tag=t)
    return u_z, u_y, SpectralField(g, phi, time_tag=t)


def _advect(u_z: SpectralField, u_y: SpectralField, f: SpectralField, dealias: bool) -> SpectralField:
    g = f.grid
    dz = SpectralField(g, 1j * g.k_grid * f.coeffs, f.time_tag)
    dy = SpectralField(g, 1j * g.eta_grid * f.coeffs, f.time_tag)
    if dealias:
        return SpectralField(
            g,
            product_fields(u_z, dz).coeffs + product_fields(u_y, dy).coeffs,
            f.time_tag,
        )
    return SpectralField(
        g,
        _circular_product(u_z, dz) + _circular_product(u_y, dy),
        f.time_tag,
    )


def _circular_product(a: SpectralField, b: SpectralField) -> np.ndarray:
    # wrap-around (aliased) convolution on the unpadded lattice
    g = a.grid
    fa = np.fft.fft2(np.fft.ifftshift(a.coeffs))
    fb = np.fft.fft2(np.fft.ifftshift(b.coeffs))
    conv = np.fft.fftshift(np.fft.ifft2(fa * fb))
    return conv * g.d_eta / (2.0 * np.pi)


def nonlinear_rhs(
    f: SpectralField,
    t: float,
    policy: str = "project",
    dealias: bool = True,
) -> tuple[SpectralField, float]:
    """-(u . grad f) and the norm of its k = 0 row before any projection."""
    g = f.grid
    u_z, u_y, _ = biot_savart_moving(f, t)
    adv = _advect(u_z, u_y, f, dealias)
    rhs = SpectralField(g, -adv.coeffs, time_tag=t)
    residual = rhs.zero_mode_norm()
    if policy == "project":
        rhs.coeffs[g.k_max, :] = 0.0
    return rhs, residual


def _max_speed_bound(f: SpectralField, t: float) -> float:
    u_z, u_y, _ = biot_savart_moving(f, t)
    total = np.sum(np.abs(u_z.coeffs) + np.abs(u_y.coeffs))
    return float(total * f.grid.d_eta / (2.0 * np.pi))


def step(
    f: SpectralField,
    dt: float,
    policy: str = "project",
    dealias: bool = True,
    nonlinear: bool = True,
    check_cfl: bool = False,
) -> SpectralField:
    """One classical 4th-order step of the moving-frame system."""
    if not np.all(np.isfinite(f.coeffs)):
        raise BlowupError(f"non-finite state at t = {f.time_tag}")
    t = f.time_tag
    if not nonlinear:
        return SpectralField(f.grid, f.coeffs.copy(), time_tag=t + dt)
    if check_cfl:
        g = f.grid
        spacing = min(2 * np.pi / (2 * g.k_max + 1), 2 * g.L_y / (g.n_eta + 1))
        if dt * _max_speed_bound(f, t) > 0.5 * spacing:
            warnings.warn(
                f"dt * max|u| exceeds half the grid spacing at t = {t:.3g}",
                RuntimeWarning,
                stacklevel=2,
            )

    def rhs(coeffs: np.ndarray, tt: float) -> np.ndarray:
        probe = SpectralField(f.grid, coeffs, time_tag=tt)
        out, _ = nonlinear_rhs(probe, tt, policy=policy, dealias=dealias)
        return out.coeffs

    y = f.coeffs
    k1 = rhs(y, t)
    k2 = rhs(y + 0.5 * dt * k1, t + 0.5 * dt)
    k3 = rhs(y + 0.5 * dt * k2, t + 0.5 * dt)
    k4 = rhs(y + dt * k3, t + dt)
    new = y + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
    return SpectralField(f.grid, new, time_tag=t + dt)


@dataclass
class EnergyReport:
    t: float
    energy: float
    ck_lambda: float
    ck_w: float
    zero_mode_residual: float
    norm_ux: float
    norm_uy: float
    transport_abs: float | None = None
    reaction_abs: float | None = None
    remainder_abs: float | None = None

    def row(self) -> dict:
        out = {
            "t": self.t,
            "energy": self.energy,
            "ck_lambda": self.ck_lambda,
            "ck_w": self.ck_w,
            "zero_mode_residual": self.zero_mode_residual,
            "norm_ux": self.norm_ux,
            "norm_uy": self.norm_uy,
        }
        if self.transport_abs is not None:
            out["transport_abs"] = self.transport_abs
            out["reaction_abs"] = self.reaction_abs
            out["remainder_abs"] = self.remainder_abs
        return out


def energy_report(
    f: SpectralField,
    evaluator: WeightEvaluator,
    residual: float | None = None,
) -> EnergyReport:
    """Weighted energy, both Cauchy-Kovalevskaya terms and the damping norms.

    ck_w uses the signed dt w, so resonant dips contribute with their sign;
    the energy identity dE/dt = -ck_lambda - ck_w - <A(u.grad f), A f> holds
    exactly either way.
    """
    g = f.grid
    t = f.time_tag
    w, dtw, A, At = evaluator.lattice_arrays(g, t)
    amp2 = np.abs(f.coeffs) ** 2
    d_eta = g.d_eta
    energy = 0.5 * float(np.sum(A**2 * amp2)) * d_eta
    lam_dot = evaluator.lambda_dot(t)
    s = evaluator.params.s
    ck_lambda = -lam_dot * float(np.sum(g.abs_l1**s * A**2 * amp2)) * d_eta
    ck_w = float(np.sum((dtw / w) * At * A * amp2)) * d_eta
    ux, uy = sheared_velocity(f, t)
    if residual is None:
        _, residual = nonlinear_rhs(f, t, policy="monitor")
    return EnergyReport(
        t=t,
        energy=energy,
        ck_lambda=ck_lambda,
        ck_w=ck_w,
        zero_mode_residual=residual,
        norm_ux=l2_norm(ux),
        norm_uy=l2_norm(uy),
    )


@dataclass
class TriadReport:
    t: float
    transport: list
    reaction: list
    remainder: list
    total_commutator: float
    sum_residual: float

    @property
    def transport_abs(self) -> float:
        return float(sum(abs(v) for _, v in self.transport))

    @property
    def reaction_abs(self) -> float:
        return float(sum(abs(v) for _, v in self.reaction))

    @property
    def remainder_abs(self) -> float:
        return float(sum(abs(v) for *_, v in self.remainder))


def _pairing(a: SpectralField, b: SpectralField) -> float:
    return float(np.real(np.sum(np.conj(a.coeffs) * b.coeffs)) * a.grid.d_eta)


def triad_diagnostic(
    f: SpectralField,
    evaluator: WeightEvaluator,
    dealias: bool = True,
) -> TriadReport:
    """Transport/reaction/remainder commutator pairings at the current time.

    T_N pairs Af against A(u_{<N/8} . grad f_N) - u_{<N/8} . grad (Af)_N,
    R_N swaps which factor is localized, and the remainder collects the
    comparable-frequency pairs; their sum reproduces the full commutator
    <Af, A(u . grad f) - u . grad Af> up to roundoff.
    """
    g = f.grid
    t = f.time_tag
    _, _, A, _ = evaluator.lattice_arrays(g, t)
    u_z, u_y, _ = biot_savart_moving(f, t)
    af = apply_multiplier(f, A)

    def adv(uz, uy, target):
        return _advect(uz, uy, target, dealias)

    def commutator(uz, uy, target):
        first = apply_multiplier(adv(uz, uy, target), A)
        second = adv(uz, uy, apply_multiplier(target, A))
        return SpectralField(g, first.coeffs - second.coeffs, t)

    scales = dyadic_scales(g)
    f_blocks = {N: dyadic_project(f, N, "block") for N in scales}
    uz_blocks = {N: dyadic_project(u_z, N, "block") for N in scales}
    uy_blocks = {N: dyadic_project(u_y, N, "block") for N in scales}

    transport = []
    reaction = []
    remainder = []
    for N in scales:
        if N >= 8.0:
            uz_lo = dyadic_project(u_z, N / 8.0, "below")
            uy_lo = dyadic_project(u_y, N / 8.0, "below")
            f_lo = dyadic_project(f, N / 8.0, "below")
            transport.append((N, _pairing(af, commutator(uz_lo, uy_lo, f_blocks[N]))))
            reaction.append((N, _pairing(af, commutator(uz_blocks[N], uy_blocks[N], f_lo))))
        for Np in scales:
            if N / 8.0 <= Np <= 8.0 * N:
                remainder.append(
                    (N, Np, _pairing(af, commutator(uz_blocks[N], uy_blocks[N], f_blocks[Np])))
                )

    total = _pairing(af, commutator(u_z, u_y, f))
    pieces = (
        sum(v for _, v in transport)
        + sum(v for _, v in reaction)
        + sum(v for *_, v in remainder)
    )
    scale = max(abs(total), sum(abs(v) for _, v in transport) + 1e-300)
    return TriadReport(
        t=t,
        transport=transport,
        reaction=reaction,
        remainder=remainder,
        total_commutator=total,
        sum_residual=abs(pieces - total) / scale,
    )


@dataclass
class EchoReport:
    spec: EchoSpec
    times: np.ndarray
    f_amp: dict  # k -> |fhat_k(eta_k)| series
    u_amp: dict  # k -> mode speed |uhat_k(eta_k)| series

    def analyze(self) -> dict:
        """Per-mode burst location and velocity amplification.

        The vorticity column is filled near the pump's critical time
        eta*/(k+1); the observable echo is the velocity burst of the
        daughter at its own critical time eta_k/k, with transient gain
        max|u| / |fhat| ~ eta/k^2 (the zero-mean constraint suppresses any
        vorticity response there, the partner would be the zero mode).
        """
        out = {}
        for k, series in self.u_amp.items():
            eta_k = self.spec.daughter_eta(k)
            orr = eta_k / k
            i = int(np.argmax(series))
            t_peak = float(self.times[i])
            f_at_peak = float(self.f_amp[k][i])
            gain = float(series[i] / f_at_peak) if f_at_peak > 0 else np.nan
            fa = self.f_amp[k]
            df = np.diff(fa)
            j = int(np.argmax(df)) if len(df) else 0
            out[k] = {
                "eta": eta_k,
                "orr_time": orr,
                "t_velocity_peak": t_peak,
                "velocity_gain": gain,
                "toy_prediction": eta_k / k**2,
                "t_vorticity_kick": float(self.times[j]),
                "pump_orr_time": self.spec.eta_star / (k + 1),
                "vorticity_plateau": float(fa[-1]),
                "t_vorticity_peak": float(self.times[int(np.argmax(fa))]),
            }
        return out


@dataclass
class SimulationResult:
    config: SimConfig
    reports: list
    snapshots: list
    echo: EchoReport | None
    aborted: bool = False
    message: str = ""

    @property
    def final(self) -> SpectralField | None:
        return self.snapshots[-1] if self.snapshots else None


def run_simulation(config: SimConfig) -> SimulationResult:
    """Integrate to t_end, emitting energy reports and optional diagnostics."""
    f = config.initial_field()
    ev = WeightEvaluator(config.weight)
    n_steps = int(round((config.t_end - config.t_start) / config.dt))
    reports: list[EnergyReport] = []
    snapshots: list[SpectralField] = [f.copy()]

    echo_times = []
    echo_f: dict[int, list] = {}
    echo_u: dict[int, list] = {}
    if config.echo is not None:
        for k in range(1, config.echo.k0):
            echo_f[k] = []
            echo_u[k] = []

    def track_echo(state: SpectralField) -> None:
        if config.echo is None:
            return
        t = state.time_tag
        echo_times.append(t)
        for k in echo_f:
            eta_k = config.echo.daughter_eta(k)
            c = state.get_mode(k, eta_k)
            echo_f[k].append(abs(c))
            denom = k**2 + (eta_k - k * t) ** 2
            echo_u[k].append(abs(c) * np.sqrt(k**2 + eta_k**2) / denom)

    def make_report(state: SpectralField, with_triads: bool) -> EnergyReport:
        _, residual = nonlinear_rhs(state, state.time_tag, policy="monitor", dealias=config.dealias)
        rep = energy_report(state, ev, residual=residual)
        if with_triads:
            tri = triad_diagnostic(state, ev, dealias=config.dealias)
            rep.transport_abs = tri.transport_abs
            rep.reaction_abs = tri.reaction_abs
            rep.remainder_abs = tri.remainder_abs
        return rep

    with_triads = config.triad_every > 0  # triads ride the report cadence
    track_echo(f)
    reports.append(make_report(f, with_triads))
    e0 = max(reports[0].energy, 1e-300)
    aborted = False
    message = ""
    for i in range(1, n_steps + 1):
        try:
            f = step(
                f,
                config.dt,
                policy=config.policy,
                dealias=config.dealias,
                nonlinear=config.nonlinear,
                check_cfl=(i == 1),
            )
        except BlowupError as exc:
            aborted, message = True, str(exc)
            break
        track_echo(f)
        if not np.all(np.isfinite(f.coeffs)):
            aborted, message = True, f"non-finite state at t = {f.time_tag}"
            break
        if config.report_every and i % config.report_every == 0:
            rep = make_report(f, with_triads)
            reports.append(rep)
            if rep.energy > config.blowup_factor * e0:
                aborted = True
                message = f"energy exceeded {config.blowup_factor} x E(0) at t = {f.time_tag}"
                break
        if config.snapshot_every and i % config.snapshot_every == 0:
            snapshots.append(f.copy())
    if not aborted and (reports[-1].t < f.time_tag or config.report_every == 0):
        reports.append(make_report(f, with_triads))
    snapshots.append(f.copy())

    echo = None
    if config.echo is not None:
        echo = EchoReport(
            spec=config.echo,
            times=np.asarray(echo_times),
            f_amp={k: np.asarray(v) for k, v in echo_f.items()},
            u_amp={k: np.asarray(v) for k, v in echo_u.items()},
        )
    return SimulationResult(
        config=config,
        reports=reports,
        snapshots=snapshots,
        echo=echo,
        aborted=aborted,
        message=message,
    )
