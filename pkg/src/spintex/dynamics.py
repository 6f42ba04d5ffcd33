"""Split-step time evolution of the planar spin-1 field.

Second-order Strang splitting: a half spectral kinetic step, a full
step of the local (potential, contact, Zeeman, dipolar) term with the
3x3 exponential evaluated exactly per site, and a second kinetic half
step.  The local sub-flow rotates the spin about the mean field it
generates, so frozen coefficients are not exact there; the full local
step therefore uses coefficients from a predicted midpoint state,
which keeps the whole scheme second order in dt while staying exactly
unitary.

Units: energies in h*Hz, time in ms, lengths in um.  The local phases
are converted with RADPMS_PER_HHZ once per application.
"""

import math
from dataclasses import dataclass

import numpy as np

from . import constants as cn
from .dipole import DipolarCoupling, normalize_mode
from .errors import InvalidParameter, NumericalFailure
from .field import number_density, spin_density, zeeman_like_apply
from .grid import Grid2D


@dataclass(frozen=True)
class EvolutionSpec:
    """Physics coefficients and numerical step for one evolution run."""

    grid: Grid2D
    dt_ms: float
    q_hz: float                 # quadratic Zeeman, h*Hz
    c0_2d: float                # density-density contact, h*Hz um^2
    c2_2d: float                # spin-spin contact, h*Hz um^2
    sigma_y_um: float
    c_dd: float                 # h*Hz um^3
    kernel_mode: str = "bare"
    gradient_mg_cm: float = 0.0

    def __post_init__(self):
        if not (0.0 < self.dt_ms <= 0.2):
            raise InvalidParameter(
                f"dt_ms must be in (0, 0.2], got {self.dt_ms!r}")
        if self.sigma_y_um <= 0:
            raise InvalidParameter(
                f"sigma_y_um must be positive, got {self.sigma_y_um!r}")
        normalize_mode(self.kernel_mode)


class Evolver:
    """Advances a spinor field in fixed steps of spec.dt_ms."""

    def __init__(self, spec: EvolutionSpec, potential: np.ndarray = None):
        self.spec = spec
        g = spec.grid
        if potential is None:
            potential = np.zeros(g.shape)
        if potential.shape != g.shape:
            raise InvalidParameter(
                f"potential shape {potential.shape} does not match grid "
                f"{g.shape}")
        self.potential = potential
        self.coupling = DipolarCoupling(g, spec.sigma_y_um,
                                        spec.kernel_mode, spec.c_dd)
        # linear Zeeman from a residual field gradient along z, h*Hz
        slope = cn.LARMOR_HZ_PER_G * cn.MG_CM_TO_G_UM * spec.gradient_mg_cm
        self.linear_z = slope * g.z[None, :]
        self._kin_half = np.exp(
            -0.5j * cn.KIN_COEF * g.k2 * spec.dt_ms)[None, :, :]
        self._steps_taken = 0

    def _local_coefficients(self, psi: np.ndarray) -> tuple:
        s = spin_density(psi)
        b = self.coupling.field_of(s)
        u = self.potential + self.spec.c0_2d * number_density(psi)
        vx = self.spec.c2_2d * s[0] - b[0]
        vy = self.spec.c2_2d * s[1] - b[1]
        vz = self.spec.c2_2d * s[2] - b[2] + self.linear_z
        return u, vx, vy, vz

    def _local_apply(self, psi, coeffs, theta) -> np.ndarray:
        u, vx, vy, vz = coeffs
        return zeeman_like_apply(psi, theta, u, self.spec.q_hz, vx, vy, vz)

    def _kinetic_half(self, psi: np.ndarray) -> np.ndarray:
        pk = np.fft.fft2(psi, axes=(-2, -1))
        pk *= self._kin_half
        return np.fft.ifft2(pk, axes=(-2, -1))

    def step(self, psi: np.ndarray) -> np.ndarray:
        theta = self.spec.dt_ms * cn.RADPMS_PER_HHZ
        psi = self._kinetic_half(psi)
        # exponential midpoint: predict half a local step, refresh the
        # mean-field coefficients there, then take the full local step
        pred = self._local_apply(psi, self._local_coefficients(psi),
                                 0.5 * theta)
        psi = self._local_apply(psi, self._local_coefficients(pred), theta)
        psi = self._kinetic_half(psi)
        self._steps_taken += 1
        if not np.all(np.isfinite(psi.view(float))):
            raise NumericalFailure(
                f"non-finite amplitudes after step {self._steps_taken}")
        return psi

    def run(self, psi: np.ndarray, n_steps: int) -> np.ndarray:
        for _ in range(n_steps):
            psi = self.step(psi)
        return psi

    # -- diagnostics ---------------------------------------------------

    def norm(self, psi: np.ndarray) -> float:
        return float(number_density(psi).sum()) * self.spec.grid.cell_area

    def energy_budget(self, psi: np.ndarray) -> dict:
        """Energy components in h*Hz; their sum is conserved by the flow."""
        g = self.spec.grid
        da = g.cell_area
        pk = np.fft.fft2(psi, axes=(-2, -1))
        dens_k = (pk.real**2 + pk.imag**2).sum(axis=0)
        e_kin = cn.EKIN_HHZ_PER_K2 * float((g.k2 * dens_k).sum()) \
            * da / (g.nx * g.nz)
        n = number_density(psi)
        s = spin_density(psi)
        e_pot = float((self.potential * n).sum()) * da
        e_c0 = 0.5 * self.spec.c0_2d * float((n * n).sum()) * da
        e_c2 = 0.5 * self.spec.c2_2d * float((s * s).sum()) * da
        n_pm = (psi[0].real**2 + psi[0].imag**2
                + psi[2].real**2 + psi[2].imag**2)
        e_zee = self.spec.q_hz * float(n_pm.sum()) * da \
            + float((self.linear_z * s[2]).sum()) * da
        e_dd = self.coupling.energy(s)
        total = e_kin + e_pot + e_c0 + e_c2 + e_zee + e_dd
        return {"e_kin": e_kin, "e_pot": e_pot, "e_c0": e_c0, "e_c2": e_c2,
                "e_zeeman": e_zee, "e_dipole": e_dd, "e_total": total}

    def energy_per_atom(self, psi: np.ndarray) -> dict:
        """Energy components per atom in h*Hz (total budget / atom number)."""
        atoms = self.norm(psi)
        if atoms <= 0:
            raise NumericalFailure("atom number vanished")
        return {key: val / atoms
                for key, val in self.energy_budget(psi).items()
                if key != "e_total"}


# ---------------------------------------------------------------------------
# Scheduled rf pulses
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class PulseEvent:
    time_ms: float
    axis: tuple          # unit rotation axis
    angle: float         # radians


@dataclass(frozen=True)
class PulseSchedule:
    events: tuple
    t_final_ms: float

    def __post_init__(self):
        times = [e.time_ms for e in self.events]
        if any(t2 <= t1 for t1, t2 in zip(times, times[1:])):
            raise InvalidParameter("pulse times must be strictly increasing")
        if times and (times[0] < 0.0 or times[-1] > self.t_final_ms):
            raise InvalidParameter(
                f"pulse times must lie within [0, {self.t_final_ms}] ms")

    def __len__(self):
        return len(self.events)


def make_cancellation_schedule(rate_khz: float, t_final_ms: float,
                               seed) -> PulseSchedule:
    """Random pi/2 pulse train that averages the dipolar coupling away.

    Pulse times follow a Poisson process of mean rate rate_khz; each
    event rotates the spins by pi/2 about an axis drawn uniformly in
    the x-y plane.  Rapid random tumbling makes the spins sample
    orientations isotropically, so the traceless dipolar tensor
    time-averages toward zero.  Deterministic for a given seed.
    """
    if rate_khz <= 0:
        raise InvalidParameter(f"pulse rate must be positive, "
                               f"got {rate_khz!r}")
    if t_final_ms < 0:
        raise InvalidParameter(f"t_final_ms must be >= 0, "
                               f"got {t_final_ms!r}")
    rng = seed if isinstance(seed, np.random.Generator) \
        else np.random.default_rng(seed)
    events = []
    t = rng.exponential(1.0 / rate_khz)
    while t <= t_final_ms:
        alpha = rng.uniform(0.0, 2.0 * math.pi)
        events.append(PulseEvent(time_ms=t,
                                 axis=(math.cos(alpha), math.sin(alpha), 0.0),
                                 angle=0.5 * math.pi))
        t += rng.exponential(1.0 / rate_khz)
    return PulseSchedule(events=tuple(events), t_final_ms=t_final_ms)


def evolve(psi: np.ndarray, evolver: Evolver, t_final_ms: float,
           schedule: PulseSchedule = None, observer=None,
           observe_every_ms: float = None) -> np.ndarray:
    """Run the stepper to t_final, firing pulses and the observer.

    Scheduled pulses are applied at the first step boundary at or after
    their event time, before the observer sees that boundary.  The
    observer is called as observer(t_ms, psi) at t = 0, every
    observe_every_ms (which must be a multiple of dt), and at the final
    time.  Returns the final field.
    """
    from .field import rotate_spinor
    dt = evolver.spec.dt_ms
    n_steps = int(round(t_final_ms / dt))
    if abs(n_steps * dt - t_final_ms) > 1e-9 * max(1.0, t_final_ms):
        raise InvalidParameter(
            f"t_final_ms {t_final_ms!r} is not a multiple of dt {dt!r}")
    every = None
    if observer is not None and observe_every_ms is not None:
        every = int(round(observe_every_ms / dt))
        if every < 1 or abs(every * dt - observe_every_ms) > 1e-9:
            raise InvalidParameter(
                f"observe_every_ms {observe_every_ms!r} is not a multiple "
                f"of dt {dt!r}")
    pending = list(schedule.events) if schedule is not None else []
    if observer is not None:
        observer(0.0, psi)
    for n in range(1, n_steps + 1):
        psi = evolver.step(psi)
        t_now = n * dt
        while pending and pending[0].time_ms <= t_now + 1e-9:
            ev = pending.pop(0)
            psi = rotate_spinor(psi, ev.axis, ev.angle)
        if observer is not None and (
                (every is not None and n % every == 0) or n == n_steps):
            observer(t_now, psi)
    return psi
