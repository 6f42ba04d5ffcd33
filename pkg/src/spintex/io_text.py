"""Plain-text run configuration and output files.

Everything the simulator reads or writes is line-oriented text: a
key = value config format, per-site snapshot tables, and a CSV of
order-parameter time series.  A run directory holds `meta`,
`snap_t<ms>.txt` files, `timeseries.csv`, and a terminal `DONE` marker;
a directory without `DONE` is a detectably partial run.
"""

import dataclasses
import hashlib
import math
import os
from dataclasses import dataclass

import numpy as np

from . import __version__
from .analysis import SERIES_COLUMNS, OrderParamSeries, RegionSpec
from .dipole import normalize_mode
from .errors import InvalidParameter
from .grid import Grid2D
from .params import PhysicalParams, derive_params, trap_curvatures_hhz_um2

POTENTIALS = ("none", "harmonic")
PROFILES = ("uniform", "thomas-fermi")


@dataclass
class RunConfig:
    """One simulation run, fully specified.

    Defaults reproduce the reference parameter set (the
    `defaults-paper` preset): 87Rb F=1 scattering lengths, peak density
    2.3e14 cm^-3, bias field 165 mG, trap frequencies (39, 440, 4.2) Hz.
    """

    # physical parameters
    a0_nm: float = 5.39
    a2_nm: float = 5.31
    n0_cm3: float = 2.3e14
    atom_number: float = 1.86e6
    b0_mg: float = 165.0
    q_coeff_hz_g2: float = 71.6
    trap_x_hz: float = 39.0
    trap_y_hz: float = 440.0
    trap_z_hz: float = 4.2
    sigma_y_um: float = 1.8 / math.sqrt(5.0)
    # grid
    nx: int = 128
    nz: int = 512
    lx_um: float = 64.0
    lz_um: float = 416.0
    # evolution
    dt_ms: float = 0.05
    t_final_ms: float = 250.0
    snapshot_every_ms: float = 5.0
    snapshot_write_every_ms: float = 0.0
    kernel_mode: str = "larmor"
    residual_gradient_mg_cm: float = 0.0
    potential: str = "harmonic"
    profile: str = "thomas-fermi"
    box_fill: float = 1.0
    # protocol
    helix_pitch_um: float = 60.0
    noise_amplitude: float = 1e-3
    cancel_pulse_rate_khz: float = 0.0
    # analysis regions
    k_cut_rad_um: float = 2.0 * math.pi / 25.0
    k_lo_rad_um: float = 2.0 * math.pi / 15.0
    k_hi_rad_um: float = 2.0 * math.pi / 6.0
    background: str = "auto"
    # bookkeeping
    out_dir: str = "runs/run0"
    rng_seed: int = 1234

    # -- derived views -------------------------------------------------

    def physical_params(self) -> PhysicalParams:
        return PhysicalParams(
            a0_nm=self.a0_nm, a2_nm=self.a2_nm, n0_cm3=self.n0_cm3,
            atom_number=self.atom_number, b0_mg=self.b0_mg,
            q_coeff_hz_g2=self.q_coeff_hz_g2,
            trap_omega=(2.0 * math.pi * self.trap_x_hz,
                        2.0 * math.pi * self.trap_y_hz,
                        2.0 * math.pi * self.trap_z_hz),
            sigma_y_um=self.sigma_y_um)

    def grid(self) -> Grid2D:
        return Grid2D(nx=self.nx, nz=self.nz, lx=self.lx_um, lz=self.lz_um)

    def regions(self) -> RegionSpec:
        return RegionSpec(k_cut=self.k_cut_rad_um, k_lo=self.k_lo_rad_um,
                          k_hi=self.k_hi_rad_um)

    def resolved_background(self):
        if self.background == "auto":
            return "auto" if self.noise_amplitude > 0 else 0.0
        return float(self.background)

    # -- validation ----------------------------------------------------

    def validate(self) -> "RunConfig":
        self.kernel_mode = normalize_mode(self.kernel_mode)
        p = self.physical_params()
        p.validate()
        derive_params(p)
        trap_curvatures_hhz_um2(p)
        grid = self.grid()
        regions = self.regions()
        regions.check_grid(grid)
        if not (0.0 < self.dt_ms <= 0.2):
            raise InvalidParameter(
                f"dt_ms must lie in (0, 0.2], got {self.dt_ms!r}")
        if self.t_final_ms < 0:
            raise InvalidParameter(
                f"t_final_ms must be >= 0, got {self.t_final_ms!r}")
        for key in ("t_final_ms", "snapshot_every_ms",
                    "snapshot_write_every_ms"):
            val = getattr(self, key)
            steps = val / self.dt_ms
            if abs(steps - round(steps)) > 1e-9:
                raise InvalidParameter(
                    f"{key} = {val!r} is not a multiple of dt_ms")
        if self.snapshot_every_ms < 0 or self.snapshot_write_every_ms < 0:
            raise InvalidParameter("snapshot cadences must be >= 0")
        if self.snapshot_write_every_ms > 0:
            if self.snapshot_every_ms <= 0:
                raise InvalidParameter(
                    "snapshot_write_every_ms needs snapshot_every_ms > 0")
            ratio = self.snapshot_write_every_ms / self.snapshot_every_ms
            if abs(ratio - round(ratio)) > 1e-9:
                raise InvalidParameter(
                    "snapshot_write_every_ms must be a multiple of "
                    "snapshot_every_ms")
        if self.potential not in POTENTIALS:
            raise InvalidParameter(
                f"potential must be one of {POTENTIALS}, "
                f"got {self.potential!r}")
        if self.profile not in PROFILES:
            raise InvalidParameter(
                f"profile must be one of {PROFILES}, got {self.profile!r}")
        if self.profile == "thomas-fermi" and self.potential != "harmonic":
            raise InvalidParameter(
                "thomas-fermi profile requires the harmonic potential")
        if self.profile == "uniform" and self.potential != "none":
            raise InvalidParameter(
                "uniform profile requires potential = none")
        if not (0.0 < self.box_fill <= 1.0):
            raise InvalidParameter(
                f"box_fill must lie in (0, 1], got {self.box_fill!r}")
        if self.helix_pitch_um < 0:
            raise InvalidParameter(
                f"helix_pitch_um must be >= 0, got {self.helix_pitch_um!r}")
        if self.noise_amplitude < 0:
            raise InvalidParameter(
                f"noise_amplitude must be >= 0, "
                f"got {self.noise_amplitude!r}")
        if self.cancel_pulse_rate_khz < 0:
            raise InvalidParameter(
                f"cancel_pulse_rate_khz must be >= 0, "
                f"got {self.cancel_pulse_rate_khz!r}")
        if self.residual_gradient_mg_cm < 0:
            raise InvalidParameter(
                f"residual_gradient_mg_cm must be >= 0, "
                f"got {self.residual_gradient_mg_cm!r}")
        if not isinstance(self.background, str):
            self.background = repr(float(self.background))
        if self.background != "auto":
            try:
                bg = float(self.background)
            except ValueError:
                raise InvalidParameter(
                    f"background must be a number or 'auto', "
                    f"got {self.background!r}") from None
            if bg < 0:
                raise InvalidParameter(
                    f"background must be >= 0, got {self.background!r}")
        if not isinstance(self.rng_seed, int) or self.rng_seed < 0:
            raise InvalidParameter(
                f"rng_seed must be a nonnegative integer, "
                f"got {self.rng_seed!r}")
        return self


PRESETS = ("defaults-paper",)

_FIELD_TYPES = {f.name: f.type for f in dataclasses.fields(RunConfig)}
_STR_FIELDS = {"kernel_mode", "potential", "profile", "background", "out_dir"}
_INT_FIELDS = {"nx", "nz", "rng_seed"}


def _convert(key: str, raw: str, line_no: int, line: str):
    try:
        if key in _STR_FIELDS:
            return raw
        if key in _INT_FIELDS:
            return int(raw)
        return float(raw)
    except ValueError:
        raise InvalidParameter(
            f"line {line_no}: cannot parse value for {key!r}: "
            f"{line.strip()!r}") from None


def parse_config(text: str, preset: str = "defaults-paper") -> RunConfig:
    """Parse key = value lines over a named preset's defaults.

    Unknown keys, malformed lines, and out-of-range values raise
    InvalidParameter naming the offending line.  '#' starts a comment.
    """
    if preset not in PRESETS:
        raise InvalidParameter(f"unknown preset {preset!r}; "
                               f"available: {', '.join(PRESETS)}")
    cfg = RunConfig()
    for line_no, line in enumerate(text.splitlines(), start=1):
        body = line.split("#", 1)[0].strip()
        if not body:
            continue
        if "=" not in body:
            raise InvalidParameter(
                f"line {line_no}: expected 'key = value', "
                f"got {line.strip()!r}")
        key, raw = (part.strip() for part in body.split("=", 1))
        if key not in _FIELD_TYPES:
            raise InvalidParameter(
                f"line {line_no}: unknown key {key!r}")
        setattr(cfg, key, _convert(key, raw, line_no, line))
    try:
        cfg.validate()
    except InvalidParameter as exc:
        raise InvalidParameter(f"invalid config: {exc}") from None
    return cfg


def load_config(path: str, preset: str = "defaults-paper") -> RunConfig:
    with open(path, encoding="utf-8") as fh:
        return parse_config(fh.read(), preset=preset)


_HEADER_COMMENTS = """\
# simulation run configuration (key = value; '#' starts a comment)
#
# dt_ms balances the peak contact-interaction scale (~2 kHz) against
# the grid's kinetic Nyquist scale (~1.2 kHz at 0.5 um spacing); halve
# it before trusting runs on substantially finer grids.
"""


def serialize_config(cfg: RunConfig) -> str:
    # values are written bare (no quoting); parse takes them verbatim
    lines = [_HEADER_COMMENTS]
    for f in dataclasses.fields(RunConfig):
        lines.append(f"{f.name} = {getattr(cfg, f.name)}")
    return "\n".join(lines) + "\n"


def config_hash(cfg: RunConfig) -> str:
    canonical = "\n".join(
        f"{f.name} = {getattr(cfg, f.name)}"
        for f in dataclasses.fields(RunConfig))
    return hashlib.sha256(canonical.encode()).hexdigest()[:12]


# ---------------------------------------------------------------------------
# Snapshot files
# ---------------------------------------------------------------------------

SNAPSHOT_COLUMNS = ("x_um", "z_um", "n", "Mx", "My", "Mz",
                    "re_p1", "im_p1", "re_p0", "im_p0", "re_m1", "im_m1")


def write_snapshot(path: str, psi: np.ndarray, grid: Grid2D,
                   time_ms: float, cfg_hash: str) -> None:
    from .field import number_density, spin_density
    n = number_density(psi)
    m = spin_density(psi)
    x = np.broadcast_to(grid.x[:, None], grid.shape)
    z = np.broadcast_to(grid.z[None, :], grid.shape)
    cols = [x, z, n, m[0], m[1], m[2],
            psi[0].real, psi[0].imag, psi[1].real, psi[1].imag,
            psi[2].real, psi[2].imag]
    table = np.stack([c.reshape(-1) for c in cols], axis=1)
    header = (f"# time_ms = {time_ms}\n"
              f"# nx = {grid.nx}\n"
              f"# nz = {grid.nz}\n"
              f"# lx_um = {grid.lx}\n"
              f"# lz_um = {grid.lz}\n"
              f"# units = x,z um; n um^-2; M um^-2; psi um^-1\n"
              f"# config = {cfg_hash}\n"
              f"# columns = {' '.join(SNAPSHOT_COLUMNS)}\n")
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(header)
        np.savetxt(fh, table, fmt="%.10e")


def read_snapshot(path: str) -> tuple:
    """Return (psi, grid, header dict) from a snapshot file."""
    header = {}
    n_header = 0
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            if not line.startswith("#"):
                break
            n_header += 1
            body = line[1:].strip()
            if "=" in body:
                key, val = (part.strip() for part in body.split("=", 1))
                header[key] = val
    for key in ("time_ms", "nx", "nz", "lx_um", "lz_um"):
        if key not in header:
            raise InvalidParameter(f"snapshot {path}: missing header {key}")
    grid = Grid2D(nx=int(header["nx"]), nz=int(header["nz"]),
                  lx=float(header["lx_um"]), lz=float(header["lz_um"]))
    table = np.loadtxt(path, skiprows=n_header)
    if table.shape != (grid.nx * grid.nz, len(SNAPSHOT_COLUMNS)):
        raise InvalidParameter(
            f"snapshot {path}: table shape {table.shape} does not match "
            f"header grid {grid.shape}")
    shape = grid.shape
    psi = np.empty((3,) + shape, dtype=complex)
    for comp, (re_col, im_col) in enumerate(((6, 7), (8, 9), (10, 11))):
        psi[comp] = (table[:, re_col] + 1j * table[:, im_col]).reshape(shape)
    header["time_ms"] = float(header["time_ms"])
    return psi, grid, header


# ---------------------------------------------------------------------------
# Time series CSV
# ---------------------------------------------------------------------------

def write_timeseries(path: str, series: OrderParamSeries,
                     cfg_hash: str) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(f"# config = {cfg_hash}\n")
        fh.write(",".join(SERIES_COLUMNS) + "\n")
        for i in range(len(series)):
            row = []
            for col in SERIES_COLUMNS:
                val = series.columns[col][i]
                if col == "n_vortices":
                    row.append(str(int(val)))
                else:
                    row.append(f"{val:.10e}")
            fh.write(",".join(row) + "\n")


def read_timeseries(path: str) -> OrderParamSeries:
    with open(path, encoding="utf-8") as fh:
        lines = [ln.strip() for ln in fh if ln.strip()
                 and not ln.startswith("#")]
    if not lines or lines[0].split(",") != list(SERIES_COLUMNS):
        raise InvalidParameter(f"{path}: unexpected time series columns")
    data = np.array([[float(v) for v in ln.split(",")] for ln in lines[1:]])
    if data.size == 0:
        data = data.reshape(0, len(SERIES_COLUMNS))
    cols = {name: data[:, i] for i, name in enumerate(SERIES_COLUMNS)}
    return OrderParamSeries(columns=cols)


# ---------------------------------------------------------------------------
# Run directories
# ---------------------------------------------------------------------------

def snapshot_name(time_ms: float) -> str:
    return f"snap_t{time_ms:g}.txt"


def write_meta(run_dir: str, cfg: RunConfig) -> None:
    path = os.path.join(run_dir, "meta")
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(f"# run metadata, package version {__version__}\n")
        fh.write(f"# config = {config_hash(cfg)}\n")
        fh.write(serialize_config(cfg))


def mark_done(run_dir: str) -> None:
    with open(os.path.join(run_dir, "DONE"), "w", encoding="utf-8") as fh:
        fh.write("complete\n")


def is_complete(run_dir: str) -> bool:
    return os.path.exists(os.path.join(run_dir, "DONE"))
