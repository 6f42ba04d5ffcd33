"""Tests for spectral order parameters, growth fits, correlation, vortices."""

import math

import numpy as np
import pytest

from spintex.analysis import (
    ENERGY_KEYS,
    SERIES_COLUMNS,
    OrderParamSeries,
    PowerSpectrum,
    RegionSpec,
    correlation,
    detect_vortices,
    dominant_wavevector,
    growth_rate,
    order_parameters,
    power_spectrum,
    sixfold_anisotropy,
)
from spintex.errors import InvalidParameter
from spintex.field import (
    MagnetizationField,
    imprint_helix,
    magnetization,
    transverse_state,
)
from spintex.grid import Grid2D

TWO_PI = 2.0 * math.pi


def uniform_transverse_field(grid, density):
    """Fully magnetized along +x at uniform density."""
    psi = np.tile(transverse_state()[:, None, None], (1,) + grid.shape)
    return psi * math.sqrt(density)


def helix_field(grid, density, pitch):
    psi = uniform_transverse_field(grid, density)
    return imprint_helix(psi, grid, TWO_PI / pitch)


# ---------------------------------------------------------------------------
# Power spectrum
# ---------------------------------------------------------------------------

def test_power_spectrum_parseval():
    g = Grid2D(nx=16, nz=32, lx=8.0, lz=20.0)
    rng = np.random.default_rng(7)
    m = rng.standard_normal((3,) + g.shape)
    n = np.abs(rng.standard_normal(g.shape)) + 0.1
    ps = power_spectrum(MagnetizationField(grid=g, m=m, n=n))
    assert ps.p.shape == g.shape
    assert np.all(ps.p >= 0)
    # total spectral power equals the real-space sum of |M|^2 over sites
    assert abs(ps.p.sum() - (m**2).sum()) < 1e-9 * (m**2).sum()
    assert ps.kmag.shape == g.shape
    assert ps.kmag[0, 0] == 0.0


def test_helix_power_concentrates_on_one_mode():
    g = Grid2D(nx=16, nz=64, lx=8.0, lz=32.0)
    dens = 2.5
    m = magnetization(helix_field(g, dens, pitch=8.0), g)
    ps = power_spectrum(m)
    total = dens**2 * g.nx * g.nz
    # all power in the two conjugate modes at kz = +-2 pi / 8
    j = int(round(g.lz / 8.0))
    peak = ps.p[0, j] + ps.p[0, -j]
    assert abs(ps.p.sum() - total) < 1e-9 * total
    assert abs(peak - total) < 1e-9 * total


# ---------------------------------------------------------------------------
# Region spec and order parameters
# ---------------------------------------------------------------------------

def test_region_spec_validation():
    RegionSpec()
    with pytest.raises(InvalidParameter):
        RegionSpec(k_cut=0.0)
    with pytest.raises(InvalidParameter):
        RegionSpec(k_cut=0.5, k_lo=0.4, k_hi=1.0)
    with pytest.raises(InvalidParameter):
        RegionSpec(k_cut=0.1, k_lo=0.4, k_hi=0.4)


def test_region_spec_grid_check():
    regions = RegionSpec()
    regions.check_grid(Grid2D(nx=32, nz=32, lx=32.0, lz=32.0))
    coarse = Grid2D(nx=32, nz=32, lx=256.0, lz=256.0)
    with pytest.raises(InvalidParameter):
        regions.check_grid(coarse)


def test_order_parameters_helix_placement():
    g = Grid2D(nx=64, nz=64, lx=32.0, lz=32.0)
    regions = RegionSpec()
    dens = 2.5
    total = dens**2 * g.nx * g.nz

    # pitch 32: kappa = 0.196 below k_cut, all power long-range
    m_long = magnetization(helix_field(g, dens, pitch=32.0), g)
    lo, sh, tot = order_parameters(power_spectrum(m_long), regions)
    assert abs(lo - total) < 1e-9 * total
    assert sh < 1e-9 * total
    assert abs(tot - total) < 1e-9 * total

    # pitch 8: kappa = 0.785 inside the short annulus
    m_short = magnetization(helix_field(g, dens, pitch=8.0), g)
    lo, sh, tot = order_parameters(power_spectrum(m_short), regions)
    assert lo < 1e-9 * total
    assert abs(sh - total) < 1e-9 * total
    assert abs(tot - total) < 1e-9 * total


def test_order_parameters_background_subtraction():
    g = Grid2D(nx=64, nz=64, lx=32.0, lz=32.0)
    regions = RegionSpec()
    m = magnetization(helix_field(g, 2.0, pitch=8.0), g)
    ps = power_spectrum(m)
    ref = order_parameters(ps, regions)

    floor = 0.37
    lifted = PowerSpectrum(kx=ps.kx, kz=ps.kz, p=ps.p + floor)
    got = order_parameters(lifted, regions, background=floor)
    for a, b in zip(got, ref):
        assert abs(a - b) < 1e-9 * max(1.0, abs(b))

    with pytest.raises(InvalidParameter):
        order_parameters(ps, regions, background=-0.1)
    with pytest.raises(InvalidParameter):
        order_parameters(ps, regions, background="median")


def test_order_parameters_auto_background():
    g = Grid2D(nx=64, nz=64, lx=32.0, lz=32.0)
    regions = RegionSpec()
    floor = 0.4
    p = np.full(g.shape, floor)
    kz_spike = int(round(g.lz / 8.0))     # |k| inside the annulus
    p[0, kz_spike] += 123.0
    ps = PowerSpectrum(kx=g.kx.copy(), kz=g.kz.copy(), p=p)
    lo, sh, tot = order_parameters(ps, regions, background="auto")
    assert abs(lo) < 1e-9
    assert abs(sh - 123.0) < 1e-9
    assert abs(tot - 123.0) < 1e-9


def test_auto_background_needs_far_modes():
    # every mode of this coarse grid sits within 2 k_hi of the origin
    g = Grid2D(nx=8, nz=8, lx=8.0, lz=8.0)
    ps = PowerSpectrum(kx=g.kx.copy(), kz=g.kz.copy(), p=np.ones(g.shape))
    regions = RegionSpec(k_cut=0.3, k_lo=0.5, k_hi=2.3)
    with pytest.raises(InvalidParameter):
        order_parameters(ps, regions, background="auto")


def test_dominant_wavevector_ignores_central_disc():
    g = Grid2D(nx=64, nz=64, lx=32.0, lz=32.0)
    dk = TWO_PI / 32.0
    p = np.zeros(g.shape)
    p[0, 1] = 100.0                      # |k| = dk, inside the disc
    p[3, 4] = 5.0                        # |k| = 5 dk
    ps = PowerSpectrum(kx=g.kx.copy(), kz=g.kz.copy(), p=p)
    got = dominant_wavevector(ps, k_min=0.25)
    assert abs(got - 5.0 * dk) < 1e-12


def test_sixfold_anisotropy_cases():
    g = Grid2D(nx=64, nz=64, lx=32.0, lz=32.0)
    regions = RegionSpec()
    dk = TWO_PI / 32.0
    j = 4                                 # |k| = 0.785 in the annulus

    # single mode: pure harmonic, ratio 1
    p = np.zeros(g.shape)
    p[j, 0] = 3.0
    ps = PowerSpectrum(kx=g.kx.copy(), kz=g.kz.copy(), p=p)
    assert abs(sixfold_anisotropy(ps, regions) - 1.0) < 1e-12

    # equal modes at phi = 0 and phi = pi/2: e^{-6 i phi} differ by -1
    p = np.zeros(g.shape)
    p[j, 0] = 3.0
    p[0, j] = 3.0
    ps = PowerSpectrum(kx=g.kx.copy(), kz=g.kz.copy(), p=p)
    assert abs(sixfold_anisotropy(ps, regions)) < 1e-12

    # equal modes at phi = 0 and phi = pi/4: |1 + i| / 2
    p = np.zeros(g.shape)
    p[j, 0] = 3.0
    p[3, 3] = 3.0                         # |k| = 3 sqrt2 dk = 0.833 in annulus
    ps = PowerSpectrum(kx=g.kx.copy(), kz=g.kz.copy(), p=p)
    assert abs(sixfold_anisotropy(ps, regions) - math.sqrt(2.0) / 2.0) < 1e-12

    # empty annulus
    ps = PowerSpectrum(kx=g.kx.copy(), kz=g.kz.copy(), p=np.zeros(g.shape))
    assert sixfold_anisotropy(ps, regions) == 0.0


# ---------------------------------------------------------------------------
# Series container and growth rate
# ---------------------------------------------------------------------------

def series_from(t, short, total):
    t = np.asarray(t, dtype=float)
    cols = {"t_ms": t, "long_order": np.zeros_like(t),
            "short_order": np.asarray(short, dtype=float),
            "total_power": np.asarray(total, dtype=float),
            "n_vortices": np.zeros_like(t)}
    for k in ENERGY_KEYS:
        cols[k] = np.zeros_like(t)
    return OrderParamSeries(columns=cols)


def test_series_container_validation():
    s = series_from([0.0, 1.0, 2.0], [0.0, 1.0, 2.0], [4.0, 4.0, 4.0])
    assert len(s) == 3
    assert s.total_power[0] == 4.0
    assert set(SERIES_COLUMNS) == set(s.columns)
    with pytest.raises(AttributeError):
        s.no_such_column

    cols = dict(s.columns)
    del cols["e_dipole"]
    with pytest.raises(InvalidParameter):
        OrderParamSeries(columns=cols)

    cols = dict(s.columns)
    cols["short_order"] = np.zeros(5)
    with pytest.raises(InvalidParameter):
        OrderParamSeries(columns=cols)


def test_growth_rate_linear_exact():
    # short/total exactly linear: slope 0.004 per ms -> 4.0 per s
    t = np.arange(21.0)
    total = np.full(21, 7.0)
    short = (0.02 + 0.004 * t) * total
    s = series_from(t, short, total)
    assert abs(growth_rate(s, window=(0.0, 20.0)) - 4.0) < 1e-9
    assert abs(growth_rate(s) - 4.0) < 1e-9


def test_growth_rate_default_window():
    # rise saturates at t = 5; the default window must stop near the rise
    t = np.arange(11.0)
    short = np.array([0, 1, 2, 3, 4, 5, 5, 5, 5, 5, 5], dtype=float)
    total = np.full(11, 10.0)
    s = series_from(t, short, total)
    # half the final value is first exceeded at t = 3 -> window (0, 3),
    # where the fraction is exactly linear with slope 0.1 per ms
    assert abs(growth_rate(s) - 100.0) < 1e-9
    # fitting across the saturated tail dilutes the slope
    assert growth_rate(s, window=(0.0, 10.0)) < 100.0


def test_growth_rate_errors():
    s = series_from([0.0, 1.0, 2.0], [0.0, 1.0, 2.0], [4.0, 4.0, 4.0])
    with pytest.raises(InvalidParameter):
        growth_rate(s)

    t = np.arange(11.0)
    s = series_from(t, t, np.full(11, 10.0))
    with pytest.raises(InvalidParameter):
        growth_rate(s, window=(0.0, 2.0))

    s = series_from([2.0, 2.0, 2.0, 2.0], np.ones(4), np.ones(4))
    with pytest.raises(InvalidParameter):
        growth_rate(s, window=(0.0, 3.0))


# ---------------------------------------------------------------------------
# Correlation map
# ---------------------------------------------------------------------------

def test_correlation_fully_magnetized_is_one():
    g = Grid2D(nx=16, nz=32, lx=8.0, lz=16.0)
    m = magnetization(uniform_transverse_field(g, 3.0), g)
    corr = correlation(m)
    assert corr.shape == g.shape
    assert np.nanmax(np.abs(corr - 1.0)) < 1e-9
    assert not np.isnan(corr).any()


def test_correlation_of_helix_is_cosine():
    g = Grid2D(nx=16, nz=64, lx=8.0, lz=32.0)
    pitch = 8.0
    m = magnetization(helix_field(g, 2.0, pitch), g)
    corr = correlation(m)
    expected = np.cos(TWO_PI / pitch * g.dz * np.arange(g.nz))
    assert np.max(np.abs(corr - expected[None, :])) < 1e-9


def test_correlation_masks_empty_overlap():
    g = Grid2D(nx=8, nz=8, lx=8.0, lz=8.0)
    n = np.zeros(g.shape)
    m = np.zeros((3,) + g.shape)
    n[2, 3] = 4.0
    m[0, 2, 3] = 4.0
    corr = correlation(MagnetizationField(grid=g, m=m, n=n))
    assert abs(corr[0, 0] - 1.0) < 1e-12
    mask = np.isnan(corr)
    assert not mask[0, 0]
    assert mask.sum() == g.nx * g.nz - 1


def test_correlation_zero_magnetization():
    g = Grid2D(nx=8, nz=8, lx=8.0, lz=8.0)
    f = MagnetizationField(grid=g, m=np.zeros((3,) + g.shape),
                           n=np.ones(g.shape))
    assert np.max(np.abs(correlation(f))) < 1e-12


def test_correlation_requires_density():
    g = Grid2D(nx=8, nz=8, lx=8.0, lz=8.0)
    f = MagnetizationField(grid=g, m=np.zeros((3,) + g.shape),
                           n=np.zeros(g.shape))
    with pytest.raises(InvalidParameter):
        correlation(f)


# ---------------------------------------------------------------------------
# Vortex detection
# ---------------------------------------------------------------------------

def winding_field(grid, cores, amp=None):
    """Transverse field carrying phase windings at the given (x, z, charge)
    cores, summed over a 3x3 block of periodic images."""
    theta = np.zeros(grid.shape)
    for (x0, z0, c) in cores:
        for ix in (-1, 0, 1):
            for iz in (-1, 0, 1):
                theta += c * np.arctan2(grid.zmesh - z0 + iz * grid.lz,
                                        grid.xmesh - x0 + ix * grid.lx)
    a = np.ones(grid.shape) if amp is None else amp
    m = np.stack([a * np.cos(theta), a * np.sin(theta), np.zeros(grid.shape)])
    return MagnetizationField(grid=grid, m=m, n=a.copy())


def test_vortex_pair_recovered_exactly():
    g = Grid2D(nx=32, nz=32, lx=16.0, lz=16.0)
    plus = (g.x[8] + 0.25, g.z[10] + 0.25)
    minus = (g.x[22] + 0.25, g.z[20] + 0.25)
    f = winding_field(g, [plus + (+1,), minus + (-1,)])
    for thr in (0.05, 0.15, 0.3, 0.5):
        vs = detect_vortices(f, threshold_frac=thr)
        assert len(vs) == 2
        assert vs.total_charge == 0
        by_charge = {v.charge: v for v in vs.vortices}
        assert abs(by_charge[+1].x_um - plus[0]) < 1e-9
        assert abs(by_charge[+1].z_um - plus[1]) < 1e-9
        assert abs(by_charge[-1].x_um - minus[0]) < 1e-9
        assert abs(by_charge[-1].z_um - minus[1]) < 1e-9


def test_helix_carries_no_vortices():
    g = Grid2D(nx=32, nz=32, lx=16.0, lz=16.0)
    m = magnetization(helix_field(g, 2.0, pitch=8.0), g)
    assert len(detect_vortices(m)) == 0


def test_adjacent_same_charge_plaquettes_merge():
    g = Grid2D(nx=32, nz=32, lx=16.0, lz=16.0)
    xp = g.x[8] + 0.25
    f = winding_field(g, [(xp, g.z[10] + 0.25, +1), (xp, g.z[11] + 0.25, +1),
                          (g.x[24] + 0.25, g.z[4] + 0.25, -1),
                          (g.x[4] + 0.25, g.z[24] + 0.25, -1)])
    vs = detect_vortices(f)
    # the tight same-charge pair reads as one vortex at the mean center
    assert len(vs) == 3
    assert vs.total_charge == -1
    merged = [v for v in vs.vortices if v.charge == +1]
    assert len(merged) == 1
    assert abs(merged[0].x_um - xp) < 1e-9
    assert abs(merged[0].z_um - (g.z[10] + 0.5)) < 1e-9


def test_seam_straddling_cluster_merges():
    g = Grid2D(nx=32, nz=32, lx=16.0, lz=16.0)
    xp = g.x[8] + 0.25
    f = winding_field(g, [(xp, g.z[10] + 0.25, +1), (xp, g.z[11] + 0.25, +1),
                          (g.x[24] + 0.25, g.z[4] + 0.25, -1),
                          (g.x[4] + 0.25, g.z[24] + 0.25, -1)])
    # rolling by -11 cells puts the merged pair across the periodic seam
    rolled = MagnetizationField(grid=g, m=np.roll(f.m, -11, axis=2),
                                n=np.roll(f.n, -11, axis=1))
    vs = detect_vortices(rolled)
    assert len(vs) == 3
    assert vs.total_charge == -1
    merged = [v for v in vs.vortices if v.charge == +1]
    assert len(merged) == 1
    assert abs(merged[0].x_um - xp) < 1e-9
    # circular mean of the two seam plaquettes lands on the boundary
    assert abs(abs(merged[0].z_um) - g.lz / 2.0) < 1e-9
    minus = sorted((v.x_um, v.z_um) for v in vs.vortices if v.charge == -1)
    expect = sorted([(g.x[24] + 0.25, g.z[4] + 0.25 - 5.5 + 16.0),
                     (g.x[4] + 0.25, g.z[24] + 0.25 - 5.5)])
    for got, want in zip(minus, expect):
        assert abs(got[0] - want[0]) < 1e-9
        assert abs(got[1] - want[1]) < 1e-9


def test_vortex_threshold_masks_weak_regions():
    g = Grid2D(nx=32, nz=32, lx=16.0, lz=16.0)
    plus = (g.x[8] + 0.25, g.z[10] + 0.25)
    minus = (g.x[22] + 0.25, g.z[20] + 0.25)
    amp = np.ones(g.shape)
    amp[7:11, 9:13] = 0.01
    f = winding_field(g, [plus + (+1,), minus + (-1,)], amp=amp)
    vs = detect_vortices(f, threshold_frac=0.15)
    assert len(vs) == 1
    assert vs.vortices[0].charge == -1
    vs = detect_vortices(f, threshold_frac=0.005)
    assert len(vs) == 2
    assert vs.total_charge == 0


def test_vortices_covariant_under_spin_rotation():
    g = Grid2D(nx=32, nz=32, lx=16.0, lz=16.0)
    f = winding_field(g, [(g.x[8] + 0.25, g.z[10] + 0.25, +1),
                          (g.x[22] + 0.25, g.z[20] + 0.25, -1)])
    alpha = 0.9
    ca, sa = math.cos(alpha), math.sin(alpha)
    mrot = np.stack([ca * f.m[0] - sa * f.m[1],
                     sa * f.m[0] + ca * f.m[1], f.m[2]])
    frot = MagnetizationField(grid=g, m=mrot, n=f.n.copy())
    a, b = detect_vortices(f), detect_vortices(frot)
    assert len(a) == len(b)
    for va, vb in zip(a.vortices, b.vortices):
        assert va.charge == vb.charge
        assert abs(va.x_um - vb.x_um) < 1e-9
        assert abs(va.z_um - vb.z_um) < 1e-9


def test_vortex_threshold_validation():
    g = Grid2D(nx=8, nz=8, lx=8.0, lz=8.0)
    f = MagnetizationField(grid=g, m=np.ones((3,) + g.shape),
                           n=np.ones(g.shape))
    for bad in (0.0, 1.0, -0.1):
        with pytest.raises(InvalidParameter):
            detect_vortices(f, threshold_frac=bad)
