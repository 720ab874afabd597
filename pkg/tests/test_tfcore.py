"""Shift, transform, ambiguity and Wigner tests against quadrature oracles.

Oracles are computed by direct Riemann/trapezoid quadrature of the
defining integrals on fine auxiliary grids, independent of the FFT
paths under test.
"""

import numpy as np
import pytest

from weylcap.tfcore import (
    SampledSignal,
    TimeGrid,
    cross_ambiguity,
    cross_wigner,
    decay_envelope_fit,
    fourier,
    gaussian_window,
    grid_for_scale,
    inner,
    modulate,
    norm,
    translate,
)


def unit_gauss(t):
    return 2.0 ** 0.25 * np.exp(-np.pi * t**2)


def rand_signal(grid, seed, t_scale=1.0, f_scale=2.0):
    # random smooth signal supported well inside the grid in both domains
    r = np.random.default_rng(seed)
    t = grid.points - grid.midpoint
    v = (r.standard_normal(grid.n) + 1j * r.standard_normal(grid.n)) * np.exp(
        -0.5 * (t / t_scale) ** 2
    )
    nu = np.fft.fftfreq(grid.n, grid.dt)
    v = np.fft.ifft(np.fft.fft(v) * np.exp(-0.5 * (nu / f_scale) ** 2))
    sig = SampledSignal(grid, v)
    sig.values /= sig.norm()
    return sig


# ---------------------------------------------------------------- grids


def test_grid_validation():
    with pytest.raises(ValueError):
        TimeGrid(0.0, -0.1, 64)
    with pytest.raises(ValueError):
        TimeGrid(0.0, 0.1, 63)
    g = TimeGrid(-3.2, 0.1, 64)
    assert g.points.shape == (64,)
    assert g.midpoint == pytest.approx(0.0)
    f = g.frequency_grid()
    assert f.n == g.n
    assert f.dt == pytest.approx(1.0 / (g.n * g.dt))
    assert f.points[g.n // 2] == pytest.approx(0.0)


def test_gaussian_window_rejects_truncating_grid():
    grid = TimeGrid(-2.0, 4.0 / 64, 64)  # spans [-2, 2), far too tight for s=4
    with pytest.raises(ValueError):
        gaussian_window(4.0, grid=grid)


def test_gaussian_window_unit_norm_and_variance_scaling():
    # oracle: Var_t(g_s) = s / (4 pi), so scaling s -> 4s quadruples it
    for s in (1.0, 4.0):
        g = gaussian_window(s)
        assert norm(g) == pytest.approx(1.0, abs=1e-13)
        t = g.grid.points
        var = g.grid.dt * np.sum(t**2 * np.abs(g.values) ** 2)
        assert var == pytest.approx(s / (4.0 * np.pi), rel=1e-10)


# ------------------------------------------------------- shift operators


def test_translate_gaussian_overlap_oracle():
    # quadrature oracle for <T_1 g, g> on a fine independent grid
    tt = np.linspace(-30.0, 30.0, 600_001)
    oracle = np.trapezoid(unit_gauss(tt - 1.0) * unit_gauss(tt), tt)
    assert oracle == pytest.approx(np.exp(-np.pi / 2.0), abs=1e-12)

    g = gaussian_window(1.0)
    val = inner(translate(g, 1.0), g)
    assert val == pytest.approx(oracle, abs=1e-10)


def test_translate_norm_preserved_and_off_grid():
    grid = grid_for_scale(1.0, n=512)
    f = rand_signal(grid, 7)
    for x in (0.37 * grid.dt, 3.0, -1.2345):
        assert norm(translate(f, x)) == pytest.approx(norm(f), rel=1e-12)
    # integer multiples of dt reduce to exact sample rolls
    shifted = translate(f, 5 * grid.dt)
    assert np.allclose(shifted.values, np.roll(f.values, 5), atol=1e-12)


def test_commutation_relation_phase():
    # T_x M_w = e^{-2 pi i x w} M_w T_x
    grid = grid_for_scale(1.0, n=512)
    f = rand_signal(grid, 11)
    x, w = 0.73, 1.31
    lhs = translate(modulate(f, w), x)
    rhs = modulate(translate(f, x), w)
    phase = np.exp(-2j * np.pi * x * w)
    assert np.max(np.abs(lhs.values - phase * rhs.values)) < 1e-10


# ------------------------------------------------------------- transform


def test_fourier_gaussian_self_dual_and_scale_swap():
    for s in (1.0, 4.0):
        g = gaussian_window(s)
        ghat = fourier(g)
        w = ghat.grid.points
        expect = (2.0 * s) ** 0.25 * np.exp(-np.pi * s * w**2)
        assert np.max(np.abs(ghat.values - expect)) < 1e-8


def test_fourier_unitary_and_shift_phase():
    grid = grid_for_scale(1.0, n=512)
    f = rand_signal(grid, 3)
    fhat = fourier(f)
    assert norm(fhat) == pytest.approx(norm(f), rel=1e-12)
    # translation becomes a phase ramp: (T_x f)^ = e^{-2 pi i x w} fhat
    x = 0.83
    lhs = fourier(translate(f, x))
    rhs = np.exp(-2j * np.pi * x * fhat.grid.points) * fhat.values
    assert np.max(np.abs(lhs.values - rhs)) < 1e-9
    # modulation becomes translation in frequency
    w0 = 1.25
    lhs2 = fourier(modulate(f, w0))
    rhs2 = translate(fhat, w0)
    assert np.max(np.abs(lhs2.values - rhs2.values)) < 1e-9


def test_fourier_grid_position_independent():
    # same samples on a shifted grid window transform to the same function
    n = 512
    g1 = TimeGrid(-8.0, 16.0 / n, n)
    g2 = TimeGrid(-6.0, 16.0 / n, n)
    f1 = SampledSignal(g1, unit_gauss(g1.points))
    f2 = SampledSignal(g2, unit_gauss(g2.points))
    h1, h2 = fourier(f1), fourier(f2)
    assert np.max(np.abs(h1.values - h2.values)) < 1e-9


# ------------------------------------------------- ambiguity and Wigner


def ambiguity_oracle(x, w, s=1.0):
    # direct quadrature of the defining integral for g_s
    tt = np.linspace(-20.0, 20.0, 160_001)
    gs = (2.0 / s) ** 0.25 * np.exp(-np.pi * tt**2 / s)

    def at(tv):
        return (2.0 / s) ** 0.25 * np.exp(-np.pi * tv**2 / s)

    integ = at(tt + x / 2.0) * at(tt - x / 2.0) * np.exp(-2j * np.pi * tt * w)
    del gs
    return np.trapezoid(integ, tt)


def wigner_oracle(x, w, s=1.0):
    tt = np.linspace(-20.0, 20.0, 160_001)

    def at(tv):
        return (2.0 / s) ** 0.25 * np.exp(-np.pi * tv**2 / s)

    integ = at(x + tt / 2.0) * at(x - tt / 2.0) * np.exp(-2j * np.pi * tt * w)
    return np.trapezoid(integ, tt)


def test_gaussian_ambiguity_closed_form_matches_oracle():
    # |A(g_1, g_1)(x, w)| = e^{-pi (x^2 + w^2) / 2}
    for x, w in [(0.0, 0.0), (0.7, -0.3), (1.5, 1.0), (-0.4, 2.0)]:
        val = ambiguity_oracle(x, w)
        assert abs(val) == pytest.approx(
            np.exp(-np.pi * (x**2 + w**2) / 2.0), abs=1e-9
        )


def test_gaussian_wigner_closed_form_matches_oracle():
    # W(g_1, g_1)(x, w) = 2 e^{-2 pi (x^2 + w^2)}; real and positive
    for x, w in [(0.0, 0.0), (0.5, 0.25), (-0.3, 0.8)]:
        val = wigner_oracle(x, w)
        assert val.imag == pytest.approx(0.0, abs=1e-10)
        assert val.real == pytest.approx(
            2.0 * np.exp(-2.0 * np.pi * (x**2 + w**2)), abs=1e-9
        )


def test_cross_ambiguity_matches_oracle_grid():
    g = gaussian_window(1.0, n=512)
    amb = cross_ambiguity(g, g)
    # peak is norm^2 at the center indices
    n = g.grid.n
    assert amb.values[n // 2, n // 2] == pytest.approx(1.0, abs=1e-10)
    xs = amb.x_grid.points
    ws = amb.w_grid.points
    for ix, iw in [(n // 2 + 9, n // 2 - 4), (n // 2 - 17, n // 2 + 25)]:
        got = amb.values[iw, ix]
        want = ambiguity_oracle(xs[ix], ws[iw])
        assert got == pytest.approx(want, abs=1e-8)


def test_cross_wigner_matches_oracle_grid():
    g = gaussian_window(1.0, n=512)
    wig = cross_wigner(g, g)
    n = g.grid.n
    xs = wig.x_grid.points
    ws = wig.w_grid.points
    for ix, iw in [(n // 2, n // 2), (n // 2 + 7, n // 2 + 3), (n // 2 - 12, n // 2 + 20)]:
        got = wig.values[iw, ix]
        want = wigner_oracle(xs[ix], ws[iw])
        assert got == pytest.approx(want, abs=1e-8)


def test_wigner_marginal_mass_equals_norm_squared():
    grid = grid_for_scale(1.0, n=512)
    f = rand_signal(grid, 21)
    wig = cross_wigner(f, f)
    assert wig.integrate() == pytest.approx(norm(f) ** 2, rel=1e-8)
    assert np.max(np.abs(wig.values.imag)) < 1e-7 * np.max(np.abs(wig.values.real))


def test_moyal_identity():
    grid = grid_for_scale(1.0, n=512)
    f = rand_signal(grid, 31)
    g = rand_signal(grid, 32)
    wf = cross_wigner(f, f)
    wg = cross_wigner(g, g)
    lhs = wf.inner(wg)
    rhs = abs(inner(f, g)) ** 2
    assert lhs.real == pytest.approx(rhs, rel=1e-8)
    assert abs(lhs.imag) < 1e-10


def test_ambiguity_covariance_under_shifts():
    # |A(T_u M_e f, T_u M_e f)| = |A(f, f)| for any joint shift
    grid = grid_for_scale(1.0, n=256)
    f = rand_signal(grid, 41, t_scale=0.8, f_scale=0.8)
    shifted = translate(modulate(f, 0.8), -0.6)
    a0 = cross_ambiguity(f, f)
    a1 = cross_ambiguity(shifted, shifted)
    assert np.max(np.abs(np.abs(a1.values) - np.abs(a0.values))) < 1e-9


# ------------------------------------------------------------ decay fits


def test_decay_fit_recovers_exponential_rate():
    grid = TimeGrid(-20.0, 40.0 / 2048, 2048)
    c_true, C_true = 1.7, 0.9
    f = SampledSignal(grid, C_true * np.exp(-c_true * np.abs(grid.points)))
    C, c = decay_envelope_fit(f)
    assert c == pytest.approx(c_true, rel=1e-3)
    assert C == pytest.approx(C_true, rel=1e-2)


def test_decay_fit_gaussian_rate_grows_with_window():
    # a Gaussian has no single exponential rate: fitting deeper into the
    # tail must yield a strictly larger fitted rate
    g = gaussian_window(1.0)
    _, c_shallow = decay_envelope_fit(g, amp_lo=1e-4, amp_hi=1e-2)
    _, c_deep = decay_envelope_fit(g, amp_lo=1e-10, amp_hi=1e-6)
    assert c_deep > c_shallow * 1.5


def test_decay_fit_insufficient_tail_raises():
    grid = TimeGrid(-1.0, 2.0 / 64, 64)
    f = SampledSignal(grid, np.ones(64))
    with pytest.raises(ValueError):
        decay_envelope_fit(f)
