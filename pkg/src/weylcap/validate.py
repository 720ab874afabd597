"""Named self-checks behind the command-line validation suite.

Each check exercises one identity or bound of the library at desk
scale, with fixed probe signals, fixed seeds, and fixed grids, so a
run is deterministic and finishes in well under a minute.  A check
reports the measured figure next to its threshold; a failure is
diagnosable from the summary line alone.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.interpolate import CubicSpline

from .capacity import (
    geometric_sum_check,
    gershgorin_log_gap,
    waterfill,
    waterfill_stability,
)
from .channel import (
    GridSpreading,
    PointMassSpreading,
    apply_weyl,
    channel_matrix,
    exponential_spreading,
    shift_pair_inner,
    spreading_to_symbol,
    twisted_convolution,
    twisted_product,
)
from .gabor import GaborSystem, Lattice, tight_window
from .tfcore import (
    SampledSignal,
    TimeGrid,
    cross_ambiguity,
    cross_wigner,
    decay_envelope_fit,
    fourier,
    grid_for_scale,
    inner,
    modulate,
    norm,
    translate,
)

__all__ = ["CheckResult", "check_names", "run_checks"]


@dataclass(frozen=True)
class CheckResult:
    """Outcome of one named self-check.

    Parameters
    ----------
    name : str
        Registry name of the check.
    passed : bool
        Whether the measured figure stayed within the threshold.
    measure : float
        The figure the check measures (a relative error, a ratio, or
        an excess over a bound, as described by ``detail``).
    threshold : float
        Largest acceptable value of ``measure``.
    detail : str
        One-line description of the measured figure.
    """

    name: str
    passed: bool
    measure: float
    threshold: float
    detail: str


def _probe(grid: TimeGrid, center: float, freq: float, width: float) -> SampledSignal:
    """Unit-norm modulated Gaussian bump."""
    t = grid.points
    vals = np.exp(-((t - center) ** 2) / (2.0 * width**2) + 2j * np.pi * freq * t)
    f = SampledSignal(grid, vals)
    return SampledSignal(grid, vals / norm(f))


def check_frame_tightness() -> CheckResult:
    """Frame operator of the dense system acts as rho^2 times identity."""
    worst = 0.0
    # the wide-window config needs the larger grid so the outer atoms
    # clear the wrap guard
    for s, rho, reach, n, half in ((1.0, 1.5, 10, 1024, 8.0), (4.0, 1.2, 11, 2048, 12.0)):
        root = np.sqrt(s)
        lattice = Lattice(root / rho, 1.0 / (root * rho))
        psi = tight_window(s, lattice, grid_for_scale(s, n=n, half_width=half))
        f = _probe(psi.grid, 0.0, 0.4 / root, 0.8 * root)
        system = GaborSystem(psi, lattice, range(-reach, reach + 1), range(-reach, reach + 1))
        sf = system.frame_apply(f)
        resid = norm(SampledSignal(f.grid, sf.values - rho**2 * f.values)) / rho**2
        energy = np.sum(np.abs(system.analysis(f)) ** 2)
        worst = max(worst, resid, abs(energy - rho**2) / rho**2)
    return CheckResult(
        "frame_tightness",
        worst <= 1e-6,
        float(worst),
        1e-6,
        "largest relative deviation of the frame operator from rho^2 times "
        "the identity, over window scales 1 and 4",
    )


def check_weyl_wigner_pairing() -> CheckResult:
    """Operator inner product equals the symbol paired with the Wigner transform."""
    sp = exponential_spreading(2.0, 3.0, 0.7, phase_seed=11)
    grid = grid_for_scale(1.0, n=1024, half_width=12.0)
    pairs = [
        (_probe(grid, -0.2, 0.3, 1.0), _probe(grid, 0.4, -0.1, 0.8)),
        (_probe(grid, 0.0, 0.0, 1.2), _probe(grid, 0.5, 0.6, 1.0)),
        (_probe(grid, 0.3, -0.5, 0.9), _probe(grid, -0.4, 0.2, 1.1)),
    ]
    worst = 0.0
    for f, g in pairs:
        lhs = inner(apply_weyl(sp, f), g)
        wig = cross_wigner(f, g)
        sym = sp.symbol_on(wig.x_grid, wig.w_grid)
        rhs = np.sum(sym.values * wig.values) * wig.x_grid.dt * wig.w_grid.dt
        worst = max(worst, abs(lhs - rhs) / abs(lhs))
    return CheckResult(
        "weyl_wigner_pairing",
        worst <= 1e-8,
        float(worst),
        1e-8,
        "largest relative mismatch between <L f, g> and the symbol-Wigner "
        "pairing over three probe pairs",
    )


def check_weyl_shift_magnitude() -> CheckResult:
    """Shifted-atom inner products against their ambiguity-domain forms.

    Three clauses.  The spreading-domain formula for <L M T f, M T g>
    must match the direct operator pipeline at quadrature accuracy.
    The magnitude must stay under the convolution of |spreading| with
    the cross-ambiguity magnitude, which depends on the two shifts
    only through their differences.  For a point spreading the bound
    collapses to an ambiguity sample, and the magnitude attains it
    exactly for every choice of shift pair with the same differences.
    """
    sp = exponential_spreading(2.0, 3.0, 0.7, phase_seed=11)
    grid = grid_for_scale(1.0, n=1024, half_width=12.0)
    f = _probe(grid, -0.3, 0.25, 0.9)
    g = _probe(grid, 0.2, -0.15, 1.1)
    amb = cross_ambiguity(f, g)
    n = amb.x_grid.n
    dx = amb.x_grid.dt
    dw = amb.w_grid.dt
    abs_amb = np.abs(amb.values)
    pad = np.zeros((3 * n, 3 * n))
    pad[n : 2 * n, n : 2 * n] = abs_amb
    flipped = pad[::-1, :]
    shat_abs = np.abs(sp.values_at(amb.w_grid.points, amb.x_grid.points))

    def envelope(m: int, p: int) -> float:
        # |A(f, g)| at (x - m dx, -p dw - w), zero beyond the table
        block = flipped[n - 1 + p : 2 * n - 1 + p, n - m : 2 * n - m]
        return float(dx * dw * np.sum(shat_abs * block))

    def shifted_inner(ch, u: float, eta: float, v: float, gamma: float) -> complex:
        fh = modulate(translate(f, u), eta)
        gh = modulate(translate(g, v), gamma)
        return inner(apply_weyl(ch, fh), gh)

    worst = 0.0
    for tup in ((0.35, -0.27, 0.0, 0.0), (0.123, 0.456, -0.789, 0.321), (0.0, 0.0, 0.6, -0.4)):
        lhs = shifted_inner(sp, *tup)
        rhs = shift_pair_inner(sp, f, g, *tup)
        worst = max(worst, abs(lhs - rhs) / abs(lhs))
    for m, p in ((9, -5), (0, 0), (-14, 8)):
        bound = envelope(m, p)
        flat = abs(shifted_inner(sp, m * dx, p * dw, 0.0, 0.0))
        moved = abs(shifted_inner(sp, m * dx + 0.31, p * dw - 0.17, 0.31, -0.17))
        worst = max(worst, max(flat, moved) / bound - 1.0)
    point = PointMassSpreading(0.8 - 0.6j, 6 * dw, -11 * dx)
    for m, p in ((9, -5), (0, 0)):
        sample = abs(point.weight) * abs_amb[n // 2 - p - 6, n // 2 - 11 - m]
        flat = abs(shifted_inner(point, m * dx, p * dw, 0.0, 0.0))
        moved = abs(shifted_inner(point, m * dx + 0.31, p * dw - 0.17, 0.31, -0.17))
        worst = max(worst, abs(flat - sample) / sample, abs(moved - sample) / sample)
    return CheckResult(
        "weyl_shift_magnitude",
        worst <= 1e-6,
        float(worst),
        1e-6,
        "largest defect across the shifted-pair identities: spreading-domain "
        "form, magnitude-envelope convolution bound, point-mass equality",
    )


def _quadrant_rule(split: float, extent: float, order: int) -> tuple[np.ndarray, np.ndarray]:
    """Gauss-Legendre nodes on [-extent, extent] split at 0 and +-split."""
    base, wts = np.polynomial.legendre.leggauss(order)
    nodes = []
    weights = []
    for lo, hi in ((0.0, split), (split, extent)):
        half = 0.5 * (hi - lo)
        mid = 0.5 * (hi + lo)
        nodes.append(mid + half * base)
        weights.append(half * wts)
    pos = np.concatenate(nodes)
    w = np.concatenate(weights)
    return np.concatenate((-pos[::-1], pos)), np.concatenate((w[::-1], w))


def check_twisted_composition() -> CheckResult:
    """Composed spreading reproduces the sequentially applied operators."""
    left = exponential_spreading(2.0, 3.0, 0.7, phase_seed=11)
    right = exponential_spreading(2.5, 2.0, 0.5, phase_seed=7)
    comp = twisted_product(left, right)
    grid = grid_for_scale(1.0, n=2048, half_width=16.0)
    t = grid.points
    nodes_w, wts_w = _quadrant_rule(1.5, 6.0, 12)
    nodes_x, wts_x = _quadrant_rule(1.5, 6.0, 12)
    shat = comp.values_at(nodes_w, nodes_x)
    phase = np.exp(1j * np.pi * np.outer(nodes_w, nodes_x))
    wts2d = np.outer(wts_w, wts_x)
    e_mod = np.exp(2j * np.pi * np.outer(nodes_w, t))
    pairs = [
        (_probe(grid, 0.4, 0.3, 0.9), _probe(grid, -0.2, -0.15, 1.05)),
        (_probe(grid, -0.5, 0.1, 1.2), _probe(grid, 0.3, 0.45, 0.8)),
    ]
    worst = 0.0
    for f, g in pairs:
        spline = CubicSpline(t, f.values, extrapolate=False)
        shifted = np.nan_to_num(spline(t[None, :] + nodes_x[:, None]))
        u = shifted * np.conj(g.values)[None, :]
        bracket = grid.dt * (e_mod @ u.T)
        lhs = np.sum(wts2d * shat * phase * bracket)
        rhs = inner(apply_weyl(left, apply_weyl(right, f)), g)
        worst = max(worst, abs(lhs - rhs) / abs(rhs))
    return CheckResult(
        "twisted_composition",
        worst <= 1e-6,
        float(worst),
        1e-6,
        "largest relative mismatch between the composed-spreading pairing "
        "and the sequential application of both operators",
    )


def check_symbol_real_valued() -> CheckResult:
    """Symbol of the self-adjoint product L*L has no imaginary part.

    Uses the sampled-grid composition path, so the residual carries
    the Riemann error of the spreading grid; a broken twist phase
    drives it to order one.
    """
    sp = exponential_spreading(2.0, 2.5, 0.8, phase_seed=5)
    wg = TimeGrid(-4.5, 9.0 / 160, 160)
    xg = TimeGrid(-4.5, 9.0 / 160, 160)
    gs = GridSpreading(sp.values_on(wg, xg))
    comp = twisted_convolution(gs.adjoint().data, gs.data)
    tg = TimeGrid(-3.0, 6.0 / 48, 48)
    nug = TimeGrid(-3.0, 6.0 / 48, 48)
    sym = spreading_to_symbol(comp, tg, nug)
    ratio = float(np.max(np.abs(sym.values.imag)) / np.max(np.abs(sym.values.real)))
    return CheckResult(
        "symbol_real_valued",
        ratio <= 1e-3,
        ratio,
        1e-3,
        "peak imaginary part of the Gram-operator symbol relative to its "
        "peak real part, on the sampled composition path",
    )


def check_ambiguity_envelope() -> CheckResult:
    """Exponential window decay transfers to the ambiguity table.

    Fits decay rates to the window and its spectrum, takes the exact
    premise constant over the samples, and verifies the quarter-rate
    product envelope on the full ambiguity grid.
    """
    lattice = Lattice(1.0 / 1.5, 1.0 / 1.5)
    psi = tight_window(1.0, lattice)
    psi_hat = fourier(psi)
    _, c_time = decay_envelope_fit(psi)
    _, c_freq = decay_envelope_fit(psi_hat)
    prem = 0.0
    for sig, rate in ((psi, c_time), (psi_hat, c_freq)):
        amp = np.abs(sig.values)
        mask = amp > 1e-12
        prem = max(prem, np.max(amp[mask] * np.exp(rate * np.abs(sig.grid.points[mask]))))
    amb = cross_ambiguity(psi, psi)
    env = np.exp(
        0.25 * (c_time * np.abs(amb.x_grid.points)[None, :] + c_freq * np.abs(amb.w_grid.points)[:, None])
    )
    ratio = float(np.max(np.abs(amb.values) * env) / prem**2)
    return CheckResult(
        "ambiguity_envelope",
        ratio <= 1.0,
        ratio,
        1.0,
        "peak of the ambiguity table against the quarter-rate envelope, "
        "relative to the squared premise constant",
    )


def check_geometric_sum() -> CheckResult:
    """Shifted-lattice exponential sums stay under the fitted decay bound."""
    worst = 0.0
    for (r1, r2), p in (((1.0, 1.0), 1.0), ((1.0, 3.0), 0.7)):
        lhs, rhs = geometric_sum_check(r1, r2, p, 0.0, 1.0)
        fitted = lhs / rhs
        for sep in range(2, 21):
            l2, r2b = geometric_sum_check(r1, r2, p, 0.0, float(sep), fitted_c=fitted)
            worst = max(worst, l2 / r2b)
    return CheckResult(
        "geometric_sum",
        worst <= 1.0 + 1e-12,
        float(worst),
        1.0,
        "largest ratio of the lattice sum to its fitted geometric bound "
        "over separations 2 to 20 for one- and two-rate kernels",
    )


def _small_channel_matrix() -> np.ndarray:
    rho = 1.5
    dense = Lattice(1.0 / rho, 1.0 / rho)
    sparse = dense.adjoint()
    grid = grid_for_scale(1.0, n=1024, half_width=12.0)
    psi = tight_window(1.0, dense, grid)
    kl = np.arange(-1, 2)
    tx = GaborSystem(psi, sparse, kl, kl)
    rx_range = np.arange(-6, 7)
    rx = GaborSystem(SampledSignal(grid, psi.values / rho), dense, rx_range, rx_range)
    sp = exponential_spreading(3.0, 3.0, 1.0)
    return channel_matrix(sp, tx, rx)


def check_gershgorin_logbound() -> CheckResult:
    """Diagonal-versus-spectrum log gap stays under the row-sum bound."""
    rng = np.random.default_rng(42)
    worst = -np.inf
    for _ in range(10):
        b = rng.normal(size=(8, 16)) + 1j * rng.normal(size=(8, 16))
        gap, bound = gershgorin_log_gap((b @ b.conj().T) / 16.0)
        worst = max(worst, gap - bound)
    gap, bound = gershgorin_log_gap(_small_channel_matrix())
    worst = max(worst, gap - bound)
    return CheckResult(
        "gershgorin_logbound",
        worst <= 1e-9,
        float(worst),
        1e-9,
        "largest excess of the diagonal-minus-spectrum log sum gap over "
        "the off-diagonal row-sum bound; negative means slack",
    )


def check_waterfill_perturbation() -> CheckResult:
    """Water-filling allocations move by at most (L + 1) times the level shift."""
    rng = np.random.default_rng(77)
    worst = 0.0
    for _ in range(50):
        count = int(rng.integers(2, 9))
        noise_a = rng.uniform(0.05, 2.0, count)
        eps = 10.0 ** rng.uniform(-6.0, -1.0)
        noise_b = np.clip(noise_a + rng.uniform(-eps, eps, count), 1e-8, None)
        dev, bound = waterfill_stability(noise_a, noise_b, float(rng.uniform(0.5, 8.0)))
        if bound > 0.0:
            worst = max(worst, dev / bound)
    return CheckResult(
        "waterfill_perturbation",
        worst <= 1.0 + 1e-9,
        float(worst),
        1.0,
        "largest allocation deviation relative to the (L + 1) eps bound "
        "over 50 seeded level perturbations",
    )


def check_power_log_perturbation() -> CheckResult:
    """Per-term rate terms move within the allocation-sensitivity bound.

    Perturbs a random gain spectrum, water-fills both versions, and
    compares each log term's shift against the sensitivity coefficient
    with a fixed constant of 4.
    """
    rng = np.random.default_rng(123)
    eta2 = 0.5
    kappa = 4.0
    worst = 0.0
    for _ in range(20):
        count = int(rng.integers(3, 10))
        lam = np.sort(rng.uniform(0.05, 2.5, count))[::-1]
        scale = 10.0 ** rng.uniform(-5.0, -2.0)
        mu = np.clip(lam * (1.0 + rng.uniform(-scale, scale, count)), 1e-9, None)
        power = float(rng.uniform(1.0, 6.0))
        p_lam = waterfill(eta2 / lam, power)
        p_mu = waterfill(eta2 / mu, power)
        eps = float(np.max(np.abs(lam - mu)))
        dev = np.abs(np.log2(1 + p_lam * lam / eta2) - np.log2(1 + p_mu * mu / eta2))
        for idx in range(count):
            coef = p_lam[idx] / (eta2 + p_lam[idx])
            coef += (1.0 / lam[idx]) * (count + 1) * eta2 / (eta2 + p_lam[idx])
            worst = max(worst, (2.0 ** dev[idx] - 1.0) / (kappa * coef * eps))
    return CheckResult(
        "power_log_perturbation",
        worst <= 1.0,
        float(worst),
        1.0,
        "largest per-term rate shift relative to the sensitivity "
        "coefficient times 4, over 20 seeded spectra",
    )


_CHECKS = {
    "frame_tightness": check_frame_tightness,
    "weyl_wigner_pairing": check_weyl_wigner_pairing,
    "weyl_shift_magnitude": check_weyl_shift_magnitude,
    "twisted_composition": check_twisted_composition,
    "symbol_real_valued": check_symbol_real_valued,
    "ambiguity_envelope": check_ambiguity_envelope,
    "geometric_sum": check_geometric_sum,
    "gershgorin_logbound": check_gershgorin_logbound,
    "waterfill_perturbation": check_waterfill_perturbation,
    "power_log_perturbation": check_power_log_perturbation,
}


def check_names() -> list[str]:
    """Registry order of the available check names."""
    return list(_CHECKS)


def run_checks(names: list[str] | None = None) -> list[CheckResult]:
    """Run the named checks, or all of them.

    Unknown names raise ValueError before anything runs.  A check that
    raises is reported as failed with the exception text in
    ``detail`` rather than aborting the remaining checks.
    """
    if names is None:
        selected = list(_CHECKS)
    else:
        unknown = [n for n in names if n not in _CHECKS]
        if unknown:
            msg = "unknown check name(s): {}; valid names: {}".format(
                ", ".join(unknown), ", ".join(_CHECKS)
            )
            raise ValueError(msg)
        selected = list(names)
    results = []
    for name in selected:
        try:
            results.append(_CHECKS[name]())
        except Exception as exc:
            results.append(CheckResult(name, False, float("nan"), float("nan"), f"raised: {exc}"))
    return results
