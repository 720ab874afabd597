"""Time-varying channels as Weyl operators of spreading functions.

A channel is the operator

    (L f)(t) = iint shat(w, x) e^{pi i x w} e^{2 pi i w t} f(t + x) dw dx,

where the spreading function shat(w, x) weights the elementary
time-frequency shift with Doppler w and time advance x.  The symmetric
half phase e^{pi i x w} fixes the symmetric quantization: composing two
channels corresponds to the twisted convolution

    (shat # that)(w, x) =
        iint shat(w', x') that(w - w', x - x')
             e^{-pi i (x w' - w x')} dw' dx',

the adjoint operator has spreading conj(shat(-w, -x)), and the Weyl
symbol, the plain two-dimensional inverse Fourier transform

    sigma(t, nu) = iint shat(w, x) e^{2 pi i (w t + x nu)} dw dx,

pairs with the cross-Wigner distribution: <L f, g> equals the integral
of sigma times W(f, g).

Concrete spreading models: separable exponentials F(w) G(x) with
optional smooth random phase modulation, single point masses (pure
time-frequency shifts), twisted products of separable factors, and
literal sampled grids.  Separable spreadings collapse both operator
application and composed symbols to one-dimensional quadratures, which
is what makes channel matrices over Gabor systems affordable.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np
from scipy.interpolate import CubicSpline

from .quadrature import decay_cutoff, segmented_rule, symmetric_rule
from .tfcore import SampledSignal, TFGridFunction, TimeGrid
from .gabor import GaborSystem

__all__ = [
    "ExponentialFactor",
    "PhasedExponentialFactor",
    "SeparableSpreading",
    "PointMassSpreading",
    "GridSpreading",
    "TwistedPairSpreading",
    "exponential_spreading",
    "point_mass_spreading",
    "twisted_product",
    "apply_weyl",
    "channel_matrix",
    "twisted_convolution",
    "spreading_to_symbol",
    "symbol_to_spreading",
    "gram_symbol",
    "shift_pair_inner",
]

# sign of the minus-oriented half of the composition phase
# e^{-pi i (x w' - w x')}; flipped only by the fault-injection switch to
# demonstrate that the consistency checks catch a broken convention.
# Only the minus-signed factor reads it, so a flip breaks the conjugate
# pairing instead of just reversing the composition order.
_TWIST_PHASE_SIGN = 1.0

# quadrature accuracy for factor profiles (oracle-grade)
_PROFILE_EPS = 1e-12
# above this many evaluation points, profiles go through a spline table
_PROFILE_TABLE_THRESHOLD = 65536


def _set_twist_phase_sign(sign: float) -> None:
    global _TWIST_PHASE_SIGN
    _TWIST_PHASE_SIGN = float(sign)


@dataclass(frozen=True)
class ExponentialFactor:
    """Two-sided exponential profile amplitude * e^{-rate |u|}."""

    rate: float
    amplitude: float = 1.0

    def __post_init__(self):
        if self.rate <= 0.0:
            raise ValueError(f"decay rate must be positive, got {self.rate}")

    @property
    def mod_band(self) -> float:
        """Bandwidth added by phase modulation (none here)."""
        return 0.0

    def values(self, u: np.ndarray) -> np.ndarray:
        return self.amplitude * np.exp(-self.rate * np.abs(np.asarray(u, dtype=float)))

    def profile(self, y: np.ndarray) -> np.ndarray:
        """Fourier profile int values(u) e^{2 pi i u y} du, a Lorentzian."""
        y = np.asarray(y, dtype=float)
        return self.amplitude * 2.0 * self.rate / (
            self.rate**2 + 4.0 * np.pi**2 * y**2
        ) + 0.0j

    def conj_flip(self) -> "ExponentialFactor":
        """Factor of the adjoint channel, conj(values(-u)); even and real."""
        return self


@dataclass(frozen=True)
class PhasedExponentialFactor:
    """Exponential profile with a smooth sinusoidal phase modulation.

    values(u) = amplitude e^{-rate |u|} e^{i depth sin(2 pi freq u + phase)}
    """

    rate: float
    amplitude: float
    depth: float
    freq: float
    phase: float

    def __post_init__(self):
        if self.rate <= 0.0:
            raise ValueError(f"decay rate must be positive, got {self.rate}")

    @property
    def mod_band(self) -> float:
        # largest instantaneous frequency of the phase factor, in cycles
        return self.depth * self.freq

    def values(self, u: np.ndarray) -> np.ndarray:
        u = np.asarray(u, dtype=float)
        theta = self.depth * np.sin(2.0 * np.pi * self.freq * u + self.phase)
        return self.amplitude * np.exp(-self.rate * np.abs(u)) * np.exp(1j * theta)

    def profile(self, y: np.ndarray) -> np.ndarray:
        y = np.asarray(y, dtype=float)
        flat = y.ravel()
        lo, hi = float(flat.min()), float(flat.max())
        cut = decay_cutoff(self.rate, self.amplitude, _PROFILE_EPS)
        if flat.size <= _PROFILE_TABLE_THRESHOLD:
            out = self._direct_profile(flat, max(abs(lo), abs(hi)), cut)
            return out.reshape(y.shape)
        # spline table: the profile is band limited to |u| <= cut cycles,
        # so step h keeps the h^4 interpolation error below 1e-8; the
        # table is kept on the instance and rebuilt only when a call
        # reaches past its range
        reach = max(abs(lo), abs(hi))
        cached = getattr(self, "_table", None)
        if cached is None or cached[0] < reach:
            h = 0.044 / (2.0 * np.pi * cut)
            r = 1.05 * reach
            pts = np.arange(-r - 2 * h, r + 3 * h, h)
            table = self._direct_profile(pts, r, cut)
            cached = (r, CubicSpline(pts, table))
            object.__setattr__(self, "_table", cached)
        out = cached[1](flat)
        return out.reshape(y.shape)

    def _direct_profile(self, y: np.ndarray, y_max: float, cut: float) -> np.ndarray:
        nodes, wts = symmetric_rule(
            self.rate, y_max + self.mod_band, self.amplitude, eps=_PROFILE_EPS
        )
        ker = wts * self.values(nodes)
        out = np.empty(y.size, dtype=np.complex128)
        step = max(1, (1 << 22) // nodes.size)
        for i in range(0, y.size, step):
            block = y[i : i + step]
            out[i : i + step] = np.exp(
                2j * np.pi * np.outer(block, nodes)
            ) @ ker
        return out

    def conj_flip(self) -> "PhasedExponentialFactor":
        # conj(values(-u)) keeps depth and freq, negating the phase offset
        return PhasedExponentialFactor(
            self.rate, self.amplitude, self.depth, self.freq, -self.phase
        )


@dataclass(frozen=True)
class SeparableSpreading:
    """Spreading function shat(w, x) = doppler(w) * delay(x)."""

    doppler: ExponentialFactor | PhasedExponentialFactor
    delay: ExponentialFactor | PhasedExponentialFactor

    def values_at(self, w: np.ndarray, x: np.ndarray) -> np.ndarray:
        """Value matrix shat(w_i, x_j) at arbitrary point sets."""
        return np.outer(self.doppler.values(np.asarray(w)), self.delay.values(np.asarray(x)))

    def values_on(self, w_grid: TimeGrid, x_grid: TimeGrid) -> TFGridFunction:
        vals = self.values_at(w_grid.points, x_grid.points)
        return TFGridFunction(x_grid=x_grid, w_grid=w_grid, values=vals)

    def symbol_on(self, t_grid: TimeGrid, nu_grid: TimeGrid) -> TFGridFunction:
        """Time-frequency symbol on a product grid.

        The symbol is the 2-d inverse Fourier transform of the spreading
        function; separability makes it an exact product of the two
        factor profiles, with no quadrature on the outer grid.
        """
        vals = np.outer(self.delay.profile(nu_grid.points), self.doppler.profile(t_grid.points))
        return TFGridFunction(x_grid=t_grid, w_grid=nu_grid, values=vals)

    def adjoint(self) -> "SeparableSpreading":
        return SeparableSpreading(self.doppler.conj_flip(), self.delay.conj_flip())


@dataclass(frozen=True)
class PointMassSpreading:
    """Point spreading weight * delta(w - doppler) delta(x - shift).

    The operator is weight e^{pi i shift doppler} M_doppler T_{-shift},
    a pure time-frequency shift; positive ``shift`` advances the signal.
    """

    weight: complex
    doppler: float
    shift: float

    def adjoint(self) -> "PointMassSpreading":
        return PointMassSpreading(np.conj(self.weight), -self.doppler, -self.shift)


@dataclass
class GridSpreading:
    """Spreading function given literally by samples on a product grid.

    Operator application integrates the samples with the product Riemann
    measure, so accuracy is limited by the grid resolution.  Both axes
    must be zero-centered (t0 = -(n/2) dt) so reflections and index
    differences stay on the grid.
    """

    data: TFGridFunction

    def __post_init__(self):
        for g, name in ((self.data.w_grid, "Doppler"), (self.data.x_grid, "delay")):
            if abs(g.t0 + 0.5 * g.n * g.dt) > 1e-9 * g.span:
                raise ValueError(f"{name} axis is not zero-centered")

    def adjoint(self) -> "GridSpreading":
        # conj(shat(-w, -x)); the reflection of the leftmost sample at
        # -X lands at +X, outside the grid, so that edge is zeroed
        # rather than wrapped
        v = self.data.values
        flipped = np.conj(np.roll(v[::-1, ::-1], (1, 1), axis=(0, 1)))
        flipped[0, :] = 0.0
        flipped[:, 0] = 0.0
        return GridSpreading(
            TFGridFunction(self.data.x_grid, self.data.w_grid, flipped)
        )


@dataclass(frozen=True)
class TwistedPairSpreading:
    """Twisted product left # right of two separable spreadings.

    Represents the composition L_left L_right.  Application composes the
    factor operators exactly; the composed spreading function itself is
    available on grids through the bracket form of the twisted
    convolution.
    """

    left: SeparableSpreading
    right: SeparableSpreading

    def values_at(self, w: np.ndarray, x: np.ndarray) -> np.ndarray:
        """Composed value matrix (left # right)(w_i, x_j) at point sets."""
        s = _TWIST_PHASE_SIGN
        F1, G1 = self.left.doppler, self.left.delay
        F2, G2 = self.right.doppler, self.right.delay
        w = np.atleast_1d(np.asarray(w, dtype=np.float64))
        x = np.atleast_1d(np.asarray(x, dtype=np.float64))
        eps = 1e-12

        # doppler bracket: int F1(w') F2(w - w') e^{-s pi i x w'} dw'
        # The second factor puts a kink at w' = w, so each target gets
        # its own rule with that point as a panel boundary.
        cut = decay_cutoff(F1.rate, F1.amplitude, eps)
        bw = 0.5 * np.abs(x).max() + F1.mod_band + F2.mod_band
        b1 = np.empty((w.size, x.size), dtype=np.complex128)
        for i, wi in enumerate(w):
            nodes, wts = segmented_rule(
                F1.rate, bw, eps=eps, extent=cut + abs(wi), breakpoints=(wi,)
            )
            ker = wts * F1.values(nodes) * F2.values(wi - nodes)
            b1[i] = ker @ np.exp(-1j * np.pi * s * np.outer(nodes, x))

        # delay bracket: int G1(x') G2(x - x') e^{+pi i w x'} dx'
        cut = decay_cutoff(G1.rate, G1.amplitude, eps)
        bw = 0.5 * np.abs(w).max() + G1.mod_band + G2.mod_band
        b2 = np.empty((w.size, x.size), dtype=np.complex128)
        for j, xj in enumerate(x):
            nodes, wts = segmented_rule(
                G1.rate, bw, eps=eps, extent=cut + abs(xj), breakpoints=(xj,)
            )
            ker = wts * G1.values(nodes) * G2.values(xj - nodes)
            b2[:, j] = np.exp(1j * np.pi * np.outer(w, nodes)) @ ker

        return b1 * b2

    def values_on(self, w_grid: TimeGrid, x_grid: TimeGrid) -> TFGridFunction:
        vals = self.values_at(w_grid.points, x_grid.points)
        return TFGridFunction(x_grid=x_grid, w_grid=w_grid, values=vals)

    def adjoint(self) -> "TwistedPairSpreading":
        return TwistedPairSpreading(self.right.adjoint(), self.left.adjoint())


def exponential_spreading(
    alpha: float, beta: float, amplitude: float = 1.0, phase_seed: int = 0
) -> SeparableSpreading:
    """Separable spreading amplitude e^{-beta |w|} e^{-alpha |x|}.

    Parameters
    ----------
    alpha : float
        Delay decay rate; must be at least 1 so the spreading stays
        concentrated well inside the unit time-frequency cell.
    beta : float
        Doppler decay rate, same constraint.
    amplitude : float
        Peak value at the origin.
    phase_seed : int
        0 keeps the spreading real and even.  Any other value draws a
        smooth sinusoidal phase modulation for each axis (depth in
        [0.2, 0.6], frequency in [0.03, 0.15]) from this seed.
    """
    if alpha < 1.0 or beta < 1.0:
        msg = (
            f"decay rates must be at least 1 (got alpha={alpha}, beta={beta}); "
            f"slower decay spreads the channel beyond the unit cell"
        )
        raise ValueError(msg)
    if phase_seed == 0:
        return SeparableSpreading(
            ExponentialFactor(beta, amplitude), ExponentialFactor(alpha)
        )
    rng = np.random.default_rng(phase_seed)
    depth = rng.uniform(0.2, 0.6, 2)
    freq = rng.uniform(0.03, 0.15, 2)
    phs = rng.uniform(0.0, 2.0 * np.pi, 2)
    return SeparableSpreading(
        PhasedExponentialFactor(beta, amplitude, depth[0], freq[0], phs[0]),
        PhasedExponentialFactor(alpha, 1.0, depth[1], freq[1], phs[1]),
    )


def point_mass_spreading(weight: complex, doppler: float, shift: float) -> PointMassSpreading:
    """Pure time-frequency shift channel."""
    return PointMassSpreading(complex(weight), float(doppler), float(shift))


def twisted_product(left, right):
    """Spreading of the composed channel L_left L_right.

    Point-mass pairs compose in closed form; separable pairs return a
    lazy twisted-pair object.
    """
    if isinstance(left, PointMassSpreading) and isinstance(right, PointMassSpreading):
        s = _TWIST_PHASE_SIGN
        phase = np.exp(
            -1j * np.pi * s * (right.shift * left.doppler - right.doppler * left.shift)
        )
        return PointMassSpreading(
            left.weight * right.weight * phase,
            left.doppler + right.doppler,
            left.shift + right.shift,
        )
    if isinstance(left, SeparableSpreading) and isinstance(right, SeparableSpreading):
        return TwistedPairSpreading(left, right)
    msg = f"cannot compose {type(left).__name__} with {type(right).__name__}"
    raise TypeError(msg)


def _signal_band(values: np.ndarray, grid: TimeGrid, rel: float = 1e-8) -> float:
    """Largest frequency carrying relative magnitude above ``rel``."""
    spec = np.abs(np.fft.fft(values, axis=0))
    if spec.ndim > 1:
        spec = spec.max(axis=1)
    nu = np.abs(np.fft.fftfreq(grid.n, grid.dt))
    sel = spec > rel * spec.max()
    return float(nu[sel].max())


def _translate_batch(spec: np.ndarray, nu: np.ndarray, x: float) -> np.ndarray:
    """Columns of ifft(spec) advanced by x: f_c(t + x)."""
    return np.fft.ifft(spec * np.exp(2j * np.pi * nu * x)[:, None], axis=0)


def _apply_separable(
    sp: SeparableSpreading, vals: np.ndarray, grid: TimeGrid, band: float, eps: float
) -> np.ndarray:
    F, G = sp.doppler, sp.delay
    t = grid.points
    w_cut = decay_cutoff(F.rate, F.amplitude, eps)
    bw = 0.5 * w_cut + band + G.mod_band
    xn, xw = symmetric_rule(G.rate, bw, G.amplitude, eps=eps)
    coef = xw * G.values(xn)
    prof = F.profile(t[:, None] + 0.5 * xn[None, :])  # n x Q
    spec = np.fft.fft(vals, axis=0)
    nu = np.fft.fftfreq(grid.n, grid.dt)
    out = np.zeros_like(vals, dtype=np.complex128)
    for q in range(xn.size):
        shifted = _translate_batch(spec, nu, xn[q])
        out += (coef[q] * prof[:, q])[:, None] * shifted
    return out


def _apply_grid(sp: GridSpreading, vals: np.ndarray, grid: TimeGrid) -> np.ndarray:
    data = sp.data
    w = data.w_grid.points
    x = data.x_grid.points
    if np.abs(x).max() > 0.4 * grid.span:
        warnings.warn(
            "delay support is a large fraction of the signal grid; "
            "translations will wrap",
            RuntimeWarning,
            stacklevel=3,
        )
    ker = data.values * (data.w_grid.dt * data.x_grid.dt)
    half = np.exp(1j * np.pi * np.outer(w, x))
    bracket = np.exp(2j * np.pi * np.outer(grid.points, w)) @ (ker * half)  # n x Q
    spec = np.fft.fft(vals, axis=0)
    nu = np.fft.fftfreq(grid.n, grid.dt)
    out = np.zeros_like(vals, dtype=np.complex128)
    for q in range(x.size):
        shifted = _translate_batch(spec, nu, x[q])
        out += bracket[:, q][:, None] * shifted
    return out


def _apply_point(sp: PointMassSpreading, vals: np.ndarray, grid: TimeGrid) -> np.ndarray:
    spec = np.fft.fft(vals, axis=0)
    nu = np.fft.fftfreq(grid.n, grid.dt)
    shifted = _translate_batch(spec, nu, sp.shift)
    carrier = np.exp(2j * np.pi * sp.doppler * grid.points)
    scale = sp.weight * np.exp(1j * np.pi * sp.shift * sp.doppler)
    return scale * carrier[:, None] * shifted


def _apply_matrix(spreading, vals, grid, band, eps):
    if isinstance(spreading, PointMassSpreading):
        return _apply_point(spreading, vals, grid)
    if isinstance(spreading, TwistedPairSpreading):
        inner = _apply_matrix(spreading.right, vals, grid, band, eps)
        inner_band = band + decay_cutoff(
            spreading.right.doppler.rate, spreading.right.doppler.amplitude, eps
        )
        return _apply_matrix(spreading.left, inner, grid, inner_band, eps)
    if isinstance(spreading, SeparableSpreading):
        return _apply_separable(spreading, vals, grid, band, eps)
    if isinstance(spreading, GridSpreading):
        return _apply_grid(spreading, vals, grid)
    raise TypeError(f"unknown spreading type {type(spreading).__name__}")


def apply_weyl(spreading, f: SampledSignal, band: float | None = None, eps: float = 1e-10) -> SampledSignal:
    """Apply the channel operator of ``spreading`` to a signal.

    Parameters
    ----------
    spreading
        Any spreading object from this module.
    f : SampledSignal
        Input signal; its content must sit well inside the grid in both
        time and frequency, since time shifts wrap at the edges.
    band : float, optional
        Frequency support bound of ``f`` used to size the delay
        quadrature; measured from the spectrum when omitted.
    eps : float
        Relative truncation level of the spreading tails.

    Returns
    -------
    SampledSignal
    """
    vals = f.values[:, None]
    if band is None:
        band = _signal_band(vals, f.grid)
    out = _apply_matrix(spreading, vals, f.grid, band, eps)
    return SampledSignal(f.grid, out[:, 0])


def channel_matrix(spreading, tx: GaborSystem, rx: GaborSystem, eps: float = 1e-10) -> np.ndarray:
    """Matrix of the channel between two Gabor systems.

    Entry [r, c] is <L a_c, b_r> for transmit atoms a_c and receive
    atoms b_r, in the systems' column orders.
    """
    grid = tx.window.grid
    if not rx.window.grid.close_to(grid):
        raise ValueError("transmit and receive systems live on different grids")
    band = _signal_band(tx.atoms, grid)
    transformed = _apply_matrix(spreading, tx.atoms, grid, band, eps)
    return grid.dt * (rx.atoms.conj().T @ transformed)


def twisted_convolution(a: TFGridFunction, b: TFGridFunction) -> TFGridFunction:
    """Twisted convolution of two sampled spreading functions.

    Both inputs must share identical zero-centered product grids; the
    output lives on the same grids and is exact up to the Riemann
    quadrature of the inputs and truncation at the grid edges.
    """
    if not (a.w_grid.close_to(b.w_grid) and a.x_grid.close_to(b.x_grid)):
        raise ValueError("spreading grids do not match")
    nw, nx = a.values.shape
    if (nw * nx) ** 2 > 1_000_000_000:
        raise RuntimeError(f"twisted convolution on a {nw} x {nx} grid is too large")
    for g, name in ((a.w_grid, "Doppler"), (a.x_grid, "delay")):
        if abs(g.t0 + 0.5 * g.n * g.dt) > 1e-9 * g.span:
            raise ValueError(f"{name} axis is not zero-centered")
    w = a.w_grid.points
    x = a.x_grid.points
    if np.ptp(x) * a.w_grid.dt > 1.0 or np.ptp(w) * a.x_grid.dt > 1.0:
        warnings.warn(
            "grid spacing cannot resolve the twist phase across the support",
            RuntimeWarning,
            stacklevel=2,
        )
    s = _TWIST_PHASE_SIGN
    pw = np.exp(1j * np.pi * np.outer(w, x))  # e^{+pi i w_i x_q}
    px = np.exp(-1j * np.pi * s * np.outer(x, w))  # e^{-s pi i x_j w_p}
    cell = a.w_grid.dt * a.x_grid.dt
    out = np.zeros((nw, nx), dtype=np.complex128)
    hw, hx = nw // 2, nx // 2
    for p in range(nw):
        i_lo, i_hi = max(0, p - hw), min(nw, p + hw)
        k_lo, k_hi = i_lo - p + hw, i_hi - p + hw
        for q in range(nx):
            src = a.values[p, q]
            if src == 0.0:
                continue
            j_lo, j_hi = max(0, q - hx), min(nx, q + hx)
            l_lo, l_hi = j_lo - q + hx, j_hi - q + hx
            out[i_lo:i_hi, j_lo:j_hi] += (
                (cell * src)
                * np.outer(pw[i_lo:i_hi, q], px[j_lo:j_hi, p])
                * b.values[k_lo:k_hi, l_lo:l_hi]
            )
    return TFGridFunction(x_grid=a.x_grid, w_grid=a.w_grid, values=out)


def spreading_to_symbol(shat: TFGridFunction, t_grid: TimeGrid, nu_grid: TimeGrid) -> TFGridFunction:
    """Weyl symbol sigma(t, nu) of a sampled spreading function.

    Plain 2-D inverse Fourier transform with the product Riemann
    measure; ``values[i, j]`` is sigma(t_j, nu_i).
    """
    w = shat.w_grid.points
    x = shat.x_grid.points
    cell = shat.w_grid.dt * shat.x_grid.dt
    e_nu = np.exp(2j * np.pi * np.outer(nu_grid.points, x))  # n_nu x Q
    e_t = np.exp(2j * np.pi * np.outer(w, t_grid.points))  # P x n_t
    vals = cell * (e_nu @ (shat.values.T @ e_t))
    return TFGridFunction(x_grid=t_grid, w_grid=nu_grid, values=vals)


def symbol_to_spreading(sym: TFGridFunction, w_grid: TimeGrid, x_grid: TimeGrid) -> TFGridFunction:
    """Inverse of :func:`spreading_to_symbol` on adequate grids."""
    t = sym.x_grid.points
    nu = sym.w_grid.points
    cell = sym.x_grid.dt * sym.w_grid.dt
    e_w = np.exp(-2j * np.pi * np.outer(t, w_grid.points))  # n_t x P
    e_x = np.exp(-2j * np.pi * np.outer(x_grid.points, nu))  # Q x n_nu
    vals = cell * (sym.values @ e_w).T @ e_x.T
    return TFGridFunction(x_grid=x_grid, w_grid=w_grid, values=vals)


def gram_symbol(
    spreading,
    t_grid: TimeGrid,
    nu_grid: TimeGrid,
    eps: float = 1e-10,
    realness_tol: float = 1e-8,
) -> TFGridFunction:
    """Weyl symbol of L* L, the channel's Gram operator.

    The result is real (the Gram operator is self-adjoint); a residual
    imaginary part above ``realness_tol`` of the peak raises
    RuntimeError.  Sampled spreadings carry Riemann-level error and
    need a looser gate than the default.  For separable spreadings the
    twisted convolution with the adjoint and the symbol transform
    collapse into two one-dimensional bracket integrals evaluated on
    the product grid.
    """
    if isinstance(spreading, PointMassSpreading):
        mag = abs(spreading.weight) ** 2
        vals = np.full((nu_grid.n, t_grid.n), mag)
        return TFGridFunction(x_grid=t_grid, w_grid=nu_grid, values=vals)
    if isinstance(spreading, GridSpreading):
        comp = twisted_convolution(spreading.adjoint().data, spreading.data)
        sym = spreading_to_symbol(comp, t_grid, nu_grid)
        return TFGridFunction(
            x_grid=t_grid,
            w_grid=nu_grid,
            values=_real_part_checked(sym.values, realness_tol),
        )
    if not isinstance(spreading, SeparableSpreading):
        raise TypeError(f"unsupported spreading type {type(spreading).__name__}")

    s = _TWIST_PHASE_SIGN
    adj = spreading.adjoint()
    F1, G1 = adj.doppler, adj.delay
    F2, G2 = spreading.doppler, spreading.delay
    t = t_grid.points
    nu = nu_grid.points

    # delay bracket: int G1(x) e^{2 pi i x nu} F2~(t + s x / 2) dx
    w_cut = decay_cutoff(F2.rate, F2.amplitude, eps)
    bw = float(np.abs(nu).max()) + 0.5 * w_cut + G1.mod_band + F2.mod_band
    xn, xw = symmetric_rule(G1.rate, bw, G1.amplitude, eps=eps)
    ker = xw * G1.values(xn)
    prof = F2.profile(t[:, None] + 0.5 * s * xn[None, :])  # n_t x Q
    b1 = (prof * ker[None, :]) @ np.exp(2j * np.pi * np.outer(xn, nu))

    # doppler bracket: int F1(w) e^{2 pi i w t} G2~(nu - s w / 2) dw
    x_cut = decay_cutoff(G2.rate, G2.amplitude, eps)
    bw = float(np.abs(t).max()) + 0.5 * x_cut + F1.mod_band + G2.mod_band
    wn, ww = symmetric_rule(F1.rate, bw, F1.amplitude, eps=eps)
    ker = ww * F1.values(wn)
    prof = G2.profile(nu[None, :] - 0.5 * s * wn[:, None])  # P x n_nu
    b2 = np.exp(2j * np.pi * np.outer(t, wn)) @ (prof * ker[:, None])

    vals = _real_part_checked((b1 * b2).T, realness_tol)
    return TFGridFunction(x_grid=t_grid, w_grid=nu_grid, values=vals)


def _real_part_checked(vals: np.ndarray, tol: float = 1e-8) -> np.ndarray:
    scale = np.abs(vals.real).max()
    resid = np.abs(vals.imag).max()
    if resid > tol * max(scale, 1e-300):
        msg = (
            f"symbol of a self-adjoint operator came out non-real "
            f"(residual {resid:.3e} against peak {scale:.3e})"
        )
        raise RuntimeError(msg)
    return vals.real.copy()


def shift_pair_inner(
    spreading: SeparableSpreading,
    f: SampledSignal,
    g: SampledSignal,
    u: float,
    eta: float,
    v: float,
    gamma: float,
    eps: float = 1e-10,
) -> complex:
    """<L M_eta T_u f, M_gamma T_v g> evaluated in the spreading domain.

    The shifted signals are e^{2 pi i eta t} f(t - u) and its analogue
    for g, matching the lattice atom convention.  Shifting both signals
    moves the channel integral onto the cross-ambiguity function of the
    unshifted pair,

        e^{2 pi i (eta u - gamma v)}
        iint shat(w, x) e^{i pi [w (u + v) + (eta + gamma)(x - u + v)]}
             A(f, g)(x - (u - v), (gamma - eta) - w) dw dx,

    which avoids ever forming the shifted signals.  Useful as an
    independent cross-check of the operator pipeline.
    """
    if not isinstance(spreading, SeparableSpreading):
        raise TypeError("spreading-domain pairing needs a separable spreading")
    F, G = spreading.doppler, spreading.delay
    grid = f.grid
    band = max(_signal_band(f.values[:, None], grid), _signal_band(g.values[:, None], grid))
    t_reach = 0.25 * grid.span

    wn, ww = symmetric_rule(
        F.rate, 0.5 * abs(u + v) + t_reach + F.mod_band, F.amplitude, eps=eps
    )
    xn, xw = symmetric_rule(
        G.rate, 0.5 * abs(eta + gamma) + band + G.mod_band, G.amplitude, eps=eps
    )
    svals = np.outer(F.values(wn), G.values(xn))
    phases = np.exp(
        1j * np.pi * (wn[:, None] * (u + v) + (eta + gamma) * (xn[None, :] - u + v))
    )

    # ambiguity values A(chi_q, w_p) for chi_q = x_q - (u - v) via exact
    # half-shift products and direct Fourier sums
    chi = xn - (u - v)
    wq = (gamma - eta) - wn
    spec_f = np.fft.fft(f.values)
    spec_g = np.fft.fft(g.values)
    nu = np.fft.fftfreq(grid.n, grid.dt)
    ramps = np.exp(1j * np.pi * np.outer(chi, nu))
    fplus = np.fft.ifft(spec_f[None, :] * ramps, axis=1)
    gminus = np.fft.ifft(spec_g[None, :] * np.conj(ramps), axis=1)
    h = fplus * np.conj(gminus)  # Q x n
    dft = np.exp(-2j * np.pi * np.outer(grid.points, wq))  # n x P
    amb = grid.dt * (h @ dft)  # Q x P, A(chi_q, w_p)

    carrier = np.exp(2j * np.pi * (eta * u - gamma * v))
    total = carrier * np.sum(np.outer(ww, xw) * svals * phases * amb.T)
    return complex(total)
