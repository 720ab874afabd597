"""Gabor systems and canonical tight windows on rectangular lattices.

A Gabor system places time-frequency shifted copies of one window on a
rectangular lattice,

    g_{k,l}(t) = e^{2 pi i l b t} g(t - k a),

with time step ``a`` and frequency step ``b``.  When a*b < 1 the
Gaussian system is an (oversampled) frame, and applying the inverse
square root of its frame operator to the window produces the canonical
tight window: the resulting system has frame constant equal to the
lattice density 1/(a*b), and by lattice duality the same window placed
on the adjoint lattice (1/b, 1/a) is an orthonormal family.  That one
window therefore serves both as an orthonormal transmit pulse on a
sparse lattice and as a tight analysis frame on the dense one.

The frame operator is assembled as an explicit matrix on the sampling
grid.  Summing the modulations first turns it into a Dirichlet-kernel
Toeplitz factor multiplying a Gaussian shift correlation, so the matrix
is real symmetric and one eigendecomposition yields the inverse square
root.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy.linalg import toeplitz

from .tfcore import SampledSignal, TimeGrid, gaussian_window, grid_for_scale, norm

__all__ = [
    "Lattice",
    "GaborSystem",
    "tight_window",
]

# relative eigenvalue floor below which frame-operator modes are discarded
_EIG_CUTOFF = 1e-8


@dataclass(frozen=True, slots=True)
class Lattice:
    """Rectangular time-frequency lattice with steps (time_step, freq_step)."""

    time_step: float
    freq_step: float

    def __post_init__(self):
        if self.time_step <= 0.0 or self.freq_step <= 0.0:
            msg = (
                f"lattice steps must be positive, got "
                f"({self.time_step}, {self.freq_step})"
            )
            raise ValueError(msg)

    @property
    def density(self) -> float:
        """Points per unit time-frequency area, 1/(time_step*freq_step)."""
        return 1.0 / (self.time_step * self.freq_step)

    def adjoint(self) -> "Lattice":
        """Dual lattice (1/freq_step, 1/time_step).

        A window generating a tight frame on this lattice generates an
        orthogonal family on the adjoint one and vice versa.
        """
        return Lattice(1.0 / self.freq_step, 1.0 / self.time_step)


class GaborSystem:
    """Finite family of lattice shifts of a window on a sampling grid.

    Atoms are ``atom(k, l) = modulate(translate(window, k*a), l*b)`` for
    ``k`` in ``k_values`` and ``l`` in ``l_values``; the window carries
    its own center, so ``k`` counts lattice steps relative to it.

    Parameters
    ----------
    window : SampledSignal
        Prototype pulse, normally unit norm.
    lattice : Lattice
        Shift steps (a, b).
    k_values, l_values : array_like of int
        Time and frequency shift indices.
    """

    def __init__(self, window: SampledSignal, lattice: Lattice, k_values, l_values):
        self.window = window
        self.lattice = lattice
        self.k_values = np.atleast_1d(np.asarray(k_values, dtype=int))
        self.l_values = np.atleast_1d(np.asarray(l_values, dtype=int))
        if self.k_values.ndim != 1 or self.l_values.ndim != 1:
            raise ValueError("shift indices must be one-dimensional")
        grid = window.grid
        if abs(self.k_values).max() * lattice.time_step > 0.5 * grid.span:
            raise ValueError("time shifts exceed half the grid span and would wrap")
        if abs(self.l_values).max() * lattice.freq_step > grid.nyquist:
            raise ValueError("frequency shifts exceed the grid Nyquist band")
        self.atoms = self._build_atoms()

    def _build_atoms(self) -> np.ndarray:
        grid = self.window.grid
        n = grid.n
        nu = np.fft.fftfreq(n, grid.dt)
        spec = np.fft.fft(self.window.values)
        shifts = self.lattice.time_step * self.k_values
        ramps = np.exp(-2j * np.pi * np.outer(shifts, nu))
        translated = np.fft.ifft(spec[None, :] * ramps, axis=1).T  # n x K
        freqs = self.lattice.freq_step * self.l_values
        mods = np.exp(2j * np.pi * np.outer(grid.points, freqs))  # n x L
        atoms = translated[:, :, None] * mods[:, None, :]
        return atoms.reshape(n, self.k_values.size * self.l_values.size)

    @property
    def labels(self) -> list[tuple[int, int]]:
        """Index pairs (k, l) in atom column order (k outer, l inner)."""
        return [(int(k), int(l)) for k in self.k_values for l in self.l_values]

    def atom(self, k: int, l: int) -> SampledSignal:
        ik = int(np.flatnonzero(self.k_values == k)[0])
        il = int(np.flatnonzero(self.l_values == l)[0])
        col = self.atoms[:, ik * self.l_values.size + il]
        return SampledSignal(self.window.grid, col.copy())

    def analysis(self, f: SampledSignal) -> np.ndarray:
        """Coefficients <f, atom(k, l)> in column order."""
        if not f.grid.close_to(self.window.grid):
            raise ValueError("signal grid does not match the system grid")
        return f.grid.dt * (self.atoms.conj().T @ f.values)

    def synthesis(self, coeffs: np.ndarray) -> SampledSignal:
        coeffs = np.asarray(coeffs, dtype=np.complex128).ravel()
        if coeffs.size != self.atoms.shape[1]:
            msg = f"expected {self.atoms.shape[1]} coefficients, got {coeffs.size}"
            raise ValueError(msg)
        return SampledSignal(self.window.grid, self.atoms @ coeffs)

    def gram(self) -> np.ndarray:
        """Matrix of pairwise atom inner products."""
        return self.window.grid.dt * (self.atoms.conj().T @ self.atoms)

    def frame_apply(self, f: SampledSignal) -> SampledSignal:
        """Apply the frame operator sum_{k,l} <f, g_kl> g_kl.

        Warns when the outermost shift shell carries more than 1e-10 of
        the signal's energy, which means the finite index ranges
        truncate the lattice sum for this input.
        """
        coeffs = self.analysis(f)
        c = coeffs.reshape(self.k_values.size, self.l_values.size)
        interior = np.zeros(c.shape, dtype=bool)
        interior[1:-1, 1:-1] = True
        edge_energy = float(np.sum(np.abs(c[~interior]) ** 2))
        if edge_energy > 1e-10 * norm(f) ** 2:
            warnings.warn(
                "outermost lattice shell carries significant energy; "
                "enlarge the shift ranges",
                RuntimeWarning,
                stacklevel=2,
            )
        return self.synthesis(coeffs)


def _frame_matrix(
    profile: np.ndarray, grid: TimeGrid, time_step: float, freq_step: float, l_max: int
) -> np.ndarray:
    """Frame operator matrix for real window shift profiles.

    ``profile[:, k]`` holds the window translated by the k-th lattice
    time shift.  The sum over modulations collapses to a Dirichlet
    kernel in t_i - t_j, a Toeplitz factor multiplying the shift
    correlation profile @ profile.T.
    """
    n = grid.n
    corr = profile @ profile.T
    lags = np.arange(n) * grid.dt
    harmonics = np.arange(1, l_max + 1) * freq_step
    dirichlet = 1.0 + 2.0 * np.cos(2.0 * np.pi * np.outer(lags, harmonics)).sum(axis=1)
    return grid.dt * toeplitz(dirichlet) * corr


@lru_cache(maxsize=32)
def _tight_window_values(
    s: float, a0: float, b0: float, t0: float, dt: float, n: int
) -> np.ndarray:
    grid = TimeGrid(t0=t0, dt=dt, n=n)
    g = gaussian_window(s, grid=grid)
    t = grid.points
    tc = grid.midpoint

    k_max = int(np.ceil(0.5 * grid.span / a0)) + 1
    shifts = a0 * np.arange(-k_max, k_max + 1)
    profile = np.exp(-np.pi * (t[:, None] - tc - shifts[None, :]) ** 2 / s)
    profile *= (2.0 / s) ** 0.25

    # modulations must cover the window band, including the exponential
    # spectral tail of the tight window, plus mixing harmonics
    nu_cov = 12.0 / np.sqrt(s) + 6.0 * b0
    if nu_cov > 0.95 * grid.nyquist:
        msg = (
            f"grid Nyquist {grid.nyquist:.3g} cannot hold the modulation "
            f"coverage {nu_cov:.3g}; refine the grid"
        )
        raise ValueError(msg)
    l_max = int(np.ceil(nu_cov / b0))

    S = _frame_matrix(profile, grid, a0, b0, l_max)
    lam, U = np.linalg.eigh(S)
    keep = lam > _EIG_CUTOFF * lam[-1]
    coef = U.T @ g.values.real
    lost = float(np.sum(coef[~keep] ** 2) / np.sum(coef**2))
    if lost > 1e-10:
        msg = (
            f"window leaks fraction {lost:.3e} of its energy outside the "
            f"resolvable frame range; the lattice is too close to critical "
            f"density for this grid"
        )
        raise RuntimeError(msg)
    psi = U[:, keep] @ (coef[keep] / np.sqrt(lam[keep]))

    # the canonical normalized-tight window has squared norm a*b exactly
    nrm2 = grid.dt * float(np.sum(psi**2))
    if abs(nrm2 / (a0 * b0) - 1.0) > 1e-6:
        msg = (
            f"canonical window norm^2 {nrm2:.9f} deviates from the lattice "
            f"cell area {a0 * b0:.9f}; frame operator truncation failed"
        )
        raise RuntimeError(msg)
    out = psi / np.sqrt(nrm2)
    out.flags.writeable = False
    return out


def tight_window(
    s: float,
    lattice: Lattice,
    grid: TimeGrid | None = None,
    n: int = 1024,
) -> SampledSignal:
    """Unit-norm canonical tight window for a Gaussian of scale ``s``.

    Computes S^{-1/2} g_s for the frame operator S of the Gaussian
    system on ``lattice`` and rescales to unit norm.  The returned
    window psi satisfies, up to grid accuracy,

    * the system of psi on ``lattice`` is a tight frame with frame
      constant equal to the lattice density, and
    * the system of psi on ``lattice.adjoint()`` is orthonormal.

    Parameters
    ----------
    s : float
        Gaussian time scale.
    lattice : Lattice
        Analysis lattice; its density must exceed one.
    grid : TimeGrid, optional
        Sampling grid; defaults to ``grid_for_scale(s, n)``.
    n : int
        Grid length used when ``grid`` is None.

    Raises
    ------
    ValueError
        If the lattice density is at or below one: by the Balian-Low
        obstruction no well-localized window generates a frame there.
    RuntimeError
        If the frame operator is too ill-conditioned on the grid for
        the inverse square root to converge.
    """
    if lattice.density <= 1.0 + 1e-12:
        msg = (
            f"lattice density {lattice.density:.6g} <= 1: critically sampled "
            f"or sparser lattices admit no well-localized frame (Balian-Low), "
            f"so no tight window exists"
        )
        raise ValueError(msg)
    if grid is None:
        grid = grid_for_scale(s, n=n)
    vals = _tight_window_values(
        float(s), lattice.time_step, lattice.freq_step, grid.t0, grid.dt, grid.n
    )
    return SampledSignal(grid, vals.copy())
