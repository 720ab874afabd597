"""Panel quadrature rules for kinked exponential integrands.

The spreading profiles used throughout the channel model look like
``e^{-rate |x|}`` times smooth oscillatory factors.  The absolute
value puts a kink at the origin, which ruins uniform-grid trapezoid
accuracy, so integrals are done with composite Gauss-Legendre panels
split at zero.  Panel length is set from the expected oscillation
bandwidth of the smooth factor: a panel of order ``g`` resolves about
``g / pi`` cycles, and sizing panels to hold well under that keeps the
rule accurate to near machine precision.
"""

from __future__ import annotations

import numpy as np
from numpy.polynomial.legendre import leggauss

__all__ = ["half_line_rule", "symmetric_rule", "segmented_rule", "decay_cutoff"]

# largest node count a single rule may request
NODE_BUDGET = 10_000_000


def decay_cutoff(rate: float, amplitude: float = 1.0, eps: float = 1e-10) -> float:
    """Truncation point X with e^{-rate X} * amplitude = eps."""
    if rate <= 0.0:
        raise ValueError(f"decay rate must be positive, got {rate}")
    return float(np.log(max(amplitude, eps) / eps) / rate)


def _panel_edges(extent: float, panel: float) -> np.ndarray:
    m = max(1, int(np.ceil(extent / panel)))
    return np.linspace(0.0, extent, m + 1)


def half_line_rule(
    rate: float,
    bandwidth: float,
    amplitude: float = 1.0,
    eps: float = 1e-10,
    order: int = 16,
    extent: float | None = None,
) -> tuple[np.ndarray, np.ndarray]:
    """Composite Gauss-Legendre rule on [0, X] for e^{-rate x} factors.

    Parameters
    ----------
    rate : float
        Exponential decay rate of the integrand envelope.
    bandwidth : float
        Largest oscillation frequency (in cycles per unit) of the
        smooth factor multiplying the envelope.
    amplitude : float
        Envelope amplitude at the origin, used only for the cutoff.
    eps : float
        Neglected-tail threshold; X = ln(amplitude/eps) / rate.
    order : int
        Gauss-Legendre order per panel.
    extent : float, optional
        Override for the truncation point X.

    Returns
    -------
    (nodes, weights) : tuple of ndarray
    """
    X = decay_cutoff(rate, amplitude, eps) if extent is None else float(extent)
    # hold panels to ~order/8 cycles and to a few e-foldings of the envelope
    panel = min(0.125 * order / max(bandwidth, 1e-12), 4.0 / rate, X)
    edges = _panel_edges(X, panel)
    xs, ws = leggauss(order)
    mids = 0.5 * (edges[1:] + edges[:-1])
    halfs = 0.5 * (edges[1:] - edges[:-1])
    nodes = (mids[:, None] + halfs[:, None] * xs[None, :]).ravel()
    weights = (halfs[:, None] * ws[None, :]).ravel()
    if nodes.size > NODE_BUDGET:
        raise RuntimeError(
            f"quadrature rule exceeds the node budget: {nodes.size} > {NODE_BUDGET}"
        )
    return nodes, weights


def symmetric_rule(
    rate: float,
    bandwidth: float,
    amplitude: float = 1.0,
    eps: float = 1e-10,
    order: int = 16,
    extent: float | None = None,
) -> tuple[np.ndarray, np.ndarray]:
    """Composite rule on [-X, X] split at the kink at zero."""
    nodes, weights = half_line_rule(rate, bandwidth, amplitude, eps, order, extent)
    if 2 * nodes.size > NODE_BUDGET:
        raise RuntimeError(
            f"quadrature rule exceeds the node budget: {2 * nodes.size} > {NODE_BUDGET}"
        )
    return (
        np.concatenate([-nodes[::-1], nodes]),
        np.concatenate([weights[::-1], weights]),
    )


def segmented_rule(
    rate: float,
    bandwidth: float,
    amplitude: float = 1.0,
    eps: float = 1e-10,
    order: int = 16,
    extent: float | None = None,
    breakpoints: tuple[float, ...] = (),
) -> tuple[np.ndarray, np.ndarray]:
    """Composite rule on [-X, X] split at zero and at extra kinks.

    Convolving two kinked envelopes moves one kink to the convolution
    offset, so the offset must be a panel boundary as well.
    """
    X = decay_cutoff(rate, amplitude, eps) if extent is None else float(extent)
    panel = min(0.125 * order / max(bandwidth, 1e-12), 4.0 / rate, X)
    cuts = {-X, 0.0, X}
    cuts.update(float(b) for b in breakpoints if -X < float(b) < X)
    pts = sorted(cuts)
    xs, ws = leggauss(order)
    node_parts = []
    weight_parts = []
    for lo, hi in zip(pts[:-1], pts[1:]):
        m = max(1, int(np.ceil((hi - lo) / panel)))
        edges = np.linspace(lo, hi, m + 1)
        mids = 0.5 * (edges[1:] + edges[:-1])
        halfs = 0.5 * (edges[1:] - edges[:-1])
        node_parts.append((mids[:, None] + halfs[:, None] * xs[None, :]).ravel())
        weight_parts.append((halfs[:, None] * ws[None, :]).ravel())
    nodes = np.concatenate(node_parts)
    weights = np.concatenate(weight_parts)
    if nodes.size > NODE_BUDGET:
        raise RuntimeError(
            f"quadrature rule exceeds the node budget: {nodes.size} > {NODE_BUDGET}"
        )
    return nodes, weights
