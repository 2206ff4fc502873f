"""Smooth periodic profile functions given by finite Fourier series.

f(t) = a0 + sum_m [ a_m cos(m w t) + b_m sin(m w t) ],  w = 2 pi / period.

The series is the package's concrete stand-in for an arbitrary smooth
periodic profile: every derivative is again a finite series, so derivative
evaluation is exact (no differencing), and sup-norm bounds for f and its
derivatives come straight from the coefficients.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

__all__ = ["FourierSeries"]


@dataclass(frozen=True, eq=False)
class FourierSeries:
    """Real finite Fourier series with a fixed period.

    `modes[m-1] = (a_m, b_m)` holds the cosine/sine coefficients of the
    m-th harmonic. An empty `modes` (or all-zero coefficients) is a
    constant function; `nonconstant` reports whether any harmonic is
    actually present.
    """

    period: float
    a0: float = 0.0
    modes: tuple[tuple[float, float], ...] = field(default_factory=tuple)

    def __post_init__(self):
        if not (self.period > 0.0 and np.isfinite(self.period)):
            raise ValueError(f"period must be positive and finite, got {self.period}")
        object.__setattr__(self, "modes",
                           tuple((float(a), float(b)) for a, b in self.modes))

    @property
    def omega(self) -> float:
        return 2.0 * np.pi / self.period

    @property
    def nonconstant(self) -> bool:
        return any(a != 0.0 or b != 0.0 for a, b in self.modes)

    def __call__(self, t, order: int = 0):
        """Evaluate the order-th derivative at t (scalar or array).

        d/dt [a cos + b sin](m w t) rotates the coefficient pair by 90
        degrees and scales by m w, so the k-th derivative is evaluated by
        phase shift: cos -> cos(x + k pi/2) etc.
        """
        if order < 0:
            raise ValueError("derivative order must be >= 0")
        t = np.asarray(t, dtype=float)
        out = np.zeros_like(t)
        if order == 0:
            out = out + self.a0
        w = self.omega
        half_pi = 0.5 * np.pi
        for m, (a, b) in enumerate(self.modes, start=1):
            if a == 0.0 and b == 0.0:
                continue
            scale = (m * w) ** order
            phase = m * w * t + order * half_pi
            out = out + scale * (a * np.cos(phase) + b * np.sin(phase))
        if out.ndim == 0:
            return float(out)
        return out

    def sup_bound(self, order: int = 0) -> float:
        """Coefficient bound for sup_t |f^(order)(t)|."""
        w = self.omega
        total = abs(self.a0) if order == 0 else 0.0
        for m, (a, b) in enumerate(self.modes, start=1):
            total += (m * w) ** order * float(np.hypot(a, b))
        return total
