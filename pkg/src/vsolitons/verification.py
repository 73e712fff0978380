"""Grid-based certification: PDE residuals, boundary residuals, asymptotics.

The exact fields are available pointwise, so finite differences are used
deliberately: truncation is then the only error and its observed order is
itself a test statistic (second order for the stencils used here).
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from typing import Callable, Optional, Sequence, Tuple

import numpy as np

from .asymptotics import beta_in, beta_out
from .dressing import reconstruct_field
from .errors import ValidationError, WindowError
from .mirror import HalfLineData, halfline_field
from .soldata import Mixed, Polarization, Robin, RotatedMixed, SolitonData


@dataclass(frozen=True, eq=False)
class FieldGrid:
    """Sampled complex vector field on a uniform rectangular (x, t) lattice."""

    x0: float
    x1: float
    t0: float
    t1: float
    nx: int
    nt: int
    values: np.ndarray  # (nx, nt, n) complex
    provenance: str = ""

    def __post_init__(self):
        if self.nx < 5 or self.nt < 5:
            raise ValidationError("grids need nx, nt >= 5 for the difference stencils")
        vals = np.asarray(self.values, dtype=np.complex128)
        if vals.ndim != 3 or vals.shape[:2] != (self.nx, self.nt):
            raise ValidationError(
                f"values must have shape (nx, nt, n), got {vals.shape}"
            )
        if not (self.x1 > self.x0 and self.t1 > self.t0):
            raise ValidationError("grid bounds must satisfy x1 > x0 and t1 > t0")
        object.__setattr__(self, "values", vals)

    @property
    def xs(self) -> np.ndarray:
        return np.linspace(self.x0, self.x1, self.nx)

    @property
    def ts(self) -> np.ndarray:
        return np.linspace(self.t0, self.t1, self.nt)

    @property
    def hx(self) -> float:
        return (self.x1 - self.x0) / (self.nx - 1)

    @property
    def ht(self) -> float:
        return (self.t1 - self.t0) / (self.nt - 1)

    @property
    def n(self) -> int:
        return self.values.shape[2]


def sample_grid(
    field_fn: Callable,
    x0: float,
    x1: float,
    t0: float,
    t1: float,
    nx: int,
    nt: int,
    provenance: str = "",
) -> FieldGrid:
    """Evaluate a vectorized field function on the lattice."""
    xs = np.linspace(x0, x1, nx)
    ts = np.linspace(t0, t1, nt)
    X, T = np.meshgrid(xs, ts, indexing="ij")
    values = np.asarray(field_fn(X, T), dtype=np.complex128)
    return FieldGrid(x0, x1, t0, t1, nx, nt, values, provenance)


def grid_for_data(data: SolitonData, x0, x1, t0, t1, nx, nt, provenance="") -> FieldGrid:
    return sample_grid(
        lambda X, T: reconstruct_field(data, X, T), x0, x1, t0, t1, nx, nt, provenance
    )


def pde_residual(grid: FieldGrid) -> float:
    """Max interior residual of i R_t + R_xx + 2 (R^dag R) R, second order."""
    V = grid.values
    hx, ht = grid.hx, grid.ht
    Vi = V[1:-1, 1:-1]
    Rt = (V[1:-1, 2:] - V[1:-1, :-2]) / (2.0 * ht)
    Rxx = (V[2:, 1:-1] - 2.0 * Vi + V[:-2, 1:-1]) / (hx * hx)
    density = np.sum(np.abs(Vi) ** 2, axis=-1, keepdims=True)
    res = 1j * Rt + Rxx + 2.0 * density * Vi
    return float(np.max(np.abs(res))) if res.size else 0.0


def boundary_residual(hl: HalfLineData, times: Sequence[float], h: float = 0.005) -> float:
    """Boundary-condition residual at x = 0 over the given times.

    Robin: max |R_x(0,t) - 2 alpha R(0,t)|; sign patterns: max over
    |R_p(0,t)| on the +1 components and |R_q,x(0,t)| on the -1 components.
    R_x uses the one-sided second-order stencil (-3R0 + 4R1 - R2)/(2h).
    """
    ts = np.asarray(list(times), dtype=np.float64)
    xs = np.array([0.0, h, 2.0 * h])
    F = halfline_field(hl, xs[:, None], ts[None, :])  # (3, nt, n)
    R0 = F[0]
    Rx0 = (-3.0 * F[0] + 4.0 * F[1] - F[2]) / (2.0 * h)
    spec = hl.spec
    if isinstance(spec, Robin):
        return float(np.max(np.abs(Rx0 - 2.0 * spec.alpha * R0)))
    if isinstance(spec, RotatedMixed):
        # the sign pattern applies in the rotated component basis
        R0 = R0 @ spec.unitary.T
        Rx0 = Rx0 @ spec.unitary.T
        signs = spec.signs
    elif isinstance(spec, Mixed):
        signs = spec.signs
    else:
        raise ValidationError(f"unknown boundary spec {spec!r}")
    plus = [i for i, s in enumerate(signs) if s == 1]
    minus = [i for i, s in enumerate(signs) if s == -1]
    res = 0.0
    if plus:
        res = max(res, float(np.max(np.abs(R0[:, plus]))))
    if minus:
        res = max(res, float(np.max(np.abs(Rx0[:, minus]))))
    return res


def _golden_max(fn: Callable[[float], float], a: float, b: float, xtol: float) -> float:
    """Golden-section maximizer on [a, b] to absolute position tolerance xtol."""
    inv_phi = (math.sqrt(5.0) - 1.0) / 2.0
    c = b - inv_phi * (b - a)
    d = a + inv_phi * (b - a)
    fc, fd = fn(c), fn(d)
    while (b - a) > xtol:
        if fc > fd:
            b, d, fd = d, c, fc
            c = b - inv_phi * (b - a)
            fc = fn(c)
        else:
            a, c, fc = c, d, fd
            d = a + inv_phi * (b - a)
            fd = fn(d)
    return 0.5 * (a + b)


def extract_asymptotic_polarization(
    data: SolitonData,
    j: int,
    t: float,
    window: Optional[float] = None,
    coarse_factor: float = 0.1,
) -> Tuple[Polarization, float]:
    """Polarization and envelope peak position of soliton j at large |t|.

    Scans the field along x around the ballistic position w_j * t (coarse
    spacing ~ 1/(10 v_j)), then refines the envelope maximum by golden
    section to 1e-10 and reads the component ratios at the refined peak.
    """
    j = int(j)
    point = data.points[j][0]
    v, w = point.v, point.velocity
    center = w * float(t)
    if window is None:
        shifts = [abs(math.log(data.points[j][1].norm)) / v]
        if data.N > 1:
            try:
                shifts.append(abs(beta_in(j, data).position_shift(point)))
                shifts.append(abs(beta_out(j, data).position_shift(point)))
            except ValidationError:
                shifts.append(shifts[0] + 4.0 / v)  # unsorted data: widen instead
        window = max(shifts) + 10.0 / v
        if data.N > 1:
            sep = min(
                abs(pt.velocity - w) * abs(float(t))
                for i, (pt, _) in enumerate(data.points)
                if i != j
            )
            window = min(window, 0.45 * sep)
    xs = np.arange(center - window, center + window, coarse_factor / v)
    if xs.size < 5:
        raise WindowError("scan window is too narrow for the coarse pass")
    env = np.linalg.norm(reconstruct_field(data, xs, float(t)), axis=-1)
    imax = int(np.argmax(env))
    if imax == 0 or imax == xs.size - 1:
        raise WindowError(
            f"envelope peak of soliton {j} not interior to the scan window at t={t}"
        )

    def envelope(x: float) -> float:
        return float(np.linalg.norm(reconstruct_field(data, x, float(t))))

    peak = _golden_max(envelope, xs[imax - 1], xs[imax + 1], 1e-10)
    return Polarization(reconstruct_field(data, peak, float(t))), float(peak)


def convergence_order(residual_fn: Callable[[float], float], h_sequence) -> float:
    """Least-squares slope of log residual against log h.

    Needs at least three roughly geometric spacings; warns when the residuals
    are not monotone in h.
    """
    hs = [float(h) for h in h_sequence]
    if len(hs) < 3:
        raise ValidationError("convergence_order needs at least three spacings")
    ratios = [a / b for a, b in zip(hs, hs[1:])]
    if max(ratios) / min(ratios) > 1.5:
        raise ValidationError(f"spacings {hs} are not close to geometric")
    rs = [float(residual_fn(h)) for h in hs]
    if any(r <= 0.0 for r in rs):
        raise ValidationError("residuals must be positive to fit an order")
    decreasing = all(b < a for a, b in zip(rs, rs[1:]))
    increasing = all(b > a for a, b in zip(rs, rs[1:]))
    if not (decreasing or increasing):
        warnings.warn("non-monotone residual sequence; fitted order is unreliable")
    slope = np.polyfit(np.log(hs), np.log(rs), 1)[0]
    return float(slope)
