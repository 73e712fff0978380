"""Domain types for vector-soliton spectral data, polarizations, and boundaries.

A soliton is specified by a discrete eigenvalue k = (u + iv)/2 in the upper
half plane (velocity -2u, amplitude v) together with a nonzero norming vector
beta in C^n.  Polarizations live projectively; a canonical phase (largest
modulus component real and non-negative, ties to the lowest index) makes them
directly comparable as plain vectors.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Sequence, Union

import numpy as np

from .errors import ValidationError

#: Two eigenvalues closer than this are treated as coincident poles.
POLE_MERGE_TOL = 1e-12

#: Unit-norm slack allowed on stored polarizations.
UNIT_TOL = 1e-14

#: Allowed deviation of U from unitarity in rotated boundary specs.
UNITARY_TOL = 1e-12


def _as_complex_vector(vec, name: str = "vector") -> np.ndarray:
    arr = np.asarray(vec, dtype=np.complex128)
    if arr.ndim != 1 or arr.size == 0:
        raise ValidationError(f"{name} must be a nonempty one-dimensional complex vector")
    if not np.all(np.isfinite(arr.view(np.float64))):
        raise ValidationError(f"{name} has non-finite entries")
    arr = arr.copy()
    arr.flags.writeable = False
    return arr


def canonical_phase(vec: np.ndarray) -> np.ndarray:
    """Rotate a nonzero vector so its largest-modulus entry is real >= 0.

    Ties break to the lowest index (argmax convention), so the result is a
    unique representative of the phase orbit.
    """
    pivot = vec[int(np.argmax(np.abs(vec)))]
    if pivot == 0:
        raise ValidationError("cannot fix the phase of the zero vector")
    return vec * (abs(pivot) / pivot)


@dataclass(frozen=True)
class SpectralPoint:
    """Discrete eigenvalue k = (u + iv)/2 with v > 0.

    u is twice the real part (soliton velocity is w = -2u) and v twice the
    imaginary part (soliton amplitude).
    """

    u: float
    v: float

    def __post_init__(self):
        object.__setattr__(self, "u", float(self.u))
        object.__setattr__(self, "v", float(self.v))
        if not (math.isfinite(self.u) and math.isfinite(self.v)):
            raise ValidationError("spectral point requires finite (u, v)")
        if self.v <= 0.0:
            raise ValidationError(
                f"lower half plane: eigenvalue needs v > 0, got v={self.v!r}"
            )

    @property
    def k(self) -> complex:
        return complex(self.u, self.v) / 2.0

    @property
    def velocity(self) -> float:
        return -2.0 * self.u

    @property
    def amplitude(self) -> float:
        return self.v

    def mirror(self) -> "SpectralPoint":
        """The mirror eigenvalue -k*: same v, negated u."""
        return SpectralPoint(-self.u, self.v)

    @classmethod
    def from_k(cls, k: complex) -> "SpectralPoint":
        k = complex(k)
        return cls(2.0 * k.real, 2.0 * k.imag)


@dataclass(frozen=True, eq=False)
class NormingVector:
    """Nonzero vector beta in C^n attached to a spectral point.

    |beta| fixes the envelope position shift ln|beta|/v and beta/|beta| the
    polarization.
    """

    beta: np.ndarray

    def __post_init__(self):
        arr = _as_complex_vector(self.beta, "norming vector")
        if float(np.linalg.norm(arr)) == 0.0:
            raise ValidationError("degenerate norming constant: beta must be nonzero")
        object.__setattr__(self, "beta", arr)

    @property
    def n(self) -> int:
        return self.beta.size

    @property
    def norm(self) -> float:
        return float(np.linalg.norm(self.beta))

    def position_shift(self, point: SpectralPoint) -> float:
        """Envelope position shift ln|beta| / v for the given eigenvalue."""
        return math.log(self.norm) / point.v


@dataclass(frozen=True, eq=False)
class Polarization:
    """Unit vector in C^n stored in canonical phase.

    Any nonzero vector is accepted; construction normalizes and fixes the
    phase, so two projectively equal inputs produce identical arrays.
    """

    p: np.ndarray

    def __post_init__(self):
        arr = _as_complex_vector(self.p, "polarization")
        nrm = float(np.linalg.norm(arr))
        if nrm == 0.0:
            raise ValidationError("zero vector has no polarization")
        arr = canonical_phase(arr / nrm)
        arr.flags.writeable = False
        object.__setattr__(self, "p", arr)

    @property
    def n(self) -> int:
        return self.p.size


def polarization_of(beta: Union[NormingVector, Sequence[complex], np.ndarray]) -> Polarization:
    """Unit polarization beta/|beta| in canonical phase."""
    if isinstance(beta, NormingVector):
        return Polarization(beta.beta)
    return Polarization(np.asarray(beta, dtype=np.complex128))


def projective_distance(p, q) -> float:
    """Fubini-Study-type distance sqrt(1 - |p^dag q|^2) between unit vectors.

    Zero iff the two directions agree projectively; one iff orthogonal.
    Phase-invariant and symmetric.  Evaluated as the norm of q minus its
    projection on p, which resolves distances near zero to machine epsilon
    instead of the sqrt(eps) floor of the naive formula.
    """
    a = p.p if isinstance(p, Polarization) else np.asarray(p, dtype=np.complex128)
    b = q.p if isinstance(q, Polarization) else np.asarray(q, dtype=np.complex128)
    if a.shape != b.shape:
        raise ValidationError("projective distance needs vectors of equal length")
    if a.size == 1:
        return 0.0  # one complex line only: the distance vanishes identically
    a = a / np.linalg.norm(a)
    b = b / np.linalg.norm(b)
    rejection = b - a * np.vdot(a, b)
    return min(1.0, float(np.linalg.norm(rejection)))


@dataclass(frozen=True, eq=False)
class SolitonData:
    """Validated spectral data for a pure multi-soliton solution.

    n is the number of field components; points pairs each eigenvalue with
    its norming vector.  Eigenvalues must be simple (pairwise distinct).
    """

    n: int
    points: tuple

    def __post_init__(self):
        n = int(self.n)
        if n < 1:
            raise ValidationError("component count n must be a positive integer")
        pts = tuple(self.points)
        for idx, pair in enumerate(pts):
            point, nv = pair
            if not isinstance(point, SpectralPoint) or not isinstance(nv, NormingVector):
                raise ValidationError(
                    f"points[{idx}] must be a (SpectralPoint, NormingVector) pair"
                )
            if nv.n != n:
                raise ValidationError(
                    f"points[{idx}]: norming vector has length {nv.n}, expected n={n}"
                )
        object.__setattr__(self, "n", n)
        object.__setattr__(self, "points", pts)
        _check_distinct_poles(pts)

    @property
    def N(self) -> int:
        return len(self.points)

    @property
    def ks(self) -> np.ndarray:
        return np.array([pt.k for pt, _ in self.points], dtype=np.complex128)

    def spectral_point(self, j: int) -> SpectralPoint:
        return self.points[j][0]

    def norming_vector(self, j: int) -> NormingVector:
        return self.points[j][1]

    def subset(self, indices: Iterable[int]) -> "SolitonData":
        return SolitonData(self.n, tuple(self.points[i] for i in indices))

    @classmethod
    def from_arrays(cls, us, vs, betas) -> "SolitonData":
        betas = [np.asarray(b, dtype=np.complex128) for b in betas]
        if not betas:
            raise ValidationError("soliton data needs at least one point")
        n = betas[0].size
        pts = tuple(
            (SpectralPoint(u, v), NormingVector(b)) for u, v, b in zip(us, vs, betas)
        )
        if len(pts) != len(betas):
            raise ValidationError("u, v, beta lists must have equal length")
        return cls(n, pts)


def _check_distinct_poles(pts) -> None:
    ks = [pt.k for pt, _ in pts]
    for a in range(len(ks)):
        for b in range(a + 1, len(ks)):
            if abs(ks[a] - ks[b]) <= POLE_MERGE_TOL:
                raise ValidationError(
                    f"coincident poles: k[{a}]={ks[a]} and k[{b}]={ks[b]} "
                    f"are closer than {POLE_MERGE_TOL}"
                )


def validate(data: SolitonData) -> None:
    """Re-check all soliton-data invariants, collecting every violation.

    Raises ValidationError listing the problems; returns None when clean.
    """
    problems = []
    if not isinstance(data, SolitonData):
        raise ValidationError("expected SolitonData")
    for j, (point, nv) in enumerate(data.points):
        if point.v <= 0:
            problems.append(f"point {j}: lower half plane (v={point.v})")
        if nv.n != data.n:
            problems.append(f"point {j}: norming vector length {nv.n} != n={data.n}")
        if nv.norm == 0:
            problems.append(f"point {j}: degenerate norming constant")
    ks = [pt.k for pt, _ in data.points]
    for a in range(len(ks)):
        for b in range(a + 1, len(ks)):
            if abs(ks[a] - ks[b]) <= POLE_MERGE_TOL:
                problems.append(f"coincident poles: indices {a} and {b}")
    if problems:
        raise ValidationError("; ".join(problems))


# --- boundary specifications -------------------------------------------------


@dataclass(frozen=True)
class Robin:
    """Robin boundary R_x(0,t) = 2*alpha*R(0,t); alpha real."""

    alpha: float

    def __post_init__(self):
        object.__setattr__(self, "alpha", float(self.alpha))
        if not math.isfinite(self.alpha):
            raise ValidationError("Robin parameter alpha must be finite")


def _check_signs(signs) -> tuple:
    sg = tuple(int(s) for s in signs)
    if not sg or any(s not in (-1, 1) for s in sg):
        raise ValidationError("sign pattern must be a nonempty tuple of +1/-1")
    return sg


@dataclass(frozen=True, eq=False)
class Mixed:
    """Componentwise Dirichlet/Neumann split encoded by a +1/-1 pattern."""

    signs: tuple

    def __post_init__(self):
        object.__setattr__(self, "signs", _check_signs(self.signs))

    @property
    def n(self) -> int:
        return len(self.signs)

    @classmethod
    def from_subset(cls, n: int, subset: Iterable[int]) -> "Mixed":
        """+1 on the components in `subset` (0-based), -1 elsewhere."""
        chosen = set(int(i) for i in subset)
        if not chosen <= set(range(n)):
            raise ValidationError("subset indices must lie in 0..n-1")
        return cls(tuple(1 if i in chosen else -1 for i in range(n)))


@dataclass(frozen=True, eq=False)
class RotatedMixed:
    """Mixed split conjugated by a unitary change of component basis."""

    unitary: np.ndarray
    signs: tuple

    def __post_init__(self):
        sg = _check_signs(self.signs)
        U = np.asarray(self.unitary, dtype=np.complex128)
        n = len(sg)
        if U.shape != (n, n):
            raise ValidationError(f"unitary must be {n}x{n} to match the sign pattern")
        defect = np.max(np.abs(U.conj().T @ U - np.eye(n)))
        if defect > UNITARY_TOL:
            raise ValidationError(
                f"matrix is not unitary: max |U^dag U - I| = {defect:.3e}"
            )
        U = U.copy()
        U.flags.writeable = False
        object.__setattr__(self, "unitary", U)
        object.__setattr__(self, "signs", sg)

    @property
    def n(self) -> int:
        return len(self.signs)


BoundarySpec = Union[Robin, Mixed, RotatedMixed]
