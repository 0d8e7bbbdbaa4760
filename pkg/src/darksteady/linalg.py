"""Dense complex linear algebra used by the model, engine and pulse layers.

Everything operates on plain ``numpy`` arrays (promoted to complex128) and is
pure.  State spaces here are at most 16-dimensional and superoperators at most
256-dimensional, so dense storage is used throughout.

Vectorization follows the column-stacking convention: ``vec(A rho B) =
(B^T kron A) vec(rho)``.  All superoperator formulas elsewhere in the package
assume it.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.linalg

from .errors import DimensionError, NumericalError

__all__ = [
    "SpaceLayout",
    "dagger",
    "eig_full",
    "expm",
    "kron",
    "partial_trace",
    "unvectorize",
    "vectorize",
]

# eig_full residuals are checked against this relative bound.
_EIG_RESIDUAL_REL = 1e-8
_EIG_MAX_DIM = 512


@dataclass(frozen=True)
class SpaceLayout:
    """Ordered tensor-factor dimensions of a Hilbert space.

    ``SpaceLayout((4, 3))`` describes an electron factor of dimension 4
    followed by a spin-1 nuclear factor; ``SpaceLayout((4, 2, 2))`` two
    spin-1/2 nuclei.  The first factor varies slowest in the basis ordering.
    """

    factor_dims: tuple

    def __post_init__(self):
        try:
            raw = tuple(self.factor_dims)
            dims = tuple(int(d) for d in raw)
        except (TypeError, ValueError):
            raise DimensionError(f"invalid factor dimensions {self.factor_dims!r}")
        if not dims or any(d < 1 for d in dims) or any(d != r for d, r in zip(dims, raw)):
            raise DimensionError(f"invalid factor dimensions {self.factor_dims!r}")
        object.__setattr__(self, "factor_dims", dims)

    @property
    def dim(self):
        out = 1
        for d in self.factor_dims:
            out *= d
        return out


def _as_square(a, what="operand"):
    a = np.asarray(a, dtype=complex)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise DimensionError(f"{what} must be a square matrix, got shape {a.shape}")
    return a


def dagger(a):
    """Conjugate transpose."""
    return np.asarray(a, dtype=complex).conj().T


def kron(a, b):
    """Kronecker product of two square matrices."""
    a = _as_square(a, "kron left operand")
    b = _as_square(b, "kron right operand")
    return np.kron(a, b)


def expm(a, s=1.0):
    """Matrix exponential exp(s*a) for a square matrix and a real scalar.

    Raises NumericalError if the scaling overflows to non-finite entries.
    """
    a = _as_square(a, "expm operand")
    s = float(s)
    if not np.isfinite(s):
        raise NumericalError(f"expm scalar must be finite, got {s}")
    out = scipy.linalg.expm(s * a)
    if not np.all(np.isfinite(out)):
        raise NumericalError("expm overflowed: result contains non-finite entries")
    return out


def eig_full(a):
    """All eigenpairs of a general complex matrix.

    Returns ``(values, vectors)`` with ``vectors[:, k]`` the unit eigenvector
    for ``values[k]``.  Pairs are sorted by (real, imaginary) part so the
    output order is reproducible.  Residuals ``||a v - lambda v||`` are
    verified against ``1e-8 * ||a||``.
    """
    a = _as_square(a, "eig_full operand")
    n = a.shape[0]
    if n > _EIG_MAX_DIM:
        raise DimensionError(f"eig_full supports dimension <= {_EIG_MAX_DIM}, got {n}")
    try:
        vals, vecs = scipy.linalg.eig(a)
    except np.linalg.LinAlgError as exc:  # pragma: no cover - LAPACK failure
        raise NumericalError(f"eigendecomposition did not converge: {exc}")
    order = np.lexsort((vals.imag, vals.real))
    vals = vals[order]
    vecs = vecs[:, order]
    scale = np.linalg.norm(a)
    resid = np.linalg.norm(a @ vecs - vecs * vals[np.newaxis, :], axis=0)
    worst = float(resid.max()) if n else 0.0
    if worst > _EIG_RESIDUAL_REL * scale:
        raise NumericalError(
            f"eigenpair residual {worst:.3e} exceeds {_EIG_RESIDUAL_REL:.0e}*||a||"
        )
    return vals, vecs


def partial_trace(rho, layout, keep):
    """Trace out all tensor factors not listed in ``keep``.

    ``keep`` is an index or iterable of indices into ``layout.factor_dims``;
    the kept factors stay in their original order.
    """
    if not isinstance(layout, SpaceLayout):
        layout = SpaceLayout(tuple(layout))
    dims = list(layout.factor_dims)
    n = len(dims)
    if isinstance(keep, (int, np.integer)):
        keep = (int(keep),)
    keep = sorted({int(k) for k in keep})
    if not keep:
        raise DimensionError("partial_trace must keep at least one factor")
    if any(k < 0 or k >= n for k in keep):
        raise DimensionError(f"keep indices {keep} out of range for {n} factors")
    rho = _as_square(rho, "partial_trace operand")
    if rho.shape[0] != layout.dim:
        raise DimensionError(
            f"state dimension {rho.shape[0]} does not match layout product {layout.dim}"
        )
    t = rho.reshape(dims + dims)
    # Trace out the complement, highest factor first so lower axes keep
    # their positions.
    for idx in sorted((i for i in range(n) if i not in keep), reverse=True):
        t = np.trace(t, axis1=idx, axis2=idx + n)
        n -= 1
    d_keep = 1
    for k in keep:
        d_keep *= dims[k]
    return t.reshape(d_keep, d_keep)


def vectorize(rho):
    """Column-stack a square matrix into a vector."""
    rho = _as_square(rho, "vectorize operand")
    return rho.reshape(-1, order="F").copy()


def unvectorize(v, dim):
    """Inverse of :func:`vectorize` for a ``dim x dim`` matrix."""
    v = np.asarray(v, dtype=complex)
    dim = int(dim)
    if v.ndim != 1 or v.size != dim * dim:
        raise DimensionError(
            f"vector of length {v.size} cannot unstack into {dim}x{dim}"
        )
    return v.reshape((dim, dim), order="F").copy()
