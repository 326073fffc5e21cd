"""Data sets for the relaxed commutant lifting problem.

A data set consists of a contraction ``A : H -> H'``, a contraction ``T'``
on ``H'`` and a pair ``R, Q : H0 -> H`` subject to

    ``T' A R = A Q``   and   ``R* R <= Q* Q``.

The isometric dilation of ``T'`` is never stored: the canonical
shift-extension construction (module :mod:`rclkit.lifting`) is assumed
throughout, which removes an unverifiable degree of freedom.

From a valid data set this module builds the underlying contraction
``w : F = closure(range(D_A Q)) -> defect(T') (+) defect(A)`` determined by
``w D_A Q = [D_T' A R ; D_A R]``, expressed in orthonormal coordinates on
the two defect spaces, and provides the specialized uniqueness analyzers
for the sub-optimal case and for the scalar sliding-block shape of R and Q.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np

from .errors import IllPosedData, InvalidInput
from .interp import InterpProblem
from .opcore import (
    CMatrix,
    Tolerances,
    _resolve_tol,
    adjoint,
    as_cmatrix,
    defect,
    join,
    orthocomplement,
    range_closure_basis,
    spectral_norm,
)

#: Residual allowed for the defining identity of the underlying contraction.
OMEGA_RESIDUAL_TOL = 1e-9


@dataclass(frozen=True)
class DataSet:
    """The four stored operators, with all space dimensions derived."""

    A: CMatrix    # H -> H'
    Tp: CMatrix   # H' -> H'
    R: CMatrix    # H0 -> H
    Q: CMatrix    # H0 -> H

    def __post_init__(self):
        A = as_cmatrix(self.A)
        hp, h = A.shape
        object.__setattr__(self, "A", A)
        object.__setattr__(self, "Tp", as_cmatrix(self.Tp, rows=hp, cols=hp))
        R = as_cmatrix(self.R, rows=h)
        object.__setattr__(self, "R", R)
        object.__setattr__(self, "Q", as_cmatrix(self.Q, rows=h, cols=R.shape[1]))

    @property
    def dim_h0(self) -> int:
        return self.R.shape[1]

    @property
    def dim_h(self) -> int:
        return self.A.shape[1]

    @property
    def dim_hp(self) -> int:
        return self.A.shape[0]


@dataclass(frozen=True)
class Violation:
    constraint: str
    residual: float


@dataclass(frozen=True)
class ValidationReport:
    violations: tuple[Violation, ...]

    @property
    def ok(self) -> bool:
        return not self.violations


def validate(data: DataSet, tol: Tolerances | None = None) -> ValidationReport:
    """Check the three defining constraints, reporting residual magnitudes.

    Contraction residuals are the norm excess over 1; the intertwining
    residual is ``norm(T'AR - AQ)``; the order residual is the amount by
    which the smallest eigenvalue of ``Q*Q - R*R`` goes negative.
    """
    tol = _resolve_tol(tol)
    violations = []
    a_excess = spectral_norm(data.A) - 1.0
    if a_excess > tol.contraction_slack:
        violations.append(Violation("A_contraction", a_excess))
    tp_excess = spectral_norm(data.Tp) - 1.0
    if tp_excess > tol.contraction_slack:
        violations.append(Violation("Tp_contraction", tp_excess))
    intertwine = spectral_norm(data.Tp @ data.A @ data.R - data.A @ data.Q)
    if intertwine > tol.identity_tol:
        violations.append(Violation("intertwining", intertwine))
    if data.dim_h0:
        gram_gap = adjoint(data.Q) @ data.Q - adjoint(data.R) @ data.R
        gram_gap = (gram_gap + adjoint(gram_gap)) / 2.0
        deficit = -float(np.linalg.eigvalsh(gram_gap)[0])
        if deficit > tol.identity_tol:
            violations.append(Violation("gram_order", deficit))
    return ValidationReport(tuple(violations))


def underlying_contraction(data: DataSet, tol: Tolerances | None = None) -> InterpProblem:
    """Build the underlying contraction of a valid data set.

    The defining identity only pins ``w`` on ``range(D_A Q)``; in finite
    dimensions the extension to its closure ``F`` is a least-squares solve
    in F-coordinates, audited afterwards: the identity residual must stay
    below ``1e-9`` and the result must be a contraction.

    Raises:
        IllPosedData: when validation fails, the residual audit fails, or
            the solved operator is not a contraction.
    """
    tol = _resolve_tol(tol)
    report = validate(data, tol)
    if not report.ok:
        names = ", ".join(v.constraint for v in report.violations)
        raise IllPosedData(f"data set violates: {names}")

    d_a, space_a = defect(data.A, tol)
    d_tp, space_tp = defect(data.Tp, tol)
    u_dim, y_dim = space_a.dim, space_tp.dim

    domain_cols = space_a.coords() @ d_a @ data.Q          # u_dim x h0
    f = range_closure_basis(domain_cols, tol)
    lhs = f.coords() @ domain_cols                          # F-coordinates of D_A Q
    rhs = np.vstack([
        space_tp.coords() @ d_tp @ data.A @ data.R,
        space_a.coords() @ d_a @ data.R,
    ])
    if f.dim:
        omega = np.linalg.lstsq(lhs.T, rhs.T, rcond=None)[0].T
    else:
        omega = np.zeros((y_dim + u_dim, 0), dtype=np.complex128)
    residual = spectral_norm(omega @ lhs - rhs)
    if residual > OMEGA_RESIDUAL_TOL:
        raise IllPosedData(f"defining identity residual {residual:.3e} exceeds {OMEGA_RESIDUAL_TOL:.1e}")
    nrm = spectral_norm(omega)
    if nrm > 1.0 + tol.contraction_slack:
        raise IllPosedData(f"underlying operator has norm {nrm:.17g}; data set is inconsistent")
    return InterpProblem(u_dim, y_dim, f, omega[:y_dim, :], omega[y_dim:, :])


def preset_relaxed_rq(n: int, v_dim: int) -> tuple[CMatrix, CMatrix]:
    """The sliding-block pair ``R = [I; 0]``, ``Q = [0; I]`` on V^(n-1) -> V^n.

    Both are isometries exactly; ``n = 1`` yields empty-domain maps.
    """
    if n < 1 or v_dim < 0:
        raise InvalidInput(f"need n >= 1 and v_dim >= 0, got n={n}, v_dim={v_dim}")
    eye = np.eye((n - 1) * v_dim, dtype=np.complex128)
    zeros = np.zeros((v_dim, (n - 1) * v_dim), dtype=np.complex128)
    r = np.vstack([eye, zeros])
    q = np.vstack([zeros, eye])
    return r, q


def has_relaxed_rq_shape(data: DataSet, v_dim: int = 1, atol: float = 0.0) -> bool:
    """Whether R and Q are exactly the sliding-block pair for the given V-dimension."""
    h, h0 = data.dim_h, data.dim_h0
    if v_dim < 1 or h % v_dim or h0 != h - v_dim:
        return False
    r, q = preset_relaxed_rq(h // v_dim, v_dim)
    return bool(
        np.max(np.abs(data.R - r), initial=0.0) <= atol
        and np.max(np.abs(data.Q - q), initial=0.0) <= atol
    )


class Decision(enum.Enum):
    UNIQUE = "unique"
    NOT_UNIQUE = "not_unique"
    NOT_APPLICABLE = "not_applicable"


@dataclass(frozen=True)
class UniquenessDecision:
    decision: Decision
    reason: str = ""


def suboptimal_uniqueness(data: DataSet, tol: Tolerances | None = None) -> UniquenessDecision:
    """Uniqueness in the sub-optimal case: strict ``A`` and left-invertible ``R``.

    When applicable, the interpolant is unique iff ``closure(Q H0) = H`` or
    ``T'`` has trivial defect (is an isometry).
    """
    tol = _resolve_tol(tol)
    if spectral_norm(data.A) >= 1.0 - tol.identity_tol:
        return UniquenessDecision(Decision.NOT_APPLICABLE, "A is not a strict contraction")
    smin = 0.0
    if min(data.R.shape) > 0:
        smin = float(np.linalg.svd(data.R, compute_uv=False)[-1])
    if data.dim_h0 > 0 and smin <= tol.rank_tol:
        return UniquenessDecision(Decision.NOT_APPLICABLE, "R is not left invertible")
    q_onto = range_closure_basis(data.Q, tol).dim == data.dim_h
    tp_isometry = defect(data.Tp, tol)[1].dim == 0
    if q_onto or tp_isometry:
        return UniquenessDecision(Decision.UNIQUE)
    return UniquenessDecision(Decision.NOT_UNIQUE)


@dataclass(frozen=True)
class PerpendicularityReport:
    """Geometry of ``G = defect(A) (-) F`` inside ``H``.

    ``D_A G`` is always perpendicular to both ``range(Q)`` and the kernel of
    ``D_A``; consequently ``F`` fills the whole defect space whenever the
    span of those two closes up to ``H``. The kernel basis is reported whole
    rather than through any distinguished vector.
    """

    q_residual: float
    kernel_residual: float
    g_image_perp_q: bool
    g_image_perp_kernel: bool
    f_equals_defect_space: bool
    span_covers_h: bool
    kernel_dim: int


def perpendicularity_report(data: DataSet, tol: Tolerances | None = None) -> PerpendicularityReport:
    tol = _resolve_tol(tol)
    d_a, space_a = defect(data.A, tol)
    domain_cols = space_a.coords() @ d_a @ data.Q
    f = range_closure_basis(domain_cols, tol)
    g_in_h = space_a.basis @ orthocomplement(f).basis      # basis of G inside H
    kernel = orthocomplement(space_a)                      # Ker D_A = defect-space complement
    image = d_a @ g_in_h
    q_residual = spectral_norm(adjoint(data.Q) @ image)
    kernel_residual = spectral_norm(kernel.coords() @ image)
    span = join(range_closure_basis(data.Q, tol), kernel, tol)
    return PerpendicularityReport(
        q_residual=q_residual,
        kernel_residual=kernel_residual,
        g_image_perp_q=q_residual <= tol.identity_tol,
        g_image_perp_kernel=kernel_residual <= tol.identity_tol,
        f_equals_defect_space=f.dim == space_a.dim,
        span_covers_h=span.dim == data.dim_h,
        kernel_dim=kernel.dim,
    )


def norm_one_rq_uniqueness(data: DataSet, tol: Tolerances | None = None) -> UniquenessDecision:
    """Uniqueness for the scalar sliding-block shape: decided by ``norm(A) = 1``.

    Applicable only when R and Q have the sliding-block shape with
    one-dimensional blocks and ``T'`` has a nontrivial defect. The norm-one
    test is a knife-edge condition, so the tolerance is explicit:
    ``abs(1 - norm(A)) <= identity_tol``.
    """
    tol = _resolve_tol(tol)
    if not has_relaxed_rq_shape(data, v_dim=1):
        return UniquenessDecision(Decision.NOT_APPLICABLE, "R, Q lack the scalar sliding-block shape")
    if defect(data.Tp, tol)[1].dim == 0:
        return UniquenessDecision(Decision.NOT_APPLICABLE, "T' has trivial defect")
    if abs(1.0 - spectral_norm(data.A)) <= tol.identity_tol:
        return UniquenessDecision(Decision.UNIQUE)
    return UniquenessDecision(Decision.NOT_UNIQUE)
