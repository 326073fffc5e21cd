"""Co-isometric state-space systems and their exact stacked Gram identity.

A quadruple ``{A, B, C, D}`` is co-isometric when the block matrix
``[[A, B], [C, D]]`` satisfies ``M M* = I``. Its transfer function
``F(lam) = D + lam C (I - lam A)^{-1} B`` and observability function
``W(lam) = C (I - lam A)^{-1}`` then satisfy, blockwise and with finite
exact sums at every truncation,

    ``T_F T_F* + G_W G_W* = I``

where ``T_F`` is the lower-triangular block Toeplitz matrix of transfer
coefficients and ``G_W`` stacks the observability coefficients.
"""

from __future__ import annotations

from dataclasses import InitVar, dataclass

import numpy as np

from .errors import AuditFailure, InvalidInput
from .opcore import (
    CMatrix,
    Tolerances,
    _resolve_tol,
    adjoint,
    as_cmatrix,
    defect,
    spectral_norm,
)
from .series import MatrixSeries


@dataclass(frozen=True)
class CoisometricSystem:
    """Validated at construction; pass ``validate=False`` to build a
    deliberately broken system for negative-control audits."""

    A: CMatrix  # state -> state
    B: CMatrix  # input -> state
    C: CMatrix  # state -> output
    D: CMatrix  # input -> output
    validate: InitVar[bool] = True
    tol: InitVar[Tolerances | None] = None

    def __post_init__(self, validate, tol):
        A = as_cmatrix(self.A)
        x = A.shape[0]
        if A.shape[1] != x:
            raise InvalidInput(f"state operator must be square, got {A.shape}")
        object.__setattr__(self, "A", A)
        B = as_cmatrix(self.B, rows=x)
        object.__setattr__(self, "B", B)
        C = as_cmatrix(self.C, cols=x)
        object.__setattr__(self, "C", C)
        object.__setattr__(self, "D", as_cmatrix(self.D, rows=C.shape[0], cols=B.shape[1]))
        if validate:
            deviation = coisometry_gap(self)
            limit = _resolve_tol(tol).identity_tol
            if deviation > limit:
                raise AuditFailure(
                    f"system block matrix deviates from a co-isometry by {deviation:.3e}", deviation
                )

    @property
    def state_dim(self) -> int:
        return self.A.shape[0]

    @property
    def in_dim(self) -> int:
        return self.B.shape[1]

    @property
    def out_dim(self) -> int:
        return self.C.shape[0]

    def block_matrix(self) -> CMatrix:
        return np.block([[self.A, self.B], [self.C, self.D]])


def coisometry_gap(system: CoisometricSystem) -> float:
    m = system.block_matrix()
    return spectral_norm(m @ adjoint(m) - np.eye(m.shape[0]))


def julia_system(T, tol: Tolerances | None = None) -> CoisometricSystem:
    """The canonical unitary dilation of a square contraction, as a system.

    ``A = T``, ``B`` the defect of ``T*``, ``C`` the defect of ``T`` and
    ``D = -T*``; the block matrix is unitary, so in particular co-isometric.
    Serves as a parameterized generator of test systems.
    """
    T = as_cmatrix(T)
    if T.shape[0] != T.shape[1]:
        raise InvalidInput(f"expected a square contraction, got shape {T.shape}")
    d_t, _ = defect(T, tol)
    d_tstar, _ = defect(adjoint(T), tol)
    return CoisometricSystem(T, d_tstar, d_t, -adjoint(T), tol=tol)


def transfer_taylor(system: CoisometricSystem, order: int) -> MatrixSeries:
    """Coefficients ``F_0 = D`` and ``F_n = C A^(n-1) B`` of the transfer function."""
    if order < 0:
        raise InvalidInput(f"order must be nonnegative, got {order}")
    coeffs = [system.D]
    row = system.C
    for _ in range(order):
        coeffs.append(row @ system.B)
        row = row @ system.A
    return MatrixSeries(tuple(coeffs), system.out_dim, system.in_dim)


def observability_taylor(system: CoisometricSystem, order: int) -> MatrixSeries:
    """Coefficients ``W_n = C A^n`` of the observability function."""
    if order < 0:
        raise InvalidInput(f"order must be nonnegative, got {order}")
    coeffs = [system.C]
    for _ in range(order):
        coeffs.append(coeffs[-1] @ system.A)
    return MatrixSeries(tuple(coeffs), system.out_dim, system.state_dim)


def stacked_operator(system: CoisometricSystem, blocks: int) -> CMatrix:
    """``[T_F, G_W]`` truncated to the given number of block rows."""
    if blocks < 1:
        raise InvalidInput(f"need at least one block, got {blocks}")
    w, v, x = system.out_dim, system.in_dim, system.state_dim
    transfer = transfer_taylor(system, blocks - 1)
    observ = observability_taylor(system, blocks - 1)
    out = np.zeros((blocks * w, blocks * v + x), dtype=np.complex128)
    for i in range(blocks):
        for k in range(i + 1):
            out[i * w:(i + 1) * w, k * v:(k + 1) * v] = transfer.coeffs[i - k]
        out[i * w:(i + 1) * w, blocks * v:] = observ.coeffs[i]
    return out


def gram_identity_audit(system: CoisometricSystem, blocks: int, tol: Tolerances | None = None) -> float:
    """Max deviation of ``T_F T_F* + G_W G_W*`` from the identity.

    Every entry is a finite exact sum, so the deviation is pure roundoff
    for a genuine co-isometric system.

    Raises:
        AuditFailure: when the deviation exceeds ``identity_tol``; this is
            the signal that the input system is not co-isometric.
    """
    tol = _resolve_tol(tol)
    stacked = stacked_operator(system, blocks)
    deviation = spectral_norm(stacked @ adjoint(stacked) - np.eye(stacked.shape[0]))
    if deviation > tol.identity_tol:
        raise AuditFailure(
            f"stacked Gram identity deviates by {deviation:.3e} on {blocks} blocks", deviation
        )
    return deviation
