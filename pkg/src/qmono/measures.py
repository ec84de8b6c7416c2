"""Closed-form bipartite correlation measures.

Pure-state values work on any cut of a multiqubit register.  Mixed-state
values are only defined here for two-qubit inputs (Wootters spin-flip family);
mixed inputs on larger cuts belong to the convex-roof optimizer.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

import numpy as np

from . import linalg
from .states import (Bipartition, DensityMatrix, PureState, partial_transpose,
                     reduced_density)

RAW_TOL = 1e-8

PURE_CUT = "pure-cut"
TWO_QUBIT_MIXED = "two-qubit-mixed"

_Y = np.array([[0.0, -1.0j], [1.0j, 0.0]])
_YY = np.kron(_Y, _Y)


class MeasureKind(str, Enum):
    CONCURRENCE = "concurrence"
    CONCURRENCE_OF_ASSISTANCE = "coa"
    NEGATIVITY = "negativity"
    SCREN = "scren"
    SCRENOA = "screnoa"
    ENTANGLEMENT_OF_FORMATION = "eof"


ASSISTED_KINDS = frozenset({MeasureKind.CONCURRENCE_OF_ASSISTANCE,
                            MeasureKind.SCRENOA})


@dataclass(frozen=True)
class MeasureValue:
    kind: MeasureKind
    value: float
    input_class: str

    def __float__(self) -> float:
        return self.value


def _finish(raw: float, ceiling: float, kind: MeasureKind,
            input_class: str) -> MeasureValue:
    # distinguish roundoff from genuine out-of-range bugs before clipping
    if raw < -RAW_TOL or raw > ceiling + RAW_TOL:
        raise ValueError(f"{kind.value} value {raw!r} is outside "
                         f"[0, {ceiling}] by more than {RAW_TOL}")
    return MeasureValue(kind, float(min(max(raw, 0.0), ceiling)), input_class)


def _cut_dims(psi: PureState, cut: Bipartition) -> tuple[int, int]:
    cut.validate_for(psi.register)
    return 2 ** len(cut.side_a), 2 ** len(cut.side_b)


def _require_two_qubits(rho: DensityMatrix, name: str) -> None:
    if rho.register.count != 2:
        raise ValueError(f"{name} needs a two-qubit state, got "
                         f"{rho.register.count} qubits")


def binary_entropy(x: float) -> float:
    """Base-2 entropy of a coin with bias x."""
    x = min(max(float(x), 0.0), 1.0)
    out = 0.0
    if 0.0 < x < 1.0:
        out = -x * np.log2(x) - (1.0 - x) * np.log2(1.0 - x)
    return float(out)


def reduced_purity(psi: PureState, cut: Bipartition) -> float:
    rho_a = reduced_density(psi, cut.side_a)
    return rho_a.purity()


def concurrence_pure(psi: PureState, cut: Bipartition) -> MeasureValue:
    """sqrt(2 * (1 - Tr rho_A^2)) across the given cut."""
    da, db = _cut_dims(psi, cut)
    d = min(da, db)
    raw = np.sqrt(max(2.0 * (1.0 - reduced_purity(psi, cut)), 0.0))
    return _finish(raw, np.sqrt(2.0 * (d - 1) / d),
                   MeasureKind.CONCURRENCE, PURE_CUT)


def spin_flip_roots(rho: DensityMatrix) -> np.ndarray:
    """Descending square roots of the eigenvalues of rho * (Y(x)Y) rho* (Y(x)Y).

    Equal to the singular values of the complex symmetric Gram form
    tau_ij = x_i^T (Y(x)Y) x_j over the subnormalized eigenvectors
    x_i = sqrt(w_i) v_i of rho, extracted here as the positive spectrum of
    the Hermitian dilation [[0, tau], [tau^dagger, 0]].  Unlike the
    sqrt(rho)-conjugation route this keeps vanishing roots accurate to
    machine precision instead of sqrt(eps).
    """
    _require_two_qubits(rho, "spin_flip_roots")
    w, v = linalg.eigh(rho.entries)
    w = linalg.clip_psd(w, what="density matrix")
    x = v * np.sqrt(w)
    tau = x.T @ _YY @ x
    dil = np.zeros((8, 8), dtype=np.complex128)
    dil[:4, 4:] = tau
    dil[4:, :4] = tau.conj().T
    e, _ = linalg.eigh(dil)
    return np.clip(e[:4], 0.0, None)


def concurrence_two_qubit_mixed(rho: DensityMatrix) -> MeasureValue:
    """Wootters concurrence max(0, r1 - r2 - r3 - r4)."""
    r = spin_flip_roots(rho)
    raw = float(r[0] - r[1] - r[2] - r[3])
    return _finish(max(raw, 0.0), 1.0, MeasureKind.CONCURRENCE,
                   TWO_QUBIT_MIXED)


def concurrence_of_assistance(rho: DensityMatrix) -> MeasureValue:
    """Assisted concurrence r1 + r2 + r3 + r4."""
    r = spin_flip_roots(rho)
    return _finish(float(r.sum()), 1.0,
                   MeasureKind.CONCURRENCE_OF_ASSISTANCE, TWO_QUBIT_MIXED)


def negativity(rho: DensityMatrix, cut: Bipartition) -> MeasureValue:
    """Trace-norm negativity ||rho^{T_A}|| - 1 (no factor 1/2)."""
    cut.validate_for(rho.register)
    pt = partial_transpose(rho, cut.side_a)
    w, _ = linalg.eigh(pt)
    raw = float(np.sum(np.abs(w)) - 1.0)
    d = min(2 ** len(cut.side_a), 2 ** len(cut.side_b))
    return _finish(raw, float(d - 1), MeasureKind.NEGATIVITY,
                   TWO_QUBIT_MIXED if rho.register.count == 2 else PURE_CUT)


def schmidt_coefficients(psi: PureState, cut: Bipartition) -> np.ndarray:
    """Descending singular values of the amplitude matrix across the cut.

    Extracted from the Hermitian dilation [[0, M], [M^dagger, 0]] of the
    (d_A x d_B)-reshaped amplitudes, which keeps vanishing coefficients at
    machine precision (their squares are the reduced-state eigenvalues).
    """
    da, db = _cut_dims(psi, cut)
    reg = psi.register
    a_pos = [reg.labels.index(lab) for lab in cut.side_a]
    b_pos = [i for i in range(reg.count) if i not in a_pos]
    mat = psi.tensor().transpose(a_pos + b_pos).reshape(da, db)
    dil = np.zeros((da + db, da + db), dtype=np.complex128)
    dil[:da, da:] = mat
    dil[da:, :da] = mat.conj().T
    e, _ = linalg.eigh(dil)
    return np.clip(e[:min(da, db)], 0.0, None)


def negativity_pure(psi: PureState, cut: Bipartition) -> MeasureValue:
    """(Tr sqrt(rho_A))^2 - 1, i.e. 2 * sum_{i<j} sqrt(lam_i lam_j)."""
    da, db = _cut_dims(psi, cut)
    s = schmidt_coefficients(psi, cut)
    raw = float(np.sum(s) ** 2 - 1.0)
    d = min(da, db)
    return _finish(raw, float(d - 1), MeasureKind.NEGATIVITY, PURE_CUT)


def scren_pure(psi: PureState, cut: Bipartition) -> MeasureValue:
    """Squared pure-state negativity (pure-state value of SCREN and SCRENoA)."""
    da, db = _cut_dims(psi, cut)
    d = min(da, db)
    n = negativity_pure(psi, cut).value
    return _finish(n * n, float((d - 1) ** 2), MeasureKind.SCREN, PURE_CUT)


def scren_two_qubit(rho: DensityMatrix) -> MeasureValue:
    """SCREN of a two-qubit mixed state.

    Negativity and concurrence coincide on two-qubit pure states, so the
    roof-minimized average negativity equals the Wootters concurrence; SCREN
    is its square.  Cross-checked against the roof optimizer in the tests.
    """
    c = concurrence_two_qubit_mixed(rho).value
    return _finish(c * c, 1.0, MeasureKind.SCREN, TWO_QUBIT_MIXED)


def screnoa_two_qubit(rho: DensityMatrix) -> MeasureValue:
    """SCRENoA of a two-qubit mixed state: squared assisted concurrence."""
    coa = concurrence_of_assistance(rho).value
    return _finish(coa * coa, 1.0, MeasureKind.SCRENOA, TWO_QUBIT_MIXED)


def eof_two_qubit(rho: DensityMatrix) -> MeasureValue:
    """Entanglement of formation h((1 + sqrt(1 - C^2))/2), base-2."""
    c = concurrence_two_qubit_mixed(rho).value
    raw = binary_entropy(0.5 * (1.0 + np.sqrt(max(1.0 - c * c, 0.0))))
    return _finish(raw, 1.0, MeasureKind.ENTANGLEMENT_OF_FORMATION,
                   TWO_QUBIT_MIXED)


def eof_pure(psi: PureState, cut: Bipartition) -> MeasureValue:
    """Entanglement of formation of a pure state across a cut with a qubit side."""
    da, db = _cut_dims(psi, cut)
    if min(da, db) != 2:
        raise ValueError("eof_pure needs a single-qubit side on the cut")
    c = concurrence_pure(psi, cut).value
    raw = binary_entropy(0.5 * (1.0 + np.sqrt(max(1.0 - c * c, 0.0))))
    return _finish(raw, 1.0, MeasureKind.ENTANGLEMENT_OF_FORMATION, PURE_CUT)


def pure_cut_value(kind: MeasureKind, psi: PureState, cut: Bipartition) -> float:
    """Pure-state evaluation of any measure kind across a cut.

    The assisted kinds coincide with their plain counterparts on pure states
    (a rank-1 projector has a single decomposition).
    """
    if kind in (MeasureKind.CONCURRENCE, MeasureKind.CONCURRENCE_OF_ASSISTANCE):
        return concurrence_pure(psi, cut).value
    if kind is MeasureKind.NEGATIVITY:
        return negativity_pure(psi, cut).value
    if kind in (MeasureKind.SCREN, MeasureKind.SCRENOA):
        return scren_pure(psi, cut).value
    if kind is MeasureKind.ENTANGLEMENT_OF_FORMATION:
        return eof_pure(psi, cut).value
    raise ValueError(f"unsupported measure kind {kind!r}")


def two_qubit_mixed_value(kind: MeasureKind, rho: DensityMatrix) -> float:
    """Closed-form mixed-state evaluation on a two-qubit register."""
    _require_two_qubits(rho, "two_qubit_mixed_value")
    if kind is MeasureKind.CONCURRENCE:
        return concurrence_two_qubit_mixed(rho).value
    if kind is MeasureKind.CONCURRENCE_OF_ASSISTANCE:
        return concurrence_of_assistance(rho).value
    if kind is MeasureKind.NEGATIVITY:
        cut = Bipartition.split(rho.register, rho.register.labels[:1])
        return negativity(rho, cut).value
    if kind is MeasureKind.SCREN:
        return scren_two_qubit(rho).value
    if kind is MeasureKind.SCRENOA:
        return screnoa_two_qubit(rho).value
    if kind is MeasureKind.ENTANGLEMENT_OF_FORMATION:
        return eof_two_qubit(rho).value
    raise ValueError(f"unsupported measure kind {kind!r}")
