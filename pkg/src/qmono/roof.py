"""Brute-force optimization over pure-state decompositions of a mixed state.

Serves as the independent oracle for the closed-form two-qubit measures and
as the only evaluator for roof measures on cuts without closed forms.  The
search runs multi-restart random-direction hill climbing on the mixing
unitary of the Schroedinger-HJW parameterization: every decomposition of rho
into at most m pure states is U |sqrt-weighted eigenvector i> for some m x m
unitary U, so proposals move U along exp(i * eps * H) with random Hermitian H
and eps adapted to the acceptance rate.

Restarts are independent: restart r draws its starting unitary and its whole
proposal tape from the substream (seed, r), which keeps results identical
whether restarts run serially, in parallel, or batched (as here).
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, NamedTuple

import numpy as np

from . import linalg
from .measures import MeasureKind, pure_cut_value
from .states import Bipartition, DensityMatrix, PureState, rng_stream

RANK_TOL = 1e-12
RECONSTRUCTION_TOL = 1e-8
UNITARITY_TOL = 1e-10
EPS_FLOOR = 1e-9

# inner pure-state measure averaged by the roof, and whether the averaged
# value gets squared afterwards (SCREN-type definitions)
_INNER = {
    MeasureKind.CONCURRENCE: "concurrence",
    MeasureKind.CONCURRENCE_OF_ASSISTANCE: "concurrence",
    MeasureKind.NEGATIVITY: "negativity",
    MeasureKind.SCREN: "negativity",
    MeasureKind.SCRENOA: "negativity",
    MeasureKind.ENTANGLEMENT_OF_FORMATION: "eof",
}
_SQUARED = frozenset({MeasureKind.SCREN, MeasureKind.SCRENOA})

_INNER_KIND = {
    "concurrence": MeasureKind.CONCURRENCE,
    "negativity": MeasureKind.NEGATIVITY,
    "eof": MeasureKind.ENTANGLEMENT_OF_FORMATION,
}


@dataclass(frozen=True)
class RoofConfig:
    """Search budget: ensemble size (default 2*rank), restarts, iterations."""

    ensemble_size: int | None = None
    restarts: int = 16
    max_iters: int = 2000
    tol: float = 1e-4

    def __post_init__(self):
        if self.restarts < 1:
            raise ValueError("restarts must be >= 1")
        if self.tol <= 0:
            raise ValueError("tol must be positive")


@dataclass(frozen=True, eq=False)
class Ensemble:
    """Weighted pure-state decomposition."""

    weights: tuple[float, ...]
    members: tuple[PureState, ...]

    def __post_init__(self):
        object.__setattr__(self, "weights", tuple(float(w) for w in self.weights))
        object.__setattr__(self, "members", tuple(self.members))
        if len(self.weights) != len(self.members) or not self.members:
            raise ValueError("weights and members must align and be nonempty")
        if any(w <= 0 for w in self.weights):
            raise ValueError("ensemble weights must be positive")
        if abs(sum(self.weights) - 1.0) > 1e-10:
            raise ValueError(f"weights sum to {sum(self.weights)!r}, expected 1")
        regs = {m.register.labels for m in self.members}
        if len(regs) != 1:
            raise ValueError("ensemble members live on different registers")

    @property
    def register(self):
        return self.members[0].register

    def density(self) -> DensityMatrix:
        ent = sum(w * np.outer(m.amplitudes, m.amplitudes.conj())
                  for w, m in zip(self.weights, self.members))
        return DensityMatrix(self.register, ent)

    def average(self, fn: Callable[[PureState], float]) -> float:
        return float(sum(w * fn(m) for w, m in zip(self.weights, self.members)))


def reconstruction_defect(ensemble: Ensemble, rho: DensityMatrix) -> float:
    return float(np.max(np.abs(ensemble.density().entries - rho.entries)))


def _eigen_support(rho: DensityMatrix) -> tuple[np.ndarray, np.ndarray]:
    w, v = linalg.eigh(rho.entries)
    w = linalg.clip_psd(w, what="roof target")
    rank = int(np.sum(w > RANK_TOL))
    return w[:rank], v[:, :rank]


def enumerate_ensemble(rho: DensityMatrix, mixing: np.ndarray) -> Ensemble:
    """Decomposition induced by an m x m mixing unitary over the eigenbasis."""
    mixing = np.asarray(mixing, dtype=np.complex128)
    if mixing.ndim != 2 or mixing.shape[0] != mixing.shape[1]:
        raise ValueError(f"mixing must be square, got shape {mixing.shape}")
    m = mixing.shape[0]
    defect = float(np.max(np.abs(mixing.conj().T @ mixing - np.eye(m))))
    if defect > UNITARITY_TOL:
        raise ValueError(f"mixing is not unitary: defect {defect:.3e}")
    w, vecs = _eigen_support(rho)
    rank = len(w)
    if m < rank:
        raise ValueError(f"ensemble size {m} is below the target rank {rank}")
    rows = mixing[:, :rank] @ (np.sqrt(w)[:, None] * vecs.T)
    probs = np.sum(np.abs(rows) ** 2, axis=1)
    keep = probs > 1e-14
    members = tuple(PureState(rho.register, rows[j] / np.sqrt(probs[j]))
                    for j in range(m) if keep[j])
    ensemble = Ensemble(tuple(probs[keep]), members)
    defect = reconstruction_defect(ensemble, rho)
    if defect > RECONSTRUCTION_TOL:
        raise ValueError(f"ensemble does not reconstruct the target: "
                         f"max entry error {defect:.3e}")
    return ensemble


class RoofResult(NamedTuple):
    value: float           # roof value (squared average for SCREN-type kinds)
    average: float         # optimized average of the inner pure measure
    ensemble: Ensemble
    spread: float          # top-3 restart spread, on the value scale
    restart_values: tuple[float, ...]
    ensemble_size: int


def _cut_permutation(reg, cut: Bipartition) -> tuple[tuple[int, ...], int, int]:
    a_pos = [reg.labels.index(lab) for lab in cut.side_a]
    b_pos = [i for i in range(reg.count) if i not in a_pos]
    return tuple(a_pos + b_pos), 2 ** len(a_pos), 2 ** len(b_pos)


def _make_average_fn(reg, cut: Bipartition, inner: str):
    """Vectorized sum_j p_j * measure(member_j) over unnormalized member rows.

    Operates on stacks shaped (..., m, d).  Uses the reduced-state Gram matrix
    of each unnormalized row, so no divisions by near-zero weights occur.
    """
    perm, da, db = _cut_permutation(reg, cut)
    nq = reg.count

    def reduced_gram(rows: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        lead = rows.shape[:-1]
        tens = rows.reshape(lead + (2,) * nq)
        axes = tuple(range(len(lead))) + tuple(len(lead) + p for p in perm)
        tens = tens.transpose(axes).reshape(lead + (da, db))
        gram = np.einsum("...ab,...cb->...ac", tens, tens.conj())
        p = np.real(np.trace(gram, axis1=-2, axis2=-1))
        return gram, p

    if inner == "concurrence":
        def fn(rows):
            gram, p = reduced_gram(rows)
            t = np.sum(np.abs(gram) ** 2, axis=(-2, -1))
            return np.sum(np.sqrt(np.clip(2.0 * (p * p - t), 0.0, None)), axis=-1)
        return fn

    if inner == "negativity":
        if da == 2:
            def fn(rows):
                gram, p = reduced_gram(rows)
                det = (gram[..., 0, 0].real * gram[..., 1, 1].real
                       - np.abs(gram[..., 0, 1]) ** 2)
                return np.sum(2.0 * np.sqrt(np.clip(det, 0.0, None)), axis=-1)
        else:
            def fn(rows):
                gram, p = reduced_gram(rows)
                lam = np.clip(np.linalg.eigvalsh(gram), 0.0, None)
                return np.sum(np.sum(np.sqrt(lam), axis=-1) ** 2 - p, axis=-1)
        return fn

    if inner == "eof":
        def fn(rows):
            gram, p = reduced_gram(rows)
            t = np.sum(np.abs(gram) ** 2, axis=(-2, -1))
            psafe = np.where(p > 1e-14, p, 1.0)
            c = np.sqrt(np.clip(2.0 * (p * p - t), 0.0, None)) / psafe
            c = np.clip(c, 0.0, 1.0)
            y = 0.5 * (1.0 + np.sqrt(1.0 - c * c))
            y = np.clip(y, 1e-300, 1.0)
            ent = -(y * np.log2(y)
                    + np.where(y < 1.0, (1 - y) * np.log2(np.clip(1 - y, 1e-300, 1)), 0.0))
            return np.sum(np.where(p > 1e-14, p * ent, 0.0), axis=-1)
        return fn

    raise ValueError(f"unknown inner measure {inner!r}")


def _expi_batch(eps: np.ndarray, herm: np.ndarray) -> np.ndarray:
    """exp(1j * eps[r] * herm[r]) for a stack of Hermitian matrices."""
    w, v = np.linalg.eigh(herm)
    phase = np.exp(1j * eps[:, None] * w)
    return (v * phase[:, None, :]) @ np.conj(np.swapaxes(v, -1, -2))


def optimize_roof(rho: DensityMatrix, kind: MeasureKind, direction: str,
                  cut: Bipartition, cfg: RoofConfig | None = None,
                  seed: int = 0) -> RoofResult:
    """Optimize the decomposition-averaged pure-state measure of ``rho``.

    direction 'min' searches the roof infimum, 'max' the assisted supremum.
    The reported value is the average re-evaluated on the returned ensemble
    with the scalar pure-state measures (squared for SCREN-type kinds), so the
    ensemble achieves the reported value by construction.
    """
    if direction not in ("min", "max"):
        raise ValueError("direction must be 'min' or 'max'")
    cut.validate_for(rho.register)
    kind = MeasureKind(kind)
    inner = _INNER[kind]
    cfg = cfg or RoofConfig()

    w, vecs = _eigen_support(rho)
    rank = len(w)
    if rank == 1:
        member = PureState(rho.register, vecs[:, 0])
        ensemble = Ensemble((1.0,), (member,))
        avg = pure_cut_value(_INNER_KIND[inner], member, cut)
        value = avg * avg if kind in _SQUARED else avg
        return RoofResult(value, avg, ensemble, 0.0, (value,), 1)

    m = cfg.ensemble_size if cfg.ensemble_size is not None else 2 * rank
    if m < rank:
        raise ValueError(f"ensemble size {m} is below the target rank {rank}")

    half = np.sqrt(w)[:, None] * vecs.T            # (rank, d)
    avg_fn = _make_average_fn(rho.register, cut, inner)

    def objective(units: np.ndarray) -> np.ndarray:
        rows = units[:, :, :rank] @ half           # (R, m, d)
        return avg_fn(rows)

    nrestarts = cfg.restarts
    units = np.empty((nrestarts, m, m), dtype=np.complex128)
    tapes = np.empty((nrestarts, cfg.max_iters, m, m), dtype=np.complex128)
    for r in range(nrestarts):
        rng = rng_stream(seed, r)
        # restart 0 starts at the identity so the eigen-ensemble is always a
        # candidate; the rest start Haar-random
        units[r] = np.eye(m) if r == 0 else linalg.haar_unitary(m, rng)
        g = (rng.standard_normal((cfg.max_iters, m, m))
             + 1j * rng.standard_normal((cfg.max_iters, m, m)))
        tapes[r] = 0.5 * (g + np.conj(np.swapaxes(g, -1, -2)))

    sign = 1.0 if direction == "min" else -1.0
    vals = objective(units)
    eps = np.full(nrestarts, 0.3)
    for it in range(cfg.max_iters):
        active = eps > EPS_FLOOR
        if not active.any():
            break
        herm = tapes[:, it]
        norm = np.sqrt(np.sum(np.abs(herm) ** 2, axis=(-2, -1)))
        herm = herm / np.where(norm > 0, norm, 1.0)[:, None, None]
        # walk the drawn direction both ways; the reverse exponential is the
        # conjugate transpose, so it costs one extra objective evaluation
        step = _expi_batch(eps, herm)
        fwd = units @ step
        bwd = units @ np.conj(np.swapaxes(step, -1, -2))
        v_f = objective(fwd)
        v_b = objective(bwd)
        take_b = sign * v_b < sign * v_f
        proposal = np.where(take_b[:, None, None], bwd, fwd)
        cand = np.where(take_b, v_b, v_f)
        better = (sign * cand < sign * vals) & active
        units[better] = proposal[better]
        vals[better] = cand[better]
        eps = np.where(better, np.minimum(eps * 1.25, 1.5), eps * 0.975)

    order = np.argsort(sign * vals, kind="stable")
    best = int(order[0])
    ensemble = enumerate_ensemble(rho, units[best])
    inner_kind = _INNER_KIND[inner]
    avg = ensemble.average(lambda s: pure_cut_value(inner_kind, s, cut))
    if abs(avg - vals[best]) > max(1e-9, cfg.tol):
        raise RuntimeError("ensemble re-evaluation drifted from the optimizer "
                           f"value: {avg!r} vs {vals[best]!r}")

    def transform(x: float) -> float:
        return x * x if kind in _SQUARED else x

    restart_values = tuple(transform(float(v)) for v in vals)
    top = [transform(float(vals[i])) for i in order[:min(3, nrestarts)]]
    spread = float(max(top) - min(top))
    return RoofResult(transform(avg), float(avg), ensemble, spread,
                      restart_values, m)
