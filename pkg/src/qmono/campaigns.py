"""Batched state sampling, measure panels, and fuzz campaign drivers.

Sampling is blocked: states come in fixed blocks of 1000, block b drawn from
the Philox substream (seed, b).  Campaign results therefore never depend on
how blocks are sharded across workers.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import linalg
from .bounds import (BoundParams, ChainSpec, max_admissible_k,
                     monogamy_bound_chain, monogamy_bound_tripartite,
                     polygamy_bound_chain, polygamy_bound_tripartite)
from .measures import MeasureKind, binary_entropy
from .roof import RoofConfig, optimize_roof
from .states import (Bipartition, PureState, QubitRegister, haar_batch,
                     reduced_density, rng_stream)

BLOCK = 1000
GUARANTEE_SLACK = 1e-9

_Y = np.array([[0.0, -1.0j], [1.0j, 0.0]])
_YY = np.kron(_Y, _Y)

MONOGAMY_KINDS = (MeasureKind.CONCURRENCE, MeasureKind.NEGATIVITY,
                  MeasureKind.SCREN, MeasureKind.ENTANGLEMENT_OF_FORMATION)
POLYGAMY_KINDS = (MeasureKind.CONCURRENCE_OF_ASSISTANCE, MeasureKind.SCRENOA)


def sample_blocks(n: int, n_qubits: int, seed: int) -> np.ndarray:
    """n Haar-random amplitude vectors in deterministic 1000-state blocks."""
    out = []
    for b in range((n + BLOCK - 1) // BLOCK):
        count = min(BLOCK, n - b * BLOCK)
        out.append(haar_batch(n_qubits, count, rng_stream(seed, b)))
    return np.concatenate(out, axis=0)


def _pair_reduction(psis: np.ndarray, n_qubits: int, partner: int) -> np.ndarray:
    """Batched two-qubit reduction onto (qubit 0, qubit ``partner``)."""
    n = psis.shape[0]
    tens = psis.reshape((n,) + (2,) * n_qubits)
    order = [0, partner] + [i for i in range(1, n_qubits) if i != partner]
    tens = tens.transpose([0] + [1 + i for i in order]).reshape(n, 4, -1)
    return tens @ np.conj(np.swapaxes(tens, -1, -2))


def spin_flip_roots_batch(rhos: np.ndarray) -> np.ndarray:
    """Descending sqrt spectra of rho rho~ for a stack of two-qubit states.

    Same Hermitian-dilation route as `measures.spin_flip_roots`, batched.
    """
    n = rhos.shape[0]
    w, v = linalg.eigh_batch(rhos)
    w = linalg.clip_psd(w, what="two-qubit reduction")
    x = v * np.sqrt(w)[:, None, :]
    tau = np.swapaxes(x, -1, -2) @ _YY @ x
    dil = np.zeros((n, 8, 8), dtype=np.complex128)
    dil[:, :4, 4:] = tau
    dil[:, 4:, :4] = np.conj(np.swapaxes(tau, -1, -2))
    e, _ = linalg.eigh_batch(dil)
    return np.clip(e[:, :4], 0.0, None)


def negativity_batch(rhos: np.ndarray) -> np.ndarray:
    """Trace-norm negativity of two-qubit states, transpose on the first qubit."""
    n = rhos.shape[0]
    pt = rhos.reshape(n, 2, 2, 2, 2).transpose(0, 3, 2, 1, 4).reshape(n, 4, 4)
    w, _ = linalg.eigh_batch(pt)
    return np.clip(np.sum(np.abs(w), axis=1) - 1.0, 0.0, None)


@dataclass
class TripartitePanel:
    """Per-state measure triples for a batch of three-qubit pure states."""

    joint: dict
    pair_b: dict
    pair_c: dict
    purity_a: np.ndarray

    def triple(self, kind: MeasureKind):
        return self.joint[kind], self.pair_b[kind], self.pair_c[kind]


def three_qubit_panel(psis: np.ndarray,
                      kinds: tuple[MeasureKind, ...] = (
                          MeasureKind.CONCURRENCE,
                          MeasureKind.SCRENOA)) -> TripartitePanel:
    """Joint-cut and pairwise values for each requested kind, batched."""
    n = psis.shape[0]
    tens = psis.reshape(n, 2, 4)
    rho_a = tens @ np.conj(np.swapaxes(tens, -1, -2))
    purity = np.real(np.einsum("nab,nba->n", rho_a, rho_a))
    c_joint = np.sqrt(np.clip(2.0 * (1.0 - purity), 0.0, None))

    rho_b = _pair_reduction(psis, 3, 1)
    rho_c = _pair_reduction(psis, 3, 2)
    roots_b = spin_flip_roots_batch(rho_b)
    roots_c = spin_flip_roots_batch(rho_c)
    c_b = np.clip(roots_b[:, 0] - roots_b[:, 1:].sum(axis=1), 0.0, None)
    c_c = np.clip(roots_c[:, 0] - roots_c[:, 1:].sum(axis=1), 0.0, None)

    joint, pair_b, pair_c = {}, {}, {}
    for kind in kinds:
        if kind is MeasureKind.CONCURRENCE:
            joint[kind], pair_b[kind], pair_c[kind] = c_joint, c_b, c_c
        elif kind is MeasureKind.CONCURRENCE_OF_ASSISTANCE:
            joint[kind] = c_joint
            pair_b[kind] = roots_b.sum(axis=1)
            pair_c[kind] = roots_c.sum(axis=1)
        elif kind is MeasureKind.NEGATIVITY:
            joint[kind] = c_joint  # single-qubit focus: N equals C on pure cuts
            pair_b[kind] = negativity_batch(rho_b)
            pair_c[kind] = negativity_batch(rho_c)
        elif kind is MeasureKind.SCREN:
            joint[kind] = c_joint ** 2
            pair_b[kind] = c_b ** 2
            pair_c[kind] = c_c ** 2
        elif kind is MeasureKind.SCRENOA:
            joint[kind] = c_joint ** 2
            pair_b[kind] = roots_b.sum(axis=1) ** 2
            pair_c[kind] = roots_c.sum(axis=1) ** 2
        elif kind is MeasureKind.ENTANGLEMENT_OF_FORMATION:
            joint[kind] = np.array([binary_entropy(0.5 * (1 + math.sqrt(
                max(1.0 - c * c, 0.0)))) for c in c_joint])
            pair_b[kind] = np.array([binary_entropy(0.5 * (1 + math.sqrt(
                max(1.0 - c * c, 0.0)))) for c in c_b])
            pair_c[kind] = np.array([binary_entropy(0.5 * (1 + math.sqrt(
                max(1.0 - c * c, 0.0)))) for c in c_c])
        else:
            raise ValueError(f"unsupported panel kind {kind!r}")
    return TripartitePanel(joint, pair_b, pair_c, purity)


def _resolve_k(policy, q_b: float, q_c: float, power: float) -> float:
    if policy == "unit":
        return 1.0
    if policy == "auto":
        small, large = sorted((q_b, q_c))
        k = max_admissible_k(small, large, power)
        return 1.0 if math.isnan(k) else k
    return float(policy)


@dataclass
class FuzzOutcome:
    checked: int = 0
    condition_held: int = 0
    violations: int = 0
    worst_margin: float = math.inf
    witness: dict | None = None

    def merge(self, other: "FuzzOutcome") -> "FuzzOutcome":
        self.checked += other.checked
        self.condition_held += other.condition_held
        self.violations += other.violations
        self.worst_margin = min(self.worst_margin, other.worst_margin)
        if self.witness is None:
            self.witness = other.witness
        return self


def _witness(psis: np.ndarray, index: int, seed: int, detail: dict) -> dict:
    amps = psis[index]
    return {
        "seed": seed,
        "state_index": int(index),
        "amplitudes": [[float(a.real), float(a.imag)] for a in amps],
        **detail,
    }


def tripartite_fuzz(kind: MeasureKind, mode: str, n: int, seed: int,
                    params: BoundParams, k_policy="unit",
                    block_range: tuple[int, int] | None = None) -> FuzzOutcome:
    """Check the tripartite bound on Haar-random three-qubit states.

    ``k_policy`` is 'unit', 'auto' (largest admissible k per state), or a
    fixed value.  Violations are counted only among states whose branch
    condition holds.  ``block_range`` restricts to a block slice so shards
    can run in parallel.
    """
    kind = MeasureKind(kind)
    n_blocks = (n + BLOCK - 1) // BLOCK
    lo, hi = block_range if block_range is not None else (0, n_blocks)
    out = FuzzOutcome()
    base = params.require_monogamy()[1] if mode == "monogamy" \
        else params.require_polygamy()[1]
    op = monogamy_bound_tripartite if mode == "monogamy" \
        else polygamy_bound_tripartite
    for b in range(lo, hi):
        count = min(BLOCK, n - b * BLOCK)
        if count <= 0:
            break
        psis = haar_batch(3, count, rng_stream(seed, b))
        panel = three_qubit_panel(psis, kinds=(kind,))
        joint, q_b, q_c = panel.triple(kind)
        for i in range(count):
            k = _resolve_k(k_policy, q_b[i], q_c[i], base)
            p = BoundParams(alpha=params.alpha, gamma=params.gamma,
                            beta=params.beta, delta=params.delta, k=k)
            rep = op(q_b[i], q_c[i], p, q_joint=joint[i])
            out.checked += 1
            if not rep.condition_holds:
                continue
            out.condition_held += 1
            out.worst_margin = min(out.worst_margin, rep.margin)
            if rep.margin < -GUARANTEE_SLACK:
                out.violations += 1
                if out.witness is None:
                    out.witness = _witness(psis, i, seed, {
                        "block": b, "margin": rep.margin,
                        "values": {"q_joint": float(joint[i]),
                                   "q_ab": float(q_b[i]),
                                   "q_ac": float(q_c[i]), "k": k},
                    })
    return out


def _chain_panel(psis: np.ndarray, n_qubits: int, kind: MeasureKind):
    """Joint value and pairwise values for every partner, batched."""
    n = psis.shape[0]
    tens = psis.reshape(n, 2, -1)
    rho_a = tens @ np.conj(np.swapaxes(tens, -1, -2))
    purity = np.real(np.einsum("nab,nba->n", rho_a, rho_a))
    c_joint = np.sqrt(np.clip(2.0 * (1.0 - purity), 0.0, None))
    pair_vals = []
    for partner in range(1, n_qubits):
        roots = spin_flip_roots_batch(_pair_reduction(psis, n_qubits, partner))
        if kind is MeasureKind.CONCURRENCE:
            pair_vals.append(np.clip(roots[:, 0] - roots[:, 1:].sum(axis=1),
                                     0.0, None))
        elif kind is MeasureKind.SCRENOA:
            pair_vals.append(roots.sum(axis=1) ** 2)
        else:
            raise ValueError(f"chain campaigns support concurrence and "
                             f"screnoa, not {kind.value}")
    joint = c_joint if kind is MeasureKind.CONCURRENCE else c_joint ** 2
    return joint, pair_vals, purity


def _residual_reductions(psis: np.ndarray, n_qubits: int, rest_pos) -> np.ndarray:
    """Batched reductions onto the qubits at ``rest_pos`` (focus first)."""
    n = psis.shape[0]
    tens = psis.reshape((n,) + (2,) * n_qubits)
    keep = list(rest_pos)
    drop = [i for i in range(n_qubits) if i not in keep]
    dk = 2 ** len(keep)
    mat = tens.transpose([0] + [1 + i for i in keep + drop]).reshape(n, dk, -1)
    return mat @ np.conj(np.swapaxes(mat, -1, -2))


def _ppt_negativity_batch(rhos: np.ndarray) -> np.ndarray:
    """Trace-norm negativity (first qubit transposed) for a stack of states.

    Convexity of the trace norm makes this a certified lower bound on the
    decomposition-averaged negativity of each state.
    """
    n, dk, _ = rhos.shape
    half = dk // 2
    pt = rhos.reshape(n, 2, half, 2, half).transpose(0, 3, 2, 1, 4)
    w, _ = linalg.eigh_batch(pt.reshape(n, dk, dk))
    return np.clip(np.sum(np.abs(w), axis=1) - 1.0, 0.0, None)


def _assisted_negativity_climb(rhos: np.ndarray, iters: int,
                               seed: int, stream: int) -> np.ndarray:
    """Batched hill climb maximizing the decomposition-averaged negativity
    (first qubit vs the rest) of each state in the stack.

    Returns certified lower bounds: every value is achieved by an explicit
    decomposition of its state.
    """
    n, d, _ = rhos.shape
    w, vecs = linalg.eigh_batch(rhos)
    w = np.clip(w, 0.0, None)
    rank = 2  # reductions of a pure state over a single traced qubit
    half = np.sqrt(w[:, :rank, None]) * np.swapaxes(vecs[:, :, :rank], -1, -2)
    m = 2 * rank

    def objective(units: np.ndarray) -> np.ndarray:
        rows = units[:, :, :rank] @ half              # (n, m, d)
        tens = rows.reshape(n, m, 2, d // 2)
        gram = np.einsum("nmab,nmcb->nmac", tens, tens.conj())
        det = (gram[..., 0, 0].real * gram[..., 1, 1].real
               - np.abs(gram[..., 0, 1]) ** 2)
        return np.sum(2.0 * np.sqrt(np.clip(det, 0.0, None)), axis=1)

    rng = rng_stream(seed, stream, 7)
    units = np.broadcast_to(np.eye(m, dtype=np.complex128),
                            (n, m, m)).copy()
    vals = objective(units)
    eps = np.full(n, 0.3)
    for _ in range(iters):
        g = (rng.standard_normal((n, m, m))
             + 1j * rng.standard_normal((n, m, m)))
        herm = 0.5 * (g + np.conj(np.swapaxes(g, -1, -2)))
        norm = np.sqrt(np.sum(np.abs(herm) ** 2, axis=(-2, -1)))
        herm /= np.where(norm > 0, norm, 1.0)[:, None, None]
        hw, hv = np.linalg.eigh(herm)
        phase = np.exp(1j * eps[:, None] * hw)
        step = (hv * phase[:, None, :]) @ np.conj(np.swapaxes(hv, -1, -2))
        fwd = units @ step
        bwd = units @ np.conj(np.swapaxes(step, -1, -2))
        v_f = objective(fwd)
        v_b = objective(bwd)
        take_b = v_b > v_f
        proposal = np.where(take_b[:, None, None], bwd, fwd)
        cand = np.where(take_b, v_b, v_f)
        better = cand > vals
        units[better] = proposal[better]
        vals[better] = cand[better]
        eps = np.where(better, np.minimum(eps * 1.25, 1.5), eps * 0.975)
    return vals


def chain_fuzz(kind: MeasureKind, mode: str, n_qubits: int, seed: int,
               params: BoundParams, split_index: int = 1,
               n_states: int | None = None, min_accepted: int | None = None,
               max_states: int = 100_000) -> FuzzOutcome:
    """Check the chain bound on Haar-random states of >= 4 qubits.

    Residual-cut conditions are decided with certified one-sided brackets:
    the concurrence residual is lower-bounded by the root-sum-square of the
    pairwise concurrences beyond the split and upper-bounded where needed by
    a candidate decomposition; the assisted-negativity residual is
    lower-bounded by a candidate decomposition and upper-bounded by
    2*(1 - Tr rho_A^2).  Accepted states therefore provably satisfy the
    chain conditions, and the bound itself uses exact closed-form values.
    """
    kind = MeasureKind(kind)
    if n_qubits < 4:
        raise ValueError("chain campaigns need at least four qubits")
    if (n_states is None) == (min_accepted is None):
        raise ValueError("pass exactly one of n_states or min_accepted")
    base = params.require_monogamy()[1] if mode == "monogamy" \
        else params.require_polygamy()[1]
    k = params.k
    op = monogamy_bound_chain if mode == "monogamy" else polygamy_bound_chain
    labels = ("A",) + tuple(f"B{i}" for i in range(1, n_qubits))
    reg = QubitRegister(labels)
    spec = ChainSpec(labels[1:], split_index)
    n_partners = n_qubits - 1
    out = FuzzOutcome()
    block_idx = 0
    while True:
        if n_states is not None and out.checked >= n_states:
            break
        if min_accepted is not None and out.condition_held >= min_accepted:
            break
        if out.checked >= max_states:
            break
        count = BLOCK if n_states is None else min(BLOCK, n_states - out.checked)
        psis = haar_batch(n_qubits, count, rng_stream(seed, block_idx))
        joint, pair_vals, purity = _chain_panel(psis, n_qubits, kind)
        if n_qubits == 4:
            residual_lower = _residual_bounds_4q(psis, kind, pair_vals,
                                                 purity, k, base, seed,
                                                 block_idx)
        for i in range(count):
            out.checked += 1
            values = [pv[i] for pv in pair_vals]
            residuals = []
            ok = True
            for idx in range(1, n_partners):
                rest_labels = (labels[0],) + labels[idx + 1:]
                if len(rest_labels) == 2:
                    residuals.append(values[-1])
                    continue
                if idx <= split_index:
                    if n_qubits == 4:
                        lower = residual_lower[i]
                    elif kind is MeasureKind.CONCURRENCE:
                        lower = math.sqrt(sum(v * v for v in values[idx:]))
                    else:
                        psi = PureState(reg, psis[i])
                        rho = reduced_density(psi, rest_labels)
                        cut = Bipartition.split(rho.register, rest_labels[:1])
                        lower = optimize_roof(
                            rho, kind, "max", cut,
                            cfg=RoofConfig(restarts=2, max_iters=300),
                            seed=seed + idx).value
                    residuals.append(lower)
                    if k * values[idx - 1] ** base > lower ** base:
                        ok = False
                        break
                else:
                    # j-block conditions need a certified upper bracket
                    if kind is MeasureKind.CONCURRENCE:
                        psi = PureState(reg, psis[i])
                        rho = reduced_density(psi, rest_labels)
                        cut = Bipartition.split(rho.register, rest_labels[:1])
                        lo = math.sqrt(sum(v * v for v in values[idx:]))
                        up = optimize_roof(
                            rho, kind, "min", cut,
                            cfg=RoofConfig(restarts=2, max_iters=250),
                            seed=seed + idx).value
                        residuals.append(max(up, lo))
                    else:
                        residuals.append(2.0 * (1.0 - purity[i]))
            if not ok:
                continue
            rep = op(values, residuals, spec, params, q_joint=joint[i])
            if not rep.condition_holds:
                continue
            out.condition_held += 1
            out.worst_margin = min(out.worst_margin, rep.margin)
            if rep.margin < -GUARANTEE_SLACK:
                out.violations += 1
                if out.witness is None:
                    out.witness = _witness(psis, i, seed, {
                        "block": block_idx, "margin": rep.margin,
                        "values": {"q_joint": float(joint[i]),
                                   "pairs": [float(v) for v in values],
                                   "residuals": [float(r) for r in residuals],
                                   "k": k},
                    })
            if min_accepted is not None and out.condition_held >= min_accepted:
                break
        block_idx += 1
    return out


def _residual_bounds_4q(psis: np.ndarray, kind: MeasureKind, pair_vals,
                        purity: np.ndarray, k: float, base: float, seed: int,
                        block_idx: int) -> np.ndarray:
    """Certified lower bounds on the first residual cut Q(A | B2 B3).

    Concurrence: root-sum-square of the remaining pairwise concurrences
    (power-2 base relation on the reduced state).  SCRENoA: the larger of
    the squared trace-norm negativity (convexity) and a batched climb over
    explicit decompositions; the climb runs only for states the cheap bound
    leaves undecided against the condition need k * Q^base(A, B1), skipping
    states whose certified upper bound 2*(1 - Tr rho_A^2) already fails it.
    """
    if kind is MeasureKind.CONCURRENCE:
        return np.sqrt(pair_vals[1] ** 2 + pair_vals[2] ** 2)
    rhos = _residual_reductions(psis, 4, [0, 2, 3])
    lower = _ppt_negativity_batch(rhos) ** 2
    need = k * pair_vals[0] ** base
    upper = 2.0 * (1.0 - purity)
    undecided = (lower ** base < need) & (upper ** base >= need)
    if undecided.any():
        climbed = _assisted_negativity_climb(rhos[undecided], 220, seed,
                                             block_idx)
        lower[undecided] = np.maximum(lower[undecided], climbed ** 2)
    return lower


def lemma_fuzz() -> FuzzOutcome:
    """Scan both scalar power-bound grids; counts points and violations."""
    from .bounds import check_power_lower_bound, check_power_upper_bound
    out = FuzzOutcome()
    ks = (1.0, 1.2247, 1.5, 2.0, 5.0)
    xs_lower = np.round(np.arange(0, 101) * 0.01, 10)
    xs_upper = np.round(1.0 + np.arange(0, 51) * 0.1, 10)
    for ks_val in ks:
        ts = ks_val + 0.5 * np.arange(0, 101)
        for x in xs_lower:
            for t in ts:
                chk = check_power_lower_bound(float(x), float(t), ks_val)
                out.checked += 1
                out.condition_held += 1
                scale = max(1.0, abs(chk.lhs), abs(chk.rhs))
                out.worst_margin = min(out.worst_margin,
                                       (chk.lhs - chk.rhs) / scale)
                if not chk.holds:
                    out.violations += 1
        for x in xs_upper:
            for t in ts:
                chk = check_power_upper_bound(float(x), float(t), ks_val)
                out.checked += 1
                out.condition_held += 1
                scale = max(1.0, abs(chk.lhs), abs(chk.rhs))
                out.worst_margin = min(out.worst_margin,
                                       (chk.rhs - chk.lhs) / scale)
                if not chk.holds:
                    out.violations += 1
    return out
