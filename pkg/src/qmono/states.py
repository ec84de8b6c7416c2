"""Registers, dense multiqubit states, catalog states, and seeded generators.

Basis ordering contract: for a register with labels (l0, l1, ..., l_{N-1}),
basis index i enumerates computational states with the FIRST label as the
most significant bit, i.e. |q0 q1 ... q_{N-1}> sits at index
sum_j q_j * 2**(N-1-j).  Every array, CSV dump, and reduction in this package
follows that convention.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from . import linalg

NORM_TOL = 1e-12
TRACE_TOL = 1e-12
HERM_TOL = 1e-12


def rng_stream(seed: int, *key: int) -> np.random.Generator:
    """Counter-based Philox generator; extra integers select substreams."""
    return np.random.Generator(
        np.random.Philox(np.random.SeedSequence(entropy=int(seed),
                                                spawn_key=tuple(key))))


@dataclass(frozen=True, eq=True)
class QubitRegister:
    """Ordered collection of named qubits."""

    labels: tuple[str, ...]

    def __post_init__(self):
        labels = tuple(str(x) for x in self.labels)
        object.__setattr__(self, "labels", labels)
        if not labels:
            raise ValueError("register needs at least one label")
        if len(set(labels)) != len(labels):
            dupes = sorted({x for x in labels if labels.count(x) > 1})
            raise ValueError(f"duplicate register labels: {dupes}")

    @property
    def count(self) -> int:
        return len(self.labels)

    @property
    def dim(self) -> int:
        return 2 ** self.count

    def positions(self, subset: Iterable[str]) -> tuple[int, ...]:
        """Positions of the given labels, rejecting unknown ones."""
        out = []
        for lab in subset:
            if lab not in self.labels:
                raise ValueError(f"unknown register label {lab!r}; "
                                 f"register has {list(self.labels)}")
            out.append(self.labels.index(lab))
        return tuple(out)

    def ordered_subset(self, subset: Iterable[str]) -> tuple[str, ...]:
        """The given labels rearranged into register order."""
        pos = sorted(self.positions(subset))
        return tuple(self.labels[i] for i in pos)

    def bitstring(self, index: int) -> str:
        return format(index, f"0{self.count}b")


def register(*labels: str) -> QubitRegister:
    return QubitRegister(tuple(labels))


@dataclass(frozen=True, eq=True)
class Bipartition:
    """A two-block split of a register's labels (side_a | side_b)."""

    side_a: tuple[str, ...]
    side_b: tuple[str, ...]

    def __post_init__(self):
        object.__setattr__(self, "side_a", tuple(self.side_a))
        object.__setattr__(self, "side_b", tuple(self.side_b))
        if not self.side_a or not self.side_b:
            raise ValueError("both sides of a bipartition must be nonempty")
        overlap = set(self.side_a) & set(self.side_b)
        if overlap:
            raise ValueError(f"bipartition sides overlap on {sorted(overlap)}")

    @classmethod
    def split(cls, reg: QubitRegister, side_a: Iterable[str]) -> "Bipartition":
        """Cut ``reg`` into ``side_a`` and everything else (register order)."""
        a = reg.ordered_subset(side_a)
        b = tuple(lab for lab in reg.labels if lab not in a)
        return cls(a, b)

    def validate_for(self, reg: QubitRegister) -> None:
        if set(self.side_a) | set(self.side_b) != set(reg.labels):
            raise ValueError("bipartition does not cover the register labels")


@dataclass(frozen=True, eq=False)
class PureState:
    """Normalized amplitude vector over a qubit register."""

    register: QubitRegister
    amplitudes: np.ndarray

    def __post_init__(self):
        amps = np.array(self.amplitudes, dtype=np.complex128)
        if amps.shape != (self.register.dim,):
            raise ValueError(f"amplitude vector has shape {amps.shape}, "
                             f"expected ({self.register.dim},)")
        norm2 = float(np.sum(np.abs(amps) ** 2))
        if abs(norm2 - 1.0) > NORM_TOL:
            raise ValueError(f"state is not normalized: sum |a|^2 = {norm2!r}")
        amps.setflags(write=False)
        object.__setattr__(self, "amplitudes", amps)

    def tensor(self) -> np.ndarray:
        """Amplitudes reshaped to one axis per qubit (read-only view)."""
        return self.amplitudes.reshape((2,) * self.register.count)


@dataclass(frozen=True, eq=False)
class DensityMatrix:
    """Hermitian, unit-trace matrix over a qubit register.

    Hermiticity and trace are validated on construction.  Positive
    semidefiniteness (eigenvalues >= -1e-10) is an invariant of everything
    this package produces; call `check_psd` to verify it explicitly.
    """

    register: QubitRegister
    entries: np.ndarray

    def __post_init__(self):
        ent = np.array(self.entries, dtype=np.complex128)
        d = self.register.dim
        if ent.shape != (d, d):
            raise ValueError(f"density matrix has shape {ent.shape}, "
                             f"expected ({d}, {d})")
        defect = linalg.hermiticity_defect(ent)
        if defect > HERM_TOL:
            raise ValueError(f"density matrix is not Hermitian: "
                             f"max asymmetry {defect:.3e}")
        tr = complex(np.trace(ent))
        if abs(tr - 1.0) > TRACE_TOL:
            raise ValueError(f"density matrix trace is {tr!r}, expected 1")
        ent.setflags(write=False)
        object.__setattr__(self, "entries", ent)

    def eigenvalues(self) -> np.ndarray:
        w, _ = linalg.eigh(self.entries)
        return w

    def check_psd(self, floor: float = linalg.PSD_FLOOR) -> np.ndarray:
        """Eigenvalues (descending), rejecting genuine negativity."""
        return linalg.clip_psd(self.eigenvalues(), floor=floor,
                               what="density matrix")

    def purity(self) -> float:
        # Tr rho^2 = sum |rho_ab|^2 for Hermitian rho
        return float(np.sum(np.abs(self.entries) ** 2))


def computational_state(reg: QubitRegister, bits: str) -> PureState:
    """The basis ket |bits> under the register's ordering contract."""
    if len(bits) != reg.count or set(bits) - {"0", "1"}:
        raise ValueError(f"bad bitstring {bits!r} for {reg.count} qubits")
    amps = np.zeros(reg.dim, dtype=np.complex128)
    amps[int(bits, 2)] = 1.0
    return PureState(reg, amps)


def tensor_product(a: PureState, b: PureState) -> PureState:
    """Kronecker product with ``a``'s labels leading."""
    overlap = set(a.register.labels) & set(b.register.labels)
    if overlap:
        raise ValueError(f"registers share labels {sorted(overlap)}; "
                         "tensor factors must be disjoint")
    reg = QubitRegister(a.register.labels + b.register.labels)
    return PureState(reg, np.kron(a.amplitudes, b.amplitudes))


def to_density(psi: PureState) -> DensityMatrix:
    """Rank-1 projector |psi><psi|."""
    return DensityMatrix(psi.register,
                         np.outer(psi.amplitudes, psi.amplitudes.conj()))


def _split_axes(reg: QubitRegister, keep: Sequence[str]):
    keep = tuple(keep)
    if not keep:
        raise ValueError("keep must name at least one label")
    reg.positions(keep)  # rejects unknown labels
    keep_ordered = reg.ordered_subset(keep)
    keep_pos = [reg.labels.index(lab) for lab in keep_ordered]
    drop_pos = [i for i in range(reg.count) if i not in keep_pos]
    return keep_ordered, keep_pos, drop_pos


def reduced_density(psi: PureState, keep: Sequence[str]) -> DensityMatrix:
    """Reduced state of a pure state, tracing out every label not in keep."""
    keep_ordered, keep_pos, drop_pos = _split_axes(psi.register, keep)
    dk = 2 ** len(keep_pos)
    dt = 2 ** len(drop_pos)
    mat = psi.tensor().transpose(keep_pos + drop_pos).reshape(dk, dt)
    return DensityMatrix(QubitRegister(keep_ordered), mat @ mat.conj().T)


def partial_trace(rho: DensityMatrix, keep: Sequence[str]) -> DensityMatrix:
    """Trace out every subsystem whose label is not in keep.

    The output register lists the kept labels in the original order.
    """
    keep_ordered, keep_pos, drop_pos = _split_axes(rho.register, keep)
    if not drop_pos:
        return DensityMatrix(QubitRegister(keep_ordered), rho.entries)
    n = rho.register.count
    dk = 2 ** len(keep_pos)
    dt = 2 ** len(drop_pos)
    tens = rho.entries.reshape((2,) * (2 * n))
    perm = (keep_pos + drop_pos
            + [n + i for i in keep_pos] + [n + i for i in drop_pos])
    block = tens.transpose(perm).reshape(dk, dt, dk, dt)
    out = np.einsum("atbt->ab", block)
    return DensityMatrix(QubitRegister(keep_ordered), out)


def partial_transpose(rho: DensityMatrix, subsystem: Sequence[str]) -> np.ndarray:
    """Transpose the given subsystem's indices; register is unchanged.

    Returns a plain Hermitian matrix (generally not positive semidefinite).
    """
    subsystem = tuple(subsystem)
    if not subsystem:
        raise ValueError("subsystem must name at least one label")
    pos = rho.register.positions(subsystem)
    n = rho.register.count
    tens = rho.entries.reshape((2,) * (2 * n))
    axes = list(range(2 * n))
    for p in pos:
        axes[p], axes[n + p] = axes[n + p], axes[p]
    d = rho.register.dim
    return tens.transpose(axes).reshape(d, d)


def haar_batch(n_qubits: int, count: int, rng: np.random.Generator) -> np.ndarray:
    """Stack of Haar-random pure-state amplitude vectors, shape (count, 2**n)."""
    d = 2 ** n_qubits
    z = rng.standard_normal((count, d)) + 1j * rng.standard_normal((count, d))
    z /= np.linalg.norm(z, axis=1)[:, None]
    return z


def haar_random_pure(reg: QubitRegister, seed: int | None = None,
                     rng: np.random.Generator | None = None) -> PureState:
    """Haar-random pure state (normalized complex standard normal vector)."""
    if rng is None:
        if seed is None:
            raise ValueError("pass a seed or an explicit generator")
        rng = rng_stream(seed)
    return PureState(reg, haar_batch(reg.count, 1, rng)[0])


def random_mixed(reg: QubitRegister, rank: int, seed: int) -> DensityMatrix:
    """Mixture of ``rank`` Haar-random pure states with Dirichlet weights."""
    if not 1 <= rank <= reg.dim:
        raise ValueError(f"rank must be in [1, {reg.dim}], got {rank}")
    rng = rng_stream(seed)
    weights = rng.dirichlet(np.ones(rank))
    members = haar_batch(reg.count, rank, rng)
    ent = np.einsum("k,ka,kb->ab", weights, members, members.conj())
    return DensityMatrix(reg, ent)


@dataclass(frozen=True, eq=True)
class GsdParams:
    """Parameters of the five-amplitude three-qubit normal form.

    ``lam`` holds five non-negative reals with unit square sum; ``phi`` is the
    single relative phase in [0, 2*pi).  The built state on register (A, B, C)
    is

        lam0|000> + lam1*e^{i phi}|100> + lam2|110> + lam3|101> + lam4|111>

    so that the two-qubit reduced concurrences come out as
    C(A,B) = 2*lam0*lam2 and C(A,C) = 2*lam0*lam3, and the joint cut as
    C(A|BC) = 2*lam0*sqrt(lam2^2 + lam3^2 + lam4^2).
    """

    lam: tuple[float, float, float, float, float]
    phi: float = 0.0

    def __post_init__(self):
        lam = tuple(float(x) for x in self.lam)
        object.__setattr__(self, "lam", lam)
        object.__setattr__(self, "phi", float(self.phi))
        if len(lam) != 5:
            raise ValueError("need exactly five amplitudes")
        if any(x < 0 for x in lam):
            raise ValueError("amplitudes must be non-negative")
        total = sum(x * x for x in lam)
        if abs(total - 1.0) > NORM_TOL:
            raise ValueError(f"amplitudes are not normalized: "
                             f"sum lam^2 = {total!r}")
        if not 0.0 <= self.phi < 2.0 * np.pi:
            raise ValueError("phi must lie in [0, 2*pi)")


def make_gsd_state(params: GsdParams) -> PureState:
    """Build the three-qubit normal-form state described by `GsdParams`."""
    reg = register("A", "B", "C")
    amps = np.zeros(8, dtype=np.complex128)
    l0, l1, l2, l3, l4 = params.lam
    amps[0b000] = l0
    amps[0b100] = l1 * np.exp(1j * params.phi)
    amps[0b110] = l2
    amps[0b101] = l3
    amps[0b111] = l4
    return PureState(reg, amps)


def make_w_state() -> PureState:
    """(1/2)(|100> + |010>) + (sqrt(2)/2)|001> on register (A, B1, B2)."""
    reg = register("A", "B1", "B2")
    amps = np.zeros(8, dtype=np.complex128)
    amps[0b100] = 0.5
    amps[0b010] = 0.5
    amps[0b001] = np.sqrt(2.0) / 2.0
    return PureState(reg, amps)


def make_ghz_state(n_qubits: int = 3) -> PureState:
    """(|0...0> + |1...1>)/sqrt(2) on labels A, B1, ..., B_{n-1}."""
    if n_qubits < 2:
        raise ValueError("GHZ needs at least two qubits")
    labels = ("A",) + tuple(f"B{i}" for i in range(1, n_qubits))
    reg = QubitRegister(labels)
    amps = np.zeros(reg.dim, dtype=np.complex128)
    amps[0] = amps[-1] = 1.0 / np.sqrt(2.0)
    return PureState(reg, amps)


def dump_state_csv(psi: PureState, path) -> None:
    """Debug dump: one row per basis index under the ordering contract."""
    with open(path, "w", newline="") as fh:
        fh.write("basis_index,bitstring,re,im\n")
        for i, amp in enumerate(psi.amplitudes):
            fh.write(f"{i},{psi.register.bitstring(i)},"
                     f"{format(amp.real, '.17g')},{format(amp.imag, '.17g')}\n")
