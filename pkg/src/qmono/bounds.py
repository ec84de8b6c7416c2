"""Monogamy and polygamy power-bound machinery.

The scalar backbone is the pair of two-term binomial power bounds

    (1 + t)^x >= 1 + c(k, x) * t^x   for 0 <= x <= 1, t >= k >= 1
    (1 + t)^x <= 1 + c(k, x) * t^x   for x >= 1,      t >= k >= 1

with the amplification coefficient c(k, x) = ((1+k)^x - 1) / k^x.  Applied to
powered correlation values they yield lower (monogamy) and upper (polygamy)
bounds on a joint-cut correlation in terms of its pairwise reductions, with a
branch condition selecting which pair carries the amplified coefficient.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum
from typing import NamedTuple, Sequence

from . import measures
from .measures import MeasureKind
from .roof import RoofConfig, optimize_roof
from .states import Bipartition, PureState, reduced_density

LEMMA_SLACK = 1e-12
CONDITION_SLACK = 1e-10
GUARANTEE_SLACK = 1e-9


class Branch(str, Enum):
    AC_DOMINANT = "ac-dominant"
    AB_DOMINANT = "ab-dominant"
    DEGENERATE_ZERO = "degenerate-zero"
    NONE = "none"
    CHAIN = "chain"


@dataclass(frozen=True)
class BoundParams:
    """Exponents and weight for the bound family.

    Monogamy uses (alpha, gamma, k) with 0 <= alpha <= gamma, gamma >= 2;
    polygamy uses (beta, delta, k) with beta >= delta, 0 <= delta <= 1.
    k >= 1 always (math.inf is the degenerate-branch sentinel).
    """

    alpha: float | None = None
    gamma: float | None = None
    beta: float | None = None
    delta: float | None = None
    k: float = 1.0

    @classmethod
    def monogamy(cls, alpha: float, gamma: float = 2.0, k: float = 1.0):
        return cls(alpha=float(alpha), gamma=float(gamma), k=float(k))

    @classmethod
    def polygamy(cls, beta: float, delta: float = 1.0, k: float = 1.0):
        return cls(beta=float(beta), delta=float(delta), k=float(k))

    def require_monogamy(self) -> tuple[float, float, float]:
        if self.alpha is None or self.gamma is None:
            raise ValueError("monogamy bounds need alpha and gamma")
        if not 0.0 <= self.alpha <= self.gamma:
            raise ValueError(f"need 0 <= alpha <= gamma, got alpha={self.alpha}, "
                             f"gamma={self.gamma}")
        if self.gamma < 2.0:
            raise ValueError(f"gamma must be >= 2, got {self.gamma}")
        if not self.k >= 1.0:
            raise ValueError(f"k must be >= 1, got {self.k}")
        return self.alpha, self.gamma, self.k

    def require_polygamy(self) -> tuple[float, float, float]:
        if self.beta is None or self.delta is None:
            raise ValueError("polygamy bounds need beta and delta")
        if not self.k >= 1.0:
            raise ValueError(f"k must be >= 1, got {self.k}")
        if self.beta == 0.0 and self.delta == 0.0:
            return 0.0, 0.0, self.k
        if not 0.0 < self.delta <= 1.0:
            raise ValueError(f"delta must lie in (0, 1] (or beta=delta=0), "
                             f"got {self.delta}")
        if self.beta < self.delta:
            raise ValueError(f"need beta >= delta, got beta={self.beta}, "
                             f"delta={self.delta}")
        return self.beta, self.delta, self.k


@dataclass(frozen=True)
class ChainSpec:
    """Ordered chain partners B_1..B_{N-1} and the split index m.

    Conditions i = 1..m compare k * Q^pow(A,B_i) against the residual cut
    Q^pow(A | B_{i+1}..B_{N-1}); conditions j = m+1..N-2 compare Q^pow(A,B_j)
    against k times its residual.
    """

    partners: tuple[str, ...]
    split_index: int = 1

    def __post_init__(self):
        object.__setattr__(self, "partners", tuple(self.partners))
        n = len(self.partners) + 1
        if n < 4:
            raise ValueError("chains need at least three partners; use the "
                             "tripartite bound for two")
        if not 1 <= self.split_index <= n - 3:
            raise ValueError(f"split index must lie in [1, {n - 3}], "
                             f"got {self.split_index}")


@dataclass(frozen=True)
class BoundReport:
    """Outcome of one bound evaluation.

    margin is lhs - bound_new for monogamy and bound_new - lhs for polygamy;
    it is NaN when no joint-cut value was supplied.  bound_prior is NaN where
    the comparator's own exponent domain does not apply.
    """

    lhs: float
    branch: Branch
    coefficient_l: float
    bound_new: float
    bound_prior: float
    margin: float
    condition_holds: bool
    mode: str
    condition_slacks: tuple[float, ...] = ()
    alt_bound: float | None = None
    raw_values: dict = field(default_factory=dict)


class LemmaCheck(NamedTuple):
    lhs: float
    rhs: float
    holds: bool


def bound_coeff(k: float, x: float) -> float:
    """Amplification coefficient ((1+k)^x - 1) / k^x.

    Equals 2^x - 1 at k = 1 and tends to 1 (for x > 0) as k -> inf, which is
    the degenerate-branch sentinel value.
    """
    k = float(k)
    x = float(x)
    if not k >= 1.0:
        raise ValueError(f"k must be >= 1, got {k}")
    if x < 0.0:
        raise ValueError(f"x must be >= 0, got {x}")
    if x == 0.0:
        return 0.0
    if math.isinf(k):
        return 1.0
    return ((1.0 + k) ** x - 1.0) / k ** x


def check_power_lower_bound(x: float, t: float, k: float = 1.0) -> LemmaCheck:
    """(1+t)^x >= 1 + c(k,x) t^x for 0 <= x <= 1 and t >= k.

    The 1e-12 slack scales with the magnitude of the sides once they exceed
    1, since an absolute slack below one ulp is unresolvable.
    """
    if not 0.0 <= x <= 1.0:
        raise ValueError(f"x must lie in [0, 1], got {x}")
    if not k >= 1.0:
        raise ValueError(f"k must be >= 1, got {k}")
    if t < k:
        raise ValueError(f"t must be >= k, got t={t}, k={k}")
    lhs = (1.0 + t) ** x
    rhs = 1.0 + bound_coeff(k, x) * t ** x
    slack = LEMMA_SLACK * max(1.0, abs(lhs), abs(rhs))
    return LemmaCheck(lhs, rhs, lhs >= rhs - slack)


def check_power_upper_bound(x: float, t: float, k: float = 1.0) -> LemmaCheck:
    """(1+t)^x <= 1 + c(k,x) t^x for x >= 1 and t >= k.

    Slack handling as in `check_power_lower_bound`.
    """
    if x < 1.0:
        raise ValueError(f"x must be >= 1, got {x}")
    if not k >= 1.0:
        raise ValueError(f"k must be >= 1, got {k}")
    if t < k:
        raise ValueError(f"t must be >= k, got t={t}, k={k}")
    lhs = (1.0 + t) ** x
    rhs = 1.0 + bound_coeff(k, x) * t ** x
    slack = LEMMA_SLACK * max(1.0, abs(lhs), abs(rhs))
    return LemmaCheck(lhs, rhs, lhs <= rhs + slack)


def max_admissible_k(q_small: float, q_large: float, power: float) -> float:
    """Largest k with q_large^power >= k * q_small^power.

    Returns +inf when only q_small vanishes, NaN when both vanish
    (degenerate), and a value below 1 when the pair is ordered the wrong way
    round (inadmissible; callers should check).
    """
    if q_small < 0 or q_large < 0:
        raise ValueError("correlation values must be non-negative")
    if power <= 0:
        raise ValueError(f"power must be positive, got {power}")
    if q_small == 0.0 and q_large == 0.0:
        return math.nan
    if q_small == 0.0:
        return math.inf
    return (q_large / q_small) ** power


def prior_bound_tripartite(q_ab: float, q_ac: float, alpha: float,
                           gamma: float) -> float:
    """Fixed-coefficient comparator q_ab^a + (2^(a/g) - 1) q_ac^a."""
    if not 0.0 <= alpha <= gamma or gamma < 2.0:
        raise ValueError(f"need 0 <= alpha <= gamma and gamma >= 2, got "
                         f"alpha={alpha}, gamma={gamma}")
    x = alpha / gamma
    return q_ab ** alpha + (2.0 ** x - 1.0) * q_ac ** alpha


def prior_bound_chain(values: Sequence[float], alpha: float) -> float:
    """Geometric-coefficient comparator sum_j (2^(a/2) - 1)^(j-1) q_j^a.

    Only defined for alpha >= 2.
    """
    if alpha < 2.0:
        raise ValueError(f"the chain comparator needs alpha >= 2, got {alpha}")
    coeff = 2.0 ** (alpha / 2.0) - 1.0
    return float(sum(coeff ** j * float(q) ** alpha
                     for j, q in enumerate(values)))


def prior_polygamy_bound(values: Sequence[float], beta: float) -> float:
    """Assisted-measure comparator sum_j (2^b - 1)^j q_j^b (valid for b <= 1)."""
    if beta < 0.0:
        raise ValueError(f"beta must be >= 0, got {beta}")
    coeff = 2.0 ** beta - 1.0
    return float(sum(coeff ** (j + 1) * float(q) ** beta
                     for j, q in enumerate(values)))


def _powered(value: float, exponent: float) -> float:
    # 0**0 == 1.0 in float semantics, which is the intended trivial edge
    return float(value) ** float(exponent)


def _tripartite(q_ab: float, q_ac: float, exp_outer: float, base: float,
                k: float, mode: str, q_joint: float | None) -> BoundReport:
    if q_ab < 0 or q_ac < 0:
        raise ValueError("correlation values must be non-negative")
    x = exp_outer / base if base > 0 else 0.0
    lhs = _powered(q_joint, exp_outer) if q_joint is not None else math.nan

    def finish(branch, coeff, kept, amplified, slacks, holds, alt=None):
        bound = _powered(kept, exp_outer) + coeff * _powered(amplified, exp_outer)
        prior = prior_bound_tripartite(kept, amplified, exp_outer, base) \
            if mode == "monogamy" else \
            prior_polygamy_bound((kept, amplified), exp_outer)
        if mode == "polygamy" and exp_outer > 1.0:
            prior = math.nan   # comparator domain ends at exponent 1
        margin = (lhs - bound) if mode == "monogamy" else (bound - lhs)
        return BoundReport(lhs=lhs, branch=branch, coefficient_l=coeff,
                           bound_new=bound, bound_prior=prior, margin=margin,
                           condition_holds=holds, mode=mode,
                           condition_slacks=slacks, alt_bound=alt,
                           raw_values={"q_ab": q_ab, "q_ac": q_ac,
                                       "q_joint": q_joint, "k": k})

    if q_ab == 0.0 or q_ac == 0.0:
        kept, amplified = (q_ab, q_ac) if q_ab <= q_ac else (q_ac, q_ab)
        return finish(Branch.DEGENERATE_ZERO, bound_coeff(math.inf, x),
                      kept, amplified, (), True)

    coeff = bound_coeff(k, x)
    slack_ac = q_ac ** base - k * q_ab ** base   # >= 0: q_ac dominates
    slack_ab = q_ab ** base - k * q_ac ** base
    cond_ac = slack_ac >= -CONDITION_SLACK
    cond_ab = slack_ab >= -CONDITION_SLACK
    slacks = (slack_ac, slack_ab)
    if cond_ac and cond_ab:
        # simultaneous conditions (k = 1 with equal or zero values): amplify
        # the larger side, report the mirror bound too
        if q_ac >= q_ab:
            alt = _powered(q_ac, exp_outer) + coeff * _powered(q_ab, exp_outer)
            return finish(Branch.AC_DOMINANT, coeff, q_ab, q_ac, slacks, True,
                          alt=alt)
        alt = _powered(q_ab, exp_outer) + coeff * _powered(q_ac, exp_outer)
        return finish(Branch.AB_DOMINANT, coeff, q_ac, q_ab, slacks, True,
                      alt=alt)
    if cond_ac:
        return finish(Branch.AC_DOMINANT, coeff, q_ab, q_ac, slacks, True)
    if cond_ab:
        return finish(Branch.AB_DOMINANT, coeff, q_ac, q_ab, slacks, True)
    # no guarantee; still report a deterministic bound (larger side amplified)
    kept, amplified = (q_ab, q_ac) if q_ac >= q_ab else (q_ac, q_ab)
    branch = Branch.NONE
    return finish(branch, coeff, kept, amplified, slacks, False)


def monogamy_bound_tripartite(q_ab: float, q_ac: float, p: BoundParams,
                              q_joint: float | None = None) -> BoundReport:
    """Lower bound on Q^alpha(A|BC) from the two pairwise values.

    Branch ac-dominant fires when q_ac^gamma >= k * q_ab^gamma and bounds by
    q_ab^alpha + c(k, alpha/gamma) * q_ac^alpha; ab-dominant mirrors it.  A
    single vanishing pair value routes to the degenerate branch (coefficient
    1, the k -> inf limit).
    """
    alpha, gamma, k = p.require_monogamy()
    return _tripartite(q_ab, q_ac, alpha, gamma, k, "monogamy", q_joint)


def polygamy_bound_tripartite(q_ab: float, q_ac: float, p: BoundParams,
                              q_joint: float | None = None) -> BoundReport:
    """Upper bound on Q^beta(A|BC); mirror of the monogamy branch logic."""
    beta, delta, k = p.require_polygamy()
    return _tripartite(q_ab, q_ac, beta, delta, k, "polygamy", q_joint)


def _chain(values, residuals, spec: ChainSpec, exp_outer: float, base: float,
           k: float, mode: str, q_joint: float | None) -> BoundReport:
    values = [float(v) for v in values]
    residuals = [float(r) for r in residuals]
    if any(v < 0 for v in values) or any(r < 0 for r in residuals):
        raise ValueError("correlation values must be non-negative")
    n_partners = len(spec.partners)
    if len(values) != n_partners:
        raise ValueError(f"got {len(values)} pair values for "
                         f"{n_partners} partners")
    if len(residuals) != n_partners - 1:
        raise ValueError(f"got {len(residuals)} residual values, expected "
                         f"{n_partners - 1}")
    m = spec.split_index
    x = exp_outer / base if base > 0 else 0.0
    coeff = bound_coeff(k, x)

    slacks = []
    for i in range(1, m + 1):
        slacks.append(residuals[i - 1] ** base - k * values[i - 1] ** base)
    for j in range(m + 1, n_partners):
        slacks.append(values[j - 1] ** base - k * residuals[j - 1] ** base)
    holds = all(s >= -CONDITION_SLACK for s in slacks)

    powers = [i - 1 for i in range(1, m + 1)]            # leading block
    powers += [m + 1] * (n_partners - 1 - m)             # middle block
    powers += [m]                                        # last partner
    bound = float(sum(coeff ** p * _powered(v, exp_outer)
                      for p, v in zip(powers, values)))

    if mode == "monogamy":
        prior = prior_bound_chain(values, exp_outer) if exp_outer >= 2.0 \
            else math.nan
    else:
        prior = prior_polygamy_bound(values, exp_outer) if exp_outer <= 1.0 \
            else math.nan

    lhs = _powered(q_joint, exp_outer) if q_joint is not None else math.nan
    margin = (lhs - bound) if mode == "monogamy" else (bound - lhs)
    return BoundReport(lhs=lhs, branch=Branch.CHAIN, coefficient_l=coeff,
                       bound_new=bound, bound_prior=prior, margin=margin,
                       condition_holds=holds, mode=mode,
                       condition_slacks=tuple(slacks),
                       raw_values={"values": tuple(values),
                                   "residuals": tuple(residuals),
                                   "q_joint": q_joint, "k": k,
                                   "split_index": m})


def monogamy_bound_chain(values: Sequence[float], residuals: Sequence[float],
                         spec: ChainSpec | None, p: BoundParams,
                         q_joint: float | None = None) -> BoundReport:
    """Chain lower bound with coefficient ladder 1, c, ..., c^(m-1) on the
    leading block, c^(m+1) on the middle block, and c^m on the last partner.

    A two-partner call (with no ChainSpec) falls back to the tripartite bound.
    """
    if len(values) == 2 and spec is None:
        return monogamy_bound_tripartite(values[0], values[1], p, q_joint)
    alpha, gamma, k = p.require_monogamy()
    if spec is None:
        raise ValueError("chains with more than two partners need a ChainSpec")
    return _chain(values, residuals, spec, alpha, gamma, k, "monogamy",
                  q_joint)


def polygamy_bound_chain(values: Sequence[float], residuals: Sequence[float],
                         spec: ChainSpec | None, p: BoundParams,
                         q_joint: float | None = None) -> BoundReport:
    """Chain upper bound; mirror of the monogamy chain with (beta, delta)."""
    if len(values) == 2 and spec is None:
        return polygamy_bound_tripartite(values[0], values[1], p, q_joint)
    beta, delta, k = p.require_polygamy()
    if spec is None:
        raise ValueError("chains with more than two partners need a ChainSpec")
    return _chain(values, residuals, spec, beta, delta, k, "polygamy", q_joint)


# --- whole-state verification -------------------------------------------

_CERTIFIED_KINDS = frozenset({MeasureKind.CONCURRENCE, MeasureKind.SCRENOA})

_ROOF_DIRECTION = {
    MeasureKind.CONCURRENCE: "min",
    MeasureKind.CONCURRENCE_OF_ASSISTANCE: "max",
    MeasureKind.NEGATIVITY: "min",
    MeasureKind.SCREN: "min",
    MeasureKind.SCRENOA: "max",
    MeasureKind.ENTANGLEMENT_OF_FORMATION: "min",
}


def _residual_roof(psi: PureState, kind: MeasureKind, labels, cfg, seed):
    rho = reduced_density(psi, labels)
    if kind is MeasureKind.NEGATIVITY:
        cut = Bipartition.split(rho.register, labels[:1])
        return measures.negativity(rho, cut).value
    cut = Bipartition.split(rho.register, labels[:1])
    return optimize_roof(rho, kind, _ROOF_DIRECTION[kind], cut,
                         cfg=cfg, seed=seed).value


def _residual_certified(psi: PureState, kind: MeasureKind, labels,
                        pair_values, start_idx, seed) -> tuple[float, float]:
    """Certified (lower, upper) brackets for a residual-cut roof value.

    Concurrence: the lower bound is the square-root of the summed squared
    pairwise concurrences (base power-2 relation on the reduced state); the
    upper bound is any decomposition average, here a short hill climb.
    SCRENoA: the lower bound is a short-climb candidate decomposition; the
    upper bound is 2*(1 - Tr rho_A^2), which dominates any assisted average.
    """
    rho = reduced_density(psi, labels)
    cut = Bipartition.split(rho.register, labels[:1])
    small = RoofConfig(restarts=2, max_iters=250)
    if kind is MeasureKind.CONCURRENCE:
        lower = math.sqrt(sum(v * v for v in pair_values[start_idx:]))
        upper = optimize_roof(rho, kind, "min", cut, cfg=small,
                              seed=seed).value
        return lower, max(upper, lower)
    if kind is MeasureKind.SCRENOA:
        lower = optimize_roof(rho, kind, "max", cut, cfg=small,
                              seed=seed).value
        rho_a = reduced_density(psi, labels[:1])
        upper = 2.0 * (1.0 - rho_a.purity())
        return min(lower, upper), upper
    raise ValueError(f"certified residual brackets exist only for "
                     f"{sorted(k.value for k in _CERTIFIED_KINDS)}; use "
                     f"residual_strategy='roof' for {kind.value}")


def verify_state(psi: PureState, kind: MeasureKind, p: BoundParams,
                 mode: str, order: Sequence[str] | None = None,
                 split_index: int = 1, residual_strategy: str = "roof",
                 roof_cfg: RoofConfig | None = None,
                 seed: int = 0) -> BoundReport:
    """Evaluate the bound of the given mode on a concrete pure state.

    The first label of ``order`` (default: register order) is the focus A;
    the joint cut A|rest is evaluated with the pure-state measure, each pair
    (A, B_i) with the two-qubit closed form.  States with more than two
    partners go through the chain bound; its residual cuts are mixed
    multi-qubit states evaluated by the roof optimizer
    (residual_strategy='roof') or bracketed by certified one-sided bounds
    (residual_strategy='certified', concurrence and SCRENoA only) so that
    condition decisions are sound despite optimizer error.
    """
    if mode not in ("monogamy", "polygamy"):
        raise ValueError("mode must be 'monogamy' or 'polygamy'")
    kind = MeasureKind(kind)
    labels = tuple(order) if order is not None else psi.register.labels
    if set(labels) != set(psi.register.labels):
        raise ValueError("order must be a permutation of the register labels")
    if len(labels) < 3:
        raise ValueError("verification needs at least three qubits")
    focus, partners = labels[0], labels[1:]

    joint_cut = Bipartition((focus,), partners)
    q_joint = measures.pure_cut_value(kind, psi, joint_cut)
    pair_values = [measures.two_qubit_mixed_value(
        kind, reduced_density(psi, (focus, b))) for b in partners]

    raw = {"kind": kind.value, "order": labels, "q_joint": q_joint,
           "pairs": dict(zip(partners, pair_values))}

    if len(partners) == 2:
        op = monogamy_bound_tripartite if mode == "monogamy" \
            else polygamy_bound_tripartite
        report = op(pair_values[0], pair_values[1], p, q_joint=q_joint)
        report.raw_values.update(raw)
        return report

    base = p.require_monogamy()[1] if mode == "monogamy" \
        else p.require_polygamy()[1]
    k = p.k
    n_partners = len(partners)
    residuals = []
    res_detail = {}
    for i in range(1, n_partners):
        rest = (focus,) + partners[i:]
        if len(rest) == 2:
            val = pair_values[-1]
            residuals.append(val)
            res_detail[partners[i:]] = val
            continue
        if residual_strategy == "roof":
            val = _residual_roof(psi, kind, rest, roof_cfg, seed + i)
            residuals.append(val)
            res_detail[partners[i:]] = val
        elif residual_strategy == "certified":
            lower, upper = _residual_certified(psi, kind, rest, pair_values,
                                               i, seed + i)
            # i-block conditions need residual >= k*value: decide with the
            # lower bracket; j-block conditions need value >= k*residual:
            # decide with the upper bracket
            val = lower if i <= split_index else upper
            residuals.append(val)
            res_detail[partners[i:]] = (lower, upper)
        else:
            raise ValueError("residual_strategy must be 'roof' or 'certified'")
    raw["residuals"] = res_detail
    raw["base_power"] = base
    raw["k"] = k

    spec = ChainSpec(partners, split_index)
    op = monogamy_bound_chain if mode == "monogamy" else polygamy_bound_chain
    report = op(pair_values, residuals, spec, p, q_joint=q_joint)
    report.raw_values.update(raw)
    return report
