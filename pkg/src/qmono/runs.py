"""Command implementations: worked examples, sweeps, fuzz, and oracle runs.

Output contract: CSV files carry a single '#'-prefixed schema comment, a
header row, and '\n' line endings; floats are rendered with 17 significant
digits, '.' decimal separator.  Every command writes a manifest recording its
parameters, seed, tool version, and sha256 digests of its outputs; identical
manifests (timestamp aside) imply byte-identical CSV.
"""

from __future__ import annotations

import concurrent.futures
import datetime
import hashlib
import json
import math
import os
from pathlib import Path

import numpy as np

from . import __version__, campaigns
from .bounds import (BoundParams, bound_coeff, max_admissible_k,
                     monogamy_bound_tripartite, polygamy_bound_tripartite)
from .measures import (MeasureKind, concurrence_of_assistance,
                       concurrence_two_qubit_mixed, pure_cut_value,
                       screnoa_two_qubit, two_qubit_mixed_value)
from .roof import RoofConfig, optimize_roof
from .states import (Bipartition, GsdParams, PureState, haar_random_pure,
                     make_ghz_state, make_gsd_state, make_w_state,
                     reduced_density, register, to_density)

SCHEMA_VERSION = 1


def fmt(x) -> str:
    return format(float(x), ".17g")


def grid(start: float, stop: float, step: float) -> np.ndarray:
    """Inclusive uniform grid with exact endpoints."""
    if step <= 0:
        raise ValueError(f"grid step must be positive, got {step}")
    if stop < start:
        raise ValueError(f"grid stop {stop} is below start {start}")
    n = int(round((stop - start) / step)) + 1
    if abs(start + (n - 1) * step - stop) > 1e-9:
        raise ValueError(f"step {step} does not divide [{start}, {stop}]")
    return np.linspace(start, stop, n)


def parse_range(text: str) -> tuple[float, float, float]:
    parts = text.split(":")
    if len(parts) != 3:
        raise ValueError(f"range must look like START:STOP:STEP, got {text!r}")
    return tuple(float(p) for p in parts)  # type: ignore[return-value]


def write_csv(path: Path, comment: str, header: list[str], rows) -> None:
    with open(path, "w", newline="") as fh:
        fh.write(f"# {comment}\n")
        fh.write(",".join(header) + "\n")
        for row in rows:
            fh.write(",".join(row) + "\n")


def write_json(path: Path, payload: dict) -> None:
    payload = {"schema": SCHEMA_VERSION, **payload}
    with open(path, "w", newline="") as fh:
        json.dump(payload, fh, indent=2, sort_keys=True)
        fh.write("\n")


def sha256_file(path: Path) -> str:
    return hashlib.sha256(Path(path).read_bytes()).hexdigest()


def write_manifest(path: Path, command: str, parameters: dict,
                   seed: int | None, outputs: list[Path]) -> dict:
    manifest = {
        "schema": SCHEMA_VERSION,
        "command": command,
        "parameters": parameters,
        "seed": seed,
        "version": __version__,
        "timestamp": datetime.datetime.now(datetime.timezone.utc).isoformat(),
        "outputs": {Path(p).name: sha256_file(p) for p in outputs},
    }
    with open(path, "w", newline="") as fh:
        json.dump(manifest, fh, indent=2, sort_keys=True)
        fh.write("\n")
    return manifest


def worker_count() -> int:
    env = os.environ.get("QMONO_THREADS")
    if env:
        return max(1, int(env))
    return min(os.cpu_count() or 1, 8)


# --- state specs -----------------------------------------------------------

def parse_state_spec(spec: str) -> tuple[PureState, tuple[str, ...] | None]:
    """Parse 'gsd:l0,..,l4[,phi]', 'w', 'ghz', 'random:SEED', with an
    optional '@L1,L2' suffix naming a reduction to keep."""
    keep: tuple[str, ...] | None = None
    if "@" in spec:
        spec, keep_txt = spec.split("@", 1)
        keep = tuple(s.strip() for s in keep_txt.split(",") if s.strip())
        if not keep:
            raise ValueError("empty reduction suffix after '@'")
    if spec == "w":
        state = make_w_state()
    elif spec == "ghz":
        state = make_ghz_state(3)
    elif spec.startswith("gsd:"):
        vals = [float(v) for v in spec[4:].split(",")]
        if len(vals) == 5:
            state = make_gsd_state(GsdParams(tuple(vals)))
        elif len(vals) == 6:
            state = make_gsd_state(GsdParams(tuple(vals[:5]), vals[5]))
        else:
            raise ValueError("gsd spec needs 5 amplitudes plus optional phase")
    elif spec.startswith("random:"):
        seed = int(spec.split(":", 1)[1])
        state = haar_random_pure(register("A", "B", "C"), seed=seed)
    else:
        raise ValueError(f"unknown state spec {spec!r}; expected "
                         "gsd:..., w, ghz, or random:SEED")
    return state, keep


_MODE_BY_KIND = {
    MeasureKind.CONCURRENCE: "monogamy",
    MeasureKind.NEGATIVITY: "monogamy",
    MeasureKind.SCREN: "monogamy",
    MeasureKind.ENTANGLEMENT_OF_FORMATION: "monogamy",
    MeasureKind.CONCURRENCE_OF_ASSISTANCE: "polygamy",
    MeasureKind.SCRENOA: "polygamy",
}


# --- example commands ------------------------------------------------------

def example1_state() -> PureState:
    s6 = math.sqrt(6.0) / 6.0
    return make_gsd_state(GsdParams((0.5, s6, s6, 0.5, s6), 0.0))


def cmd_example1(out_dir, plot: bool = True) -> dict:
    """Concurrence worked example: values.json, fig1.csv, fig2.csv."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    state = example1_state()
    cut = Bipartition.split(state.register, ("A",))
    c_joint = pure_cut_value(MeasureKind.CONCURRENCE, state, cut)
    c_ab = concurrence_two_qubit_mixed(reduced_density(state, ("A", "B"))).value
    c_ac = concurrence_two_qubit_mixed(reduced_density(state, ("A", "C"))).value
    k = math.sqrt(6.0) / 2.0

    alphas = grid(0.0, 2.0, 0.02)
    gammas = grid(2.0, 5.0, 0.05)
    rows1, rows2 = [], []
    surfaces = {"lhs": [], "new": [], "prior": [], "z": []}
    for a in alphas:
        for g in gammas:
            rep = monogamy_bound_tripartite(
                c_ab, c_ac, BoundParams.monogamy(a, g, k), q_joint=c_joint)
            rows1.append((fmt(a), fmt(g), fmt(rep.lhs), fmt(rep.bound_new),
                          fmt(rep.bound_prior), str(int(rep.condition_holds))))
            x = a / g
            z = (bound_coeff(k, x) - (2.0 ** x - 1.0)) * c_ac ** a
            rows2.append((fmt(a), fmt(g), fmt(z)))
            surfaces["lhs"].append(rep.lhs)
            surfaces["new"].append(rep.bound_new)
            surfaces["prior"].append(rep.bound_prior)
            surfaces["z"].append(z)

    fig1 = out / "fig1.csv"
    fig2 = out / "fig2.csv"
    values = out / "values.json"
    write_csv(fig1, "joint-cut concurrence power vs tripartite bounds; "
                    "grid alpha (outer) x gamma (inner), k fixed",
              ["alpha", "gamma", "lhs", "bound_new", "bound_zhu",
               "condition_holds"], rows1)
    write_csv(fig2, "bound improvement z = (coeff - (2^(alpha/gamma)-1)) "
                    "* C_AC^alpha; grid alpha (outer) x gamma (inner)",
              ["alpha", "gamma", "z"], rows2)
    write_json(values, {"C_A_BC": c_joint, "C_AB": c_ab, "C_AC": c_ac, "k": k})
    outputs = [values, fig1, fig2]

    if plot:
        from . import plotting
        shape = (len(alphas), len(gammas))
        outputs.append(plotting.render_example1_bounds(
            alphas, gammas,
            np.reshape(surfaces["lhs"], shape),
            np.reshape(surfaces["new"], shape),
            np.reshape(surfaces["prior"], shape),
            out / "fig1.png"))
        outputs.append(plotting.render_example1_gap(
            alphas, gammas, np.reshape(surfaces["z"], shape),
            out / "fig2.png"))

    write_manifest(out / "manifest.json", "example1",
                   {"k": k, "alpha_grid": [0.0, 2.0, 0.02],
                    "gamma_grid": [2.0, 5.0, 0.05], "plot": plot},
                   None, outputs)
    return {"C_A_BC": c_joint, "C_AB": c_ab, "C_AC": c_ac, "k": k,
            "outputs": [str(p) for p in outputs]}


def cmd_example3(out_dir, plot: bool = True, seed: int = 7,
                 cfg: RoofConfig | None = None) -> dict:
    """Assisted-negativity worked example: values.json, fig3.csv."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    cfg = cfg or RoofConfig()
    w = make_w_state()
    cut = Bipartition.split(w.register, ("A",))
    na_joint = pure_cut_value(MeasureKind.SCRENOA, w, cut)
    rho_b1 = reduced_density(w, ("A", "B1"))
    rho_b2 = reduced_density(w, ("A", "B2"))
    na_b1 = screnoa_two_qubit(rho_b1).value
    na_b2 = screnoa_two_qubit(rho_b2).value

    def oracle(rho):
        res = optimize_roof(rho, MeasureKind.SCRENOA, "max",
                            Bipartition.split(rho.register, ("A",)),
                            cfg=cfg, seed=seed)
        return res.value, res.spread

    o_joint = optimize_roof(to_density(w), MeasureKind.SCRENOA, "max", cut,
                            cfg=cfg, seed=seed)
    o_b1, s_b1 = oracle(rho_b1)
    o_b2, s_b2 = oracle(rho_b2)

    betas = grid(1.0, 4.0, 0.05)
    deltas = grid(0.02, 1.0, 0.02)
    rows = []
    lhs_surface, bound_surface = [], []
    for b in betas:
        for d in deltas:
            small, large = sorted((na_b1, na_b2))
            k = max_admissible_k(small, large, d)
            rep = polygamy_bound_tripartite(
                na_b1, na_b2, BoundParams.polygamy(b, d, k), q_joint=na_joint)
            rows.append((fmt(b), fmt(d), fmt(rep.lhs), fmt(rep.bound_new),
                         str(int(rep.condition_holds))))
            lhs_surface.append(rep.lhs)
            bound_surface.append(rep.bound_new)

    fig3 = out / "fig3.csv"
    values = out / "values.json"
    write_csv(fig3, "assisted squared negativity power vs tripartite upper "
                    "bound; grid beta (outer) x delta (inner), k auto-max",
              ["beta", "delta", "lhs", "bound_new", "condition_holds"], rows)
    write_json(values, {
        "Na_A_B1B2": {"closed": na_joint, "oracle": o_joint.value,
                      "spread": o_joint.spread},
        "Na_AB1": {"closed": na_b1, "oracle": o_b1, "spread": s_b1},
        "Na_AB2": {"closed": na_b2, "oracle": o_b2, "spread": s_b2},
        "k_at_delta_1": max_admissible_k(min(na_b1, na_b2),
                                         max(na_b1, na_b2), 1.0),
    })
    outputs = [values, fig3]
    if plot:
        from . import plotting
        shape = (len(betas), len(deltas))
        outputs.append(plotting.render_example3(
            betas, deltas, np.reshape(lhs_surface, shape),
            np.reshape(bound_surface, shape), out / "fig3.png"))
    write_manifest(out / "manifest.json", "example3",
                   {"beta_grid": [1.0, 4.0, 0.05],
                    "delta_grid": [0.02, 1.0, 0.02],
                    "restarts": cfg.restarts, "plot": plot}, seed, outputs)
    return {"Na_A_B1B2": na_joint, "Na_AB1": na_b1, "Na_AB2": na_b2,
            "oracle": {"Na_A_B1B2": o_joint.value, "Na_AB1": o_b1,
                       "Na_AB2": o_b2},
            "outputs": [str(p) for p in outputs]}


# --- sweep -----------------------------------------------------------------

def cmd_sweep(state_spec: str, measure: str, x1: tuple[float, float, float],
              x2: tuple[float, float, float], k_policy: str, out_file,
              plot: bool = False) -> dict:
    """Bound surface over (x1, x2) for an arbitrary catalog state.

    x1 is the outer exponent (alpha or beta), x2 the base power (gamma or
    delta); the mode follows the measure (assisted kinds sweep polygamy).
    """
    kind = MeasureKind(measure)
    mode = _MODE_BY_KIND[kind]
    state, keep = parse_state_spec(state_spec)
    if keep is not None:
        raise ValueError("sweep expects a full tripartite state, not a "
                         "reduction suffix")
    labels = state.register.labels
    if len(labels) != 3:
        raise ValueError("sweep supports three-qubit states")
    cut = Bipartition.split(state.register, labels[:1])
    q_joint = pure_cut_value(kind, state, cut)
    q_b = two_qubit_mixed_value(kind, reduced_density(state, (labels[0], labels[1])))
    q_c = two_qubit_mixed_value(kind, reduced_density(state, (labels[0], labels[2])))

    if k_policy not in ("auto", "unit"):
        float(k_policy)  # validates

    x1_grid = grid(*x1)
    x2_grid = grid(*x2)
    rows = []
    lhs_surface, bound_surface = [], []
    op = monogamy_bound_tripartite if mode == "monogamy" \
        else polygamy_bound_tripartite
    for a in x1_grid:
        for g in x2_grid:
            k = campaigns._resolve_k(k_policy, q_b, q_c, g)
            if mode == "monogamy":
                params = BoundParams.monogamy(a, g, k)
            else:
                params = BoundParams.polygamy(a, g, k)
            rep = op(q_b, q_c, params, q_joint=q_joint)
            rows.append((fmt(a), fmt(g), fmt(k), fmt(rep.lhs),
                         fmt(rep.bound_new), fmt(rep.bound_prior),
                         fmt(rep.margin), str(int(rep.condition_holds)),
                         rep.branch.value))
            lhs_surface.append(rep.lhs)
            bound_surface.append(rep.bound_new)

    out_path = Path(out_file)
    if out_path.parent and not out_path.parent.exists():
        out_path.parent.mkdir(parents=True, exist_ok=True)
    write_csv(out_path,
              f"{mode} bound sweep for {kind.value} on state {state_spec}; "
              "grid x1 (outer) x x2 (inner)",
              ["x1", "x2", "k", "lhs", "bound_new", "bound_prior", "margin",
               "condition_holds", "branch"], rows)
    outputs = [out_path]
    if plot:
        from . import plotting
        shape = (len(x1_grid), len(x2_grid))
        png = out_path.with_suffix(".png")
        outputs.append(plotting.render_sweep(
            x1_grid, x2_grid, np.reshape(lhs_surface, shape),
            np.reshape(bound_surface, shape), mode, kind.value, png))
    write_manifest(out_path.with_name(out_path.name + ".manifest.json"),
                   "sweep", {"state": state_spec, "measure": kind.value,
                             "x1": list(x1), "x2": list(x2),
                             "k_policy": k_policy, "plot": plot},
                   None, outputs)
    return {"rows": len(rows), "outputs": [str(p) for p in outputs],
            "q_joint": q_joint, "q_b": q_b, "q_c": q_c}


# --- fuzz ------------------------------------------------------------------

def _fuzz_shard(args):
    kind, mode, n, seed, params, k_policy, lo, hi = args
    return campaigns.tripartite_fuzz(kind, mode, n, seed, params,
                                     k_policy=k_policy, block_range=(lo, hi))


def cmd_fuzz(measure: str, mode: str, n: int, qubits: int, seed: int,
             out_file, alpha: float | None = None, gamma: float | None = None,
             beta: float | None = None, delta: float | None = None,
             k: str = "1", split_index: int = 1) -> tuple[dict, int]:
    """Randomized bound checking; returns (report, exit_code).

    exit code 0 means no violations, 1 means a violation was found (and its
    witness state is embedded in the report).
    """
    if mode not in ("monogamy", "polygamy", "lemma"):
        raise ValueError("mode must be monogamy, polygamy, or lemma")
    if not 3 <= qubits <= 8:
        raise ValueError("qubits must lie in [3, 8]")
    if n < 1:
        raise ValueError("n must be positive")

    params = None
    kind = None
    if mode == "lemma":
        outcome = campaigns.lemma_fuzz()
    else:
        kind = MeasureKind(measure)
        if mode == "monogamy":
            if kind not in campaigns.MONOGAMY_KINDS:
                raise ValueError(f"{kind.value} is not a monogamy measure")
            params = BoundParams.monogamy(
                2.0 if alpha is None else alpha,
                2.0 if gamma is None else gamma,
                1.0 if k in ("auto",) else float(k) if k != "1" else 1.0)
        else:
            if kind not in campaigns.POLYGAMY_KINDS:
                raise ValueError(f"{kind.value} is not a polygamy measure")
            params = BoundParams.polygamy(
                1.0 if beta is None else beta,
                1.0 if delta is None else delta,
                1.0 if k in ("auto",) else float(k) if k != "1" else 1.0)
        k_policy = k if k in ("auto", "unit") else ("unit" if k == "1" else k)
        if qubits > 3 and k_policy in ("auto",):
            raise ValueError("chain campaigns need a fixed k (auto applies "
                             "per-state to tripartite runs only)")
        if qubits == 3:
            workers = worker_count()
            n_blocks = (n + campaigns.BLOCK - 1) // campaigns.BLOCK
            if workers > 1 and n_blocks > 1:
                per = (n_blocks + workers - 1) // workers
                shards = [(kind, mode, n, seed, params, k_policy,
                           lo, min(lo + per, n_blocks))
                          for lo in range(0, n_blocks, per)]
                outcome = campaigns.FuzzOutcome()
                with concurrent.futures.ProcessPoolExecutor(workers) as pool:
                    for part in pool.map(_fuzz_shard, shards):
                        outcome.merge(part)
            else:
                outcome = campaigns.tripartite_fuzz(kind, mode, n, seed,
                                                    params, k_policy=k_policy)
        else:
            outcome = campaigns.chain_fuzz(kind, mode, qubits, seed, params,
                                           split_index=split_index,
                                           n_states=n)

    report = {
        "command": "fuzz",
        "measure": None if kind is None else kind.value,
        "mode": mode,
        "qubits": qubits,
        "n": n,
        "seed": seed,
        "parameters": None if params is None else {
            "alpha": params.alpha, "gamma": params.gamma,
            "beta": params.beta, "delta": params.delta, "k": k},
        "counts": {"checked": outcome.checked,
                   "condition_held": outcome.condition_held,
                   "violations": outcome.violations},
        "worst_margin": None if math.isinf(outcome.worst_margin)
        else outcome.worst_margin,
        "witness": outcome.witness,
        "version": __version__,
    }
    out_path = Path(out_file)
    write_json(out_path, report)
    return report, (0 if outcome.violations == 0 else 1)


# --- oracle ----------------------------------------------------------------

_CLOSED_FORM = {
    (MeasureKind.CONCURRENCE, "min"):
        lambda rho: concurrence_two_qubit_mixed(rho).value,
    (MeasureKind.CONCURRENCE, "max"):
        lambda rho: concurrence_of_assistance(rho).value,
    (MeasureKind.CONCURRENCE_OF_ASSISTANCE, "max"):
        lambda rho: concurrence_of_assistance(rho).value,
    (MeasureKind.NEGATIVITY, "min"):
        lambda rho: concurrence_two_qubit_mixed(rho).value,
    (MeasureKind.NEGATIVITY, "max"):
        lambda rho: concurrence_of_assistance(rho).value,
    (MeasureKind.SCREN, "min"):
        lambda rho: concurrence_two_qubit_mixed(rho).value ** 2,
    (MeasureKind.SCRENOA, "max"):
        lambda rho: screnoa_two_qubit(rho).value,
    (MeasureKind.ENTANGLEMENT_OF_FORMATION, "min"):
        lambda rho: two_qubit_mixed_value(
            MeasureKind.ENTANGLEMENT_OF_FORMATION, rho),
}

ORACLE_AGREEMENT_TOL = 5e-3


def cmd_oracle(state_spec: str, measure: str, direction: str,
               out_file, restarts: int | None = None, seed: int = 0,
               check_ensemble_size: bool = True) -> dict:
    """Roof-optimized value of a two-qubit reduction vs its closed form."""
    kind = MeasureKind(measure)
    if direction not in ("min", "max"):
        raise ValueError("direction must be min or max")
    state, keep = parse_state_spec(state_spec)
    if keep is None:
        if state.register.count != 2:
            raise ValueError("oracle needs a two-qubit reduction; add an "
                             "'@L1,L2' suffix to the state spec")
        rho = to_density(state)
    else:
        if len(keep) != 2:
            raise ValueError("oracle reductions must keep exactly two qubits")
        rho = reduced_density(state, keep)
    cut = Bipartition.split(rho.register, rho.register.labels[:1])
    cfg = RoofConfig() if restarts is None else RoofConfig(restarts=restarts)
    res = optimize_roof(rho, kind, direction, cut, cfg=cfg, seed=seed)

    closed_fn = _CLOSED_FORM.get((kind, direction))
    closed = None if closed_fn is None else closed_fn(rho)
    agreement = None if closed is None \
        else bool(abs(res.value - closed) <= ORACLE_AGREEMENT_TOL)

    m_flag = None
    if check_ensemble_size:
        bigger = RoofConfig(ensemble_size=res.ensemble_size + 2,
                            restarts=min(cfg.restarts, 6),
                            max_iters=cfg.max_iters, tol=cfg.tol)
        res2 = optimize_roof(rho, kind, direction, cut, cfg=bigger, seed=seed)
        gain = (res.value - res2.value) if direction == "min" \
            else (res2.value - res.value)
        m_flag = bool(gain > cfg.tol)

    report = {
        "command": "oracle",
        "state": state_spec,
        "measure": kind.value,
        "direction": direction,
        "closed_form": closed,
        "oracle": res.value,
        "oracle_average": res.average,
        "spread": res.spread,
        "restart_values": list(res.restart_values),
        "ensemble_size": res.ensemble_size,
        "larger_ensemble_improves": m_flag,
        "agreement_tol": ORACLE_AGREEMENT_TOL,
        "agreement": agreement,
        "seed": seed,
        "version": __version__,
    }
    write_json(Path(out_file), report)
    return report
