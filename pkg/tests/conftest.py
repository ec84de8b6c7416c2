import time

import numpy as np
import pytest

from qmono import campaigns
from qmono.measures import MeasureKind

CAMPAIGN_N = 10_000
CAMPAIGN_SEED = 20240817


@pytest.fixture(scope="session")
def campaign3q():
    """Shared 10^4-state three-qubit measure panel, timed once."""
    t0 = time.perf_counter()
    psis = campaigns.sample_blocks(CAMPAIGN_N, 3, seed=CAMPAIGN_SEED)
    panel = campaigns.three_qubit_panel(
        psis, kinds=(MeasureKind.CONCURRENCE, MeasureKind.SCRENOA))
    elapsed = time.perf_counter() - t0
    c_joint, c_ab, c_ac = panel.triple(MeasureKind.CONCURRENCE)
    na_joint, na_ab, na_ac = panel.triple(MeasureKind.SCRENOA)
    return {
        "psis": psis,
        "c_joint": c_joint, "c_ab": c_ab, "c_ac": c_ac,
        "na_joint": na_joint, "na_ab": na_ab, "na_ac": na_ac,
        "elapsed": elapsed, "n": CAMPAIGN_N, "seed": CAMPAIGN_SEED,
    }


def brute_force_partial_trace(entries: np.ndarray, n_qubits: int,
                              keep_positions: list[int]) -> np.ndarray:
    """Index-loop partial trace, independent of the library's einsum path."""
    drop = [i for i in range(n_qubits) if i not in keep_positions]
    dk = 2 ** len(keep_positions)
    out = np.zeros((dk, dk), dtype=complex)

    def bits(index: int) -> list[int]:
        return [(index >> (n_qubits - 1 - j)) & 1 for j in range(n_qubits)]

    def idx(bit_list: list[int]) -> int:
        v = 0
        for b in bit_list:
            v = (v << 1) | b
        return v

    dim = 2 ** n_qubits
    for i in range(dim):
        bi = bits(i)
        for j in range(dim):
            bj = bits(j)
            if any(bi[p] != bj[p] for p in drop):
                continue
            ki = idx([bi[p] for p in keep_positions])
            kj = idx([bj[p] for p in keep_positions])
            out[ki, kj] += entries[i, j]
    return out


def independent_haar_sample(n_qubits: int, count: int,
                            rng: np.random.Generator) -> np.ndarray:
    """QR-based Haar sampler (different generator and construction than the
    library's normalized-Gaussian path)."""
    d = 2 ** n_qubits
    out = np.empty((count, d), dtype=complex)
    for i in range(count):
        z = rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d))
        q, r = np.linalg.qr(z)
        q = q * (np.diagonal(r) / np.abs(np.diagonal(r)))
        out[i] = q[:, 0]
    return out
