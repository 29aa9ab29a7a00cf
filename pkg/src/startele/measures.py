"""Coherence and entanglement quantifiers for three-qubit pure states."""

from __future__ import annotations

import functools
import math
from dataclasses import dataclass, field

import numpy as np

from .tensor import DensityMatrix, DimensionError, PureState, partial_trace, partial_transpose

DEFAULT_STARTS = 32
DEFAULT_SEED = 0x5EED
DEFAULT_RESOLUTION = 128
CONVERGENCE_TOL = 1e-14
MAX_ITERATIONS = 10_000
# eigenvalues below this are treated as round-off when factoring rho = V V^dagger
_RANK_CUTOFF = 1e-14

_YY = np.array([[0, 0, 0, -1], [0, 0, 1, 0], [0, 1, 0, 0], [-1, 0, 0, 0]], dtype=complex)

MARGINALS = {
    "A": (0,), "B": (1,), "C": (2,),
    "AB": (0, 1), "AC": (0, 2), "BC": (1, 2),
}
PAIRS = ("AB", "AC", "BC")


def marginal(state: PureState, name: str) -> DensityMatrix:
    """Reduced state on the parties named by ``name``; "ABC" is the full state."""
    if name == "ABC":
        return state.density()
    return partial_trace(state, MARGINALS[name])


def l1_coherence(rho: DensityMatrix) -> float:
    m = np.abs(rho.entries)
    return float(m.sum() - np.trace(m))


def _factor(rho: DensityMatrix) -> np.ndarray:
    if rho.factor is not None:
        return rho.factor
    w, u = np.linalg.eigh(rho.entries)
    keep = w > _RANK_CUTOFF
    return u[:, keep] * np.sqrt(w[keep])


def concurrence(rho: DensityMatrix) -> float:
    """Wootters concurrence of a two-qubit state.

    The square roots of the eigenvalues of rho * rho_tilde are taken as the
    singular values of V^T (sy x sy) V, where rho = V V^dagger.
    """
    if rho.num_qubits != 2:
        raise DimensionError("concurrence is defined for 2-qubit states")
    v = _factor(rho)
    roots = np.zeros(4)
    s = np.linalg.svd(v.T @ _YY @ v, compute_uv=False)
    roots[: s.size] = np.sort(s)[::-1][:4]
    return float(max(0.0, roots[0] - roots[1] - roots[2] - roots[3]))


def negativity(rho: DensityMatrix) -> float:
    if rho.num_qubits != 2:
        raise DimensionError("negativity is defined for 2-qubit states")
    w = np.linalg.eigvalsh(partial_transpose(rho, 0))
    return float(-w[w < 0].sum()) + 0.0  # no -0.0


@dataclass(frozen=True)
class TangleInternals:
    d1: complex
    d2: complex
    d3: complex
    tau_poly: float
    tau_residual: float
    # residual with C^2_BC in place of C^2_AC, as the formula is printed
    tau_printed_variant: float

    @property
    def value(self) -> float:
        return self.tau_poly


def tangle(state: PureState) -> TangleInternals:
    if state.num_qubits != 3:
        raise DimensionError("tangle needs a 3-qubit state")
    a = state.tensor()
    d1 = (a[0, 0, 0] ** 2 * a[1, 1, 1] ** 2 + a[0, 0, 1] ** 2 * a[1, 1, 0] ** 2
          + a[0, 1, 0] ** 2 * a[1, 0, 1] ** 2 + a[1, 0, 0] ** 2 * a[0, 1, 1] ** 2)
    d2 = (a[0, 0, 0] * a[1, 1, 0] * a[1, 0, 1] * a[0, 1, 1]
          + a[1, 1, 1] * a[0, 0, 1] * a[0, 1, 0] * a[1, 0, 0])
    d3 = (a[0, 0, 0] * a[1, 1, 1] * a[0, 1, 1] * a[1, 0, 0]
          + a[0, 0, 0] * a[1, 1, 1] * a[1, 0, 1] * a[0, 1, 0]
          + a[0, 0, 0] * a[1, 1, 1] * a[1, 1, 0] * a[0, 0, 1]
          + a[0, 1, 1] * a[1, 0, 0] * a[1, 0, 1] * a[0, 1, 0]
          + a[0, 1, 1] * a[1, 0, 0] * a[1, 1, 0] * a[0, 0, 1]
          + a[1, 0, 1] * a[0, 1, 0] * a[1, 1, 0] * a[0, 0, 1])
    tau_poly = 4 * abs(d1 - 2 * d3 + 4 * d2)

    one_vs_rest = 4 * float(np.linalg.det(marginal(state, "A").entries).real)
    c2 = {p: concurrence(marginal(state, p)) ** 2 for p in PAIRS}
    return TangleInternals(
        d1=complex(d1), d2=complex(d2), d3=complex(d3),
        tau_poly=float(tau_poly),
        tau_residual=one_vs_rest - c2["AB"] - c2["AC"],
        tau_printed_variant=one_vs_rest - c2["AB"] - c2["BC"],
    )


@dataclass(frozen=True, eq=False)
class ProductAnsatz:
    factors: tuple[PureState, PureState, PureState]
    overlap: complex
    p: float
    start: int
    iterations: int
    # (sweeps + 1, starts) array of p after each sweep, when requested
    history: np.ndarray | None = field(default=None, repr=False)


def _haar_qubits(rng: np.random.Generator, count: int) -> np.ndarray:
    v = rng.normal(size=(count, 2)) + 1j * rng.normal(size=(count, 2))
    return v / np.linalg.norm(v, axis=1, keepdims=True)


def _site_update(t_site: np.ndarray, x: np.ndarray, y: np.ndarray) -> np.ndarray:
    # contraction of the state with conj(x) (x) conj(y) on the other two sites
    k = (x.conj()[:, :, None] * y.conj()[:, None, :]).reshape(len(x), 4)
    return k @ t_site.T


def p_max_optimize(
    state: PureState,
    starts: int = DEFAULT_STARTS,
    seed: int = DEFAULT_SEED,
    tol: float = CONVERGENCE_TOL,
    max_iter: int = MAX_ITERATIONS,
    record_history: bool = False,
) -> ProductAnsatz:
    """Maximal squared overlap with a product state by alternating updates.

    Each sweep replaces every site in turn by the normalized contraction of
    the state against the other two sites, which is the exact optimum for
    that site, so the overlap never decreases.  ``starts`` Haar-random
    product states are run in lockstep, plus one start at the computational
    ket of largest amplitude (index ``starts``).  A start stops once a sweep
    gains less than ``tol``.
    """
    if state.num_qubits != 3:
        raise DimensionError("p_max_optimize needs a 3-qubit state")
    if starts < 1:
        raise ValueError("starts must be >= 1")
    if record_history:
        return _optimize(state.amplitudes.tobytes(), starts, seed, tol, max_iter, True)
    # the run is deterministic, and near-critical states need ~1e4 sweeps
    return _optimize_cached(state.amplitudes.tobytes(), starts, seed, tol, max_iter)


def _optimize(raw: bytes, starts: int, seed: int, tol: float, max_iter: int, record_history: bool) -> ProductAnsatz:
    state = PureState(np.frombuffer(raw, dtype=complex).copy())
    t = state.tensor()
    sites = [t.reshape(2, 4), t.transpose(1, 0, 2).reshape(2, 4), t.transpose(2, 0, 1).reshape(2, 4)]

    rng = np.random.default_rng(seed)
    e = [_haar_qubits(rng, starts) for _ in range(3)]
    top = int(np.argmax(np.abs(state.amplitudes)))
    for q, bit in enumerate(f"{top:03b}"):
        e[q] = np.vstack([e[q], np.eye(2)[int(bit)]])
    total = starts + 1

    def overlaps():
        return np.einsum("ijk,si,sj,sk->s", t, e[0].conj(), e[1].conj(), e[2].conj())

    p = np.abs(overlaps()) ** 2
    active = np.ones(total, dtype=bool)
    iterations = np.zeros(total, dtype=int)
    history = [p.copy()] if record_history else None

    for _ in range(max_iter):
        if not active.any():
            break
        idx = np.flatnonzero(active)
        e0, e1, e2 = (x[idx] for x in e)
        for site in range(3):
            others = [x for i, x in enumerate((e0, e1, e2)) if i != site]
            v = _site_update(sites[site], *others)
            norm = np.linalg.norm(v, axis=1)
            ok = norm > 1e-150
            v[ok] /= norm[ok, None]
            cur = (e0, e1, e2)[site]
            v[~ok] = cur[~ok]
            if site == 0:
                e0 = v
            elif site == 1:
                e1 = v
            else:
                e2 = v
        e[0][idx], e[1][idx], e[2][idx] = e0, e1, e2
        new_p = norm**2
        gain = new_p - p[idx]
        p[idx] = new_p
        iterations[idx] += 1
        active[idx[gain < tol]] = False
        if record_history:
            history.append(p.copy())

    ov = overlaps()
    p = np.abs(ov) ** 2
    best = int(np.argmax(p))
    factors = tuple(PureState.normalized(e[q][best]) for q in range(3))
    return ProductAnsatz(
        factors=factors,
        overlap=complex(ov[best]),
        p=float(p[best]),
        start=best,
        iterations=int(iterations[best]),
        history=np.array(history) if record_history else None,
    )


@functools.lru_cache(maxsize=256)
def _optimize_cached(raw: bytes, starts: int, seed: int, tol: float, max_iter: int) -> ProductAnsatz:
    return _optimize(raw, starts, seed, tol, max_iter, False)


@dataclass(frozen=True)
class OracleBound:
    value: float
    gap: float
    resolution: int
    theta: float
    phi: float


def p_max_oracle(state: PureState, resolution: int = DEFAULT_RESOLUTION) -> OracleBound:
    """Grid lower bound on P_max, independent of the alternating optimizer.

    The first qubit's Bloch angles are gridded (theta in steps of pi/r with
    both poles, phi in steps of pi/r); for each grid point the best product
    state on the remaining two qubits is the top singular value of the 2x2
    contraction, in closed form.  ``gap`` bounds P_max - value using the
    grid's covering radius pi/r.
    """
    if state.num_qubits != 3:
        raise DimensionError("p_max_oracle needs a 3-qubit state")
    if resolution < 16:
        raise ValueError("resolution must be >= 16")
    t = state.tensor()
    theta = np.pi * np.arange(resolution + 1) / resolution
    phi = np.pi * np.arange(2 * resolution) / resolution
    th, ph = np.meshgrid(theta, phi, indexing="ij")
    c0 = np.cos(th / 2).ravel()
    c1 = (np.exp(-1j * ph) * np.sin(th / 2)).ravel()
    m = c0[:, None, None] * t[0] + c1[:, None, None] * t[1]
    fro = np.sum(np.abs(m) ** 2, axis=(1, 2))
    det = np.abs(m[:, 0, 0] * m[:, 1, 1] - m[:, 0, 1] * m[:, 1, 0]) ** 2
    top = 0.5 * (fro + np.sqrt(np.maximum(fro**2 - 4 * det, 0.0)))
    best = int(np.argmax(top))
    return OracleBound(
        value=float(top[best]),
        gap=math.sin(math.pi / (2 * resolution)) ** 2,
        resolution=resolution,
        theta=float(th.ravel()[best]),
        phi=float(ph.ravel()[best]),
    )


def groverian(p_max: float) -> float:
    if not 0 < p_max <= 1 + 1e-12:
        raise ValueError(f"p_max must lie in (0, 1], got {p_max}")
    return math.sqrt(max(0.0, 1.0 - p_max))


@dataclass
class MeasureReport:
    state_id: str
    coherence: dict[str, float]
    concurrence: dict[str, float]
    negativity: dict[str, float]
    tangle: float
    tau_residual: float
    p_max: float
    p_max_oracle: float
    groverian: float

    def to_dict(self) -> dict:
        d = {
            "state_id": self.state_id,
            "coherence": dict(self.coherence),
            "concurrence": dict(self.concurrence),
            "negativity": dict(self.negativity),
            "tangle": self.tangle,
            "tau_residual": self.tau_residual,
            "p_max": self.p_max,
            "p_max_oracle": self.p_max_oracle,
            "groverian": self.groverian,
        }
        d["rounded"] = _rounded(d)
        return d

    @classmethod
    def from_dict(cls, d: dict) -> "MeasureReport":
        return cls(**{k: v for k, v in d.items() if k != "rounded"})


def _rounded(d: dict) -> dict:
    out = {}
    for k, v in d.items():
        if isinstance(v, dict):
            out[k] = {kk: round(vv, 3) for kk, vv in v.items()}
        elif isinstance(v, float):
            out[k] = round(v, 3)
    return out


def measure_report(
    state_id: str,
    state: PureState,
    starts: int = DEFAULT_STARTS,
    seed: int = DEFAULT_SEED,
    resolution: int = DEFAULT_RESOLUTION,
) -> MeasureReport:
    tau = tangle(state)
    opt = p_max_optimize(state, starts=starts, seed=seed)
    oracle = p_max_oracle(state, resolution)
    return MeasureReport(
        state_id=state_id,
        coherence={m: l1_coherence(marginal(state, m)) for m in (*MARGINALS, "ABC")},
        concurrence={p: concurrence(marginal(state, p)) for p in PAIRS},
        negativity={p: negativity(marginal(state, p)) for p in PAIRS},
        tangle=tau.tau_poly,
        tau_residual=tau.tau_residual,
        p_max=opt.p,
        p_max_oracle=oracle.value,
        groverian=groverian(opt.p),
    )
