"""Fitting measured spectroscopy ridges with the defect models.

A ridge point is one (n_g, frequency) sample extracted from spectroscopy.
The objective simulates the model at every gate charge present in the data,
assigns each point to a model line (nearest bright line, or the hinted
branch), and sums weighted squared residuals. Shared physics (e_c, defect
asymmetries, couplings, tunneling amplitudes) is fit jointly across
datasets, while each dataset carries its own Josephson energies (e_j and
delta_e_j track the applied flux, which differs between datasets).

Minimization is a bounded Nelder-Mead simplex: deterministic, derivative
free, and robust to the kinks the nearest-line assignment introduces.
``multistart`` restarts it from seeded uniform draws inside the bounds and
reports a per-parameter spread over the near-optimal runs as a flatness
diagnostic.
"""

import math
from dataclasses import dataclass

import numpy as np

from .eigen import MAX_SWEEPS, REL_TOL, SIGN_TOL, ConvergenceError
from .hamiltonian import _build_matrix
from .spectra import _transition_data, spectrum
from ._accel import jit_kernel

__all__ = [
    "RidgePoint",
    "FitProblem",
    "FitResult",
    "objective",
    "fit",
    "multistart",
    "synthetic_ridges",
    "VISIBILITY_FLOOR",
    "PENALTY",
]

VISIBILITY_FLOOR = 0.01
PENALTY = 1.0e4
DEFAULT_TUNNELING_BOUNDS = (0.0, 0.2)


@dataclass(frozen=True)
class RidgePoint:
    """One spectroscopy sample: frequency ``freq`` (GHz) at gate charge n_g.

    ``weight`` scales the point's squared residual. ``branch_hint`` may name
    the 1-based excited-state index the point belongs to; it is honored only
    under the "hinted" assignment policy.
    """

    n_g: float
    freq: float
    weight: float = 1.0
    branch_hint: int = None

    def __post_init__(self):
        if not (math.isfinite(self.n_g) and 0.0 <= self.n_g <= 2.0):
            raise ValueError(f"n_g must lie in [0, 2], got {self.n_g}")
        if not (math.isfinite(self.freq) and self.freq > 0.0):
            raise ValueError(f"freq must be positive, got {self.freq}")
        if not (math.isfinite(self.weight) and self.weight >= 0.0):
            raise ValueError(f"weight must be >= 0, got {self.weight}")
        if self.branch_hint is not None:
            if not isinstance(self.branch_hint, int) or isinstance(
                self.branch_hint, bool
            ) or self.branch_hint < 1:
                raise ValueError(
                    f"branch_hint must be a positive int or None, "
                    f"got {self.branch_hint}"
                )


@dataclass
class FitProblem:
    """Datasets plus model structure and search box.

    Parameters
    ----------
    datasets : list of (str, list of RidgePoint)
        Labeled datasets; labels must be unique and non-empty. At least one
        dataset needs >= 8 points for the shared parameters to be
        determined.
    bounds : dict
        Closed search intervals ``name -> (lo, hi)`` keyed by base
        parameter name: ``e_c``, ``e_j``, ``delta_e_j1``, ``e_r1``,
        ``e_int1``, ``t_lr1`` (plus ``delta_e_j2``/``e_r2``/``e_int2``/
        ``t_lr2``/``t_12`` with two defects). Per-dataset parameters share
        the base-name bounds. Tunneling amplitudes default to (0, 0.2) when
        omitted; everything else is required. ``lo == hi`` freezes a
        parameter.
    n_tls : int
        Number of defects in the model, 1 or 2.
    n_charge_states : int
        Island charge window size, as in CpbParams.
    policy : str
        "nearest" assigns each point to the nearest line whose visibility
        is within a factor ``VISIBILITY_FLOOR`` of the brightest line at
        that gate charge; "hinted" uses each point's branch_hint and falls
        back to nearest-bright where the hint is absent.
    max_states : int, optional
        Excited states simulated per gate charge; defaults to the full
        defect multiplet of the first transition, ``2**(n_tls+1)``.
    """

    datasets: list
    bounds: dict
    n_tls: int = 1
    n_charge_states: int = 4
    policy: str = "nearest"
    max_states: int = None

    def __post_init__(self):
        if self.n_tls not in (1, 2):
            raise ValueError(f"n_tls must be 1 or 2, got {self.n_tls}")
        if not isinstance(self.n_charge_states, int) or not (
            2 <= self.n_charge_states <= 8
        ):
            raise ValueError(
                f"n_charge_states must be between 2 and 8, "
                f"got {self.n_charge_states}"
            )
        if self.policy not in ("nearest", "hinted"):
            raise ValueError(f"policy must be 'nearest' or 'hinted', got {self.policy!r}")
        dim = self.n_charge_states * (1 << self.n_tls)
        if self.max_states is None:
            self.max_states = min(dim - 1, 2 << self.n_tls)
        if not isinstance(self.max_states, int) or not 1 <= self.max_states < dim:
            raise ValueError(
                f"max_states must lie in [1, {dim - 1}], got {self.max_states}"
            )
        if not self.datasets:
            raise ValueError("at least one dataset is required")
        labels = []
        for entry in self.datasets:
            label, points = entry
            if not isinstance(label, str) or not label:
                raise ValueError(f"dataset label must be a non-empty string, got {label!r}")
            if label in labels:
                raise ValueError(f"duplicate dataset label {label!r}")
            labels.append(label)
            if not points:
                raise ValueError(f"dataset {label!r} is empty")
            for p in points:
                if not isinstance(p, RidgePoint):
                    raise ValueError(f"dataset {label!r} holds a non-RidgePoint")
                if p.branch_hint is not None and p.branch_hint > self.max_states:
                    raise ValueError(
                        f"branch_hint {p.branch_hint} exceeds max_states "
                        f"{self.max_states} in dataset {label!r}"
                    )
        if max(len(points) for _, points in self.datasets) < 8:
            raise ValueError("at least one dataset must have 8 or more points")
        self._check_bounds()

    def _base_names(self):
        names = ["e_c"]
        for i in range(1, self.n_tls + 1):
            names += [f"e_r{i}", f"e_int{i}", f"t_lr{i}"]
        if self.n_tls == 2:
            names.append("t_12")
        names.append("e_j")
        for i in range(1, self.n_tls + 1):
            names.append(f"delta_e_j{i}")
        return names

    def _check_bounds(self):
        known = set(self._base_names())
        tunneling = {n for n in known if n.startswith("t_")}
        for name in self.bounds:
            if name not in known:
                raise ValueError(f"unknown bound name {name!r}")
        for name in known - tunneling:
            if name not in self.bounds:
                raise ValueError(f"missing bounds for {name!r}")
        for name in known:
            lo, hi = self.bounds.get(name, DEFAULT_TUNNELING_BOUNDS)
            if not (math.isfinite(lo) and math.isfinite(hi) and lo <= hi):
                raise ValueError(f"bounds for {name!r} must satisfy lo <= hi, got ({lo}, {hi})")

    @property
    def n_shared(self) -> int:
        return 1 + 3 * self.n_tls + (1 if self.n_tls == 2 else 0)

    @property
    def n_per_dataset(self) -> int:
        return 1 + self.n_tls

    @property
    def n_params(self) -> int:
        return self.n_shared + self.n_per_dataset * len(self.datasets)

    def param_names(self) -> list:
        """Full parameter vector layout: shared block, then per-dataset blocks."""
        shared = ["e_c"]
        for i in range(1, self.n_tls + 1):
            shared += [f"e_r{i}", f"e_int{i}", f"t_lr{i}"]
        if self.n_tls == 2:
            shared.append("t_12")
        names = list(shared)
        for label, _ in self.datasets:
            names.append(f"e_j[{label}]")
            for i in range(1, self.n_tls + 1):
                names.append(f"delta_e_j{i}[{label}]")
        return names

    def bounds_arrays(self):
        """(lo, hi) float arrays aligned with :meth:`param_names`."""
        lo = []
        hi = []
        for name in self.param_names():
            base = name.split("[", 1)[0]
            b = self.bounds.get(base, DEFAULT_TUNNELING_BOUNDS)
            lo.append(float(b[0]))
            hi.append(float(b[1]))
        return np.array(lo), np.array(hi)

    def pack(self, values: dict) -> np.ndarray:
        """Assemble a parameter vector from a ``name -> value`` mapping."""
        names = self.param_names()
        missing = [n for n in names if n not in values]
        if missing:
            raise ValueError(f"missing parameters: {', '.join(missing)}")
        extra = [n for n in values if n not in names]
        if extra:
            raise ValueError(f"unknown parameters: {', '.join(sorted(extra))}")
        return np.array([float(values[n]) for n in names])

    def unpack(self, params) -> dict:
        """Inverse of :meth:`pack`."""
        params = np.asarray(params, dtype=np.float64)
        names = self.param_names()
        if params.shape != (len(names),):
            raise ValueError(
                f"expected {len(names)} parameters, got shape {params.shape}"
            )
        return dict(zip(names, (float(x) for x in params)))


@dataclass
class FitResult:
    """Best parameters plus per-point diagnostics.

    ``residuals[d]`` aligns with the points of dataset d (``data - model``,
    NaN where penalized); ``penalized[d]`` marks points with no bright line
    to match. ``parameter_spread`` is filled by :func:`multistart` with the
    per-parameter max - min over all runs whose objective is within a
    factor 2 of the best, a cheap flatness/identifiability diagnostic.
    """

    parameter_names: list
    parameters: np.ndarray
    objective: float
    iterations: int
    converged: bool
    dataset_labels: list
    residuals: list
    penalized: list
    parameter_spread: np.ndarray = None

    def as_dict(self) -> dict:
        return dict(zip(self.parameter_names, (float(x) for x in self.parameters)))


@jit_kernel
def _ridge_eval(m, n_lo, e_c, e_j, tls, t_12, n_tls, max_states,
                uniq_ng, inv, freq, hint, hinted_policy,
                rel_tol, max_sweeps, sign_tol):
    # Residuals for one dataset. Simulates each unique gate charge once,
    # then assigns every point. Returns (converged, off_norm, res, pen);
    # res is NaN where pen is set.
    nu = uniq_ng.shape[0]
    npts = freq.shape[0]
    linef = np.empty((nu, max_states))
    linev = np.empty((nu, max_states))
    for u in range(nu):
        h = _build_matrix(m, n_lo, e_c, e_j, uniq_ng[u], n_tls, tls, t_12)
        ok, off, freqs, vis, cpbf, f1, f2 = _transition_data(
            h, m, n_tls, uniq_ng[u], n_lo, max_states,
            rel_tol, max_sweeps, sign_tol,
        )
        if not ok:
            return False, off, np.zeros(npts), np.zeros(npts, np.bool_)
        for k in range(max_states):
            linef[u, k] = freqs[k]
            linev[u, k] = vis[k]
    res = np.zeros(npts)
    pen = np.zeros(npts, np.bool_)
    for i in range(npts):
        u = inv[i]
        if hinted_policy and hint[i] > 0:
            res[i] = freq[i] - linef[u, hint[i] - 1]
            continue
        vmax = 0.0
        for k in range(max_states):
            if linev[u, k] > vmax:
                vmax = linev[u, k]
        if vmax <= 0.0:
            pen[i] = True
            res[i] = np.nan
            continue
        floor = VISIBILITY_FLOOR * vmax
        best = 0
        bestd = np.inf
        for k in range(max_states):
            if linev[u, k] >= floor:
                d = abs(freq[i] - linef[u, k])
                if d < bestd:
                    bestd = d
                    best = k
        res[i] = freq[i] - linef[u, best]
    return True, 0.0, res, pen


class _Prepared:
    """Per-fit cache of dataset arrays and the parameter layout."""

    def __init__(self, problem: FitProblem):
        self.problem = problem
        self.names = problem.param_names()
        self.lo, self.hi = problem.bounds_arrays()
        self.n_tls = problem.n_tls
        self.m = problem.n_charge_states
        self.n_lo = 1 - (self.m + 1) // 2
        self.max_states = problem.max_states
        self.hinted = problem.policy == "hinted"
        self.n_shared = problem.n_shared
        self.n_per_dataset = problem.n_per_dataset
        self.labels = [label for label, _ in problem.datasets]
        self.ng = []
        self.freq = []
        self.weight = []
        self.hint = []
        self.uniq = []
        self.inv = []
        for _, points in problem.datasets:
            ng = np.array([p.n_g for p in points])
            uniq, inv = np.unique(ng, return_inverse=True)
            self.ng.append(ng)
            self.freq.append(np.array([p.freq for p in points]))
            self.weight.append(np.array([p.weight for p in points]))
            self.hint.append(np.array(
                [0 if p.branch_hint is None else p.branch_hint for p in points],
                dtype=np.int64,
            ))
            self.uniq.append(uniq)
            self.inv.append(inv.astype(np.int64))

    def dataset_params(self, params, d):
        # (e_j, tls array, t_12) for dataset d from the full vector.
        base = self.n_shared + d * self.n_per_dataset
        tls = np.zeros((2, 4))
        for i in range(self.n_tls):
            tls[i, 0] = params[1 + 3 * i]       # e_r
            tls[i, 1] = params[3 + 3 * i]       # t_lr
            tls[i, 2] = params[2 + 3 * i]       # e_int
            tls[i, 3] = params[base + 1 + i]    # delta_e_j
        t_12 = params[self.n_shared - 1] if self.n_tls == 2 else 0.0
        return params[base], tls, t_12

    def evaluate(self, params):
        # (objective, residuals per dataset, penalty masks per dataset).
        contributions = []
        residuals = []
        penalized = []
        for d in range(len(self.labels)):
            e_j, tls, t_12 = self.dataset_params(params, d)
            ok, off, res, pen = _ridge_eval(
                self.m, self.n_lo, params[0], e_j, tls, t_12,
                self.n_tls, self.max_states,
                self.uniq[d], self.inv[d], self.freq[d], self.hint[d],
                self.hinted, REL_TOL, MAX_SWEEPS, SIGN_TOL,
            )
            if not ok:
                raise ConvergenceError(off, MAX_SWEEPS)
            w = self.weight[d]
            for i in range(res.shape[0]):
                contributions.append(PENALTY if pen[i] else w[i] * res[i] * res[i])
            residuals.append(res)
            penalized.append(pen)
        return math.fsum(contributions), residuals, penalized


def objective(problem: FitProblem, params) -> float:
    """Weighted sum of squared residuals (GHz^2) at one parameter vector.

    Points with no bright model line at their gate charge each contribute
    the flat penalty ``PENALTY`` instead of a squared residual. Summation
    uses exact accumulation, so the result is independent of point order.
    """
    prep = _Prepared(problem)
    params = _checked_params(prep, params)
    return prep.evaluate(params)[0]


def _checked_params(prep, params):
    params = np.asarray(params, dtype=np.float64)
    if params.shape != (len(prep.names),):
        raise ValueError(
            f"expected {len(prep.names)} parameters, got shape {params.shape}"
        )
    for i, name in enumerate(prep.names):
        if not prep.lo[i] <= params[i] <= prep.hi[i]:
            raise ValueError(
                f"parameter {name} = {params[i]:.9g} outside bounds "
                f"[{prep.lo[i]:.9g}, {prep.hi[i]:.9g}]"
            )
    return params


def _nelder_mead(func, x0, lo, hi, fatol, max_iter):
    # Bounded Nelder-Mead with standard coefficients (reflect 1, expand 2,
    # contract 0.5, shrink 0.5). Every trial point is clipped to the box.
    # Parameters with lo == hi never move. Converges when the simplex
    # objective spread drops below fatol.
    free = np.nonzero(hi > lo)[0]
    clip = lambda x: np.minimum(np.maximum(x, lo), hi)
    x0 = clip(np.asarray(x0, dtype=np.float64))
    if free.size == 0:
        return x0, func(x0), 0, True
    verts = [x0]
    for idx in free:
        step = 0.05 * (hi[idx] - lo[idx])
        v = x0.copy()
        v[idx] = v[idx] + step if v[idx] + step <= hi[idx] else v[idx] - step
        verts.append(v)
    sim = np.array(verts)
    fs = np.array([func(v) for v in sim])
    iterations = 0
    while True:
        order = np.argsort(fs, kind="stable")
        sim = sim[order]
        fs = fs[order]
        if fs[-1] - fs[0] < fatol:
            return sim[0], fs[0], iterations, True
        if iterations >= max_iter:
            return sim[0], fs[0], iterations, False
        iterations += 1
        centroid = sim[:-1].mean(axis=0)
        xr = clip(centroid + (centroid - sim[-1]))
        fr = func(xr)
        if fr < fs[0]:
            xe = clip(centroid + 2.0 * (centroid - sim[-1]))
            fe = func(xe)
            if fe < fr:
                sim[-1], fs[-1] = xe, fe
            else:
                sim[-1], fs[-1] = xr, fr
        elif fr < fs[-2]:
            sim[-1], fs[-1] = xr, fr
        elif fr < fs[-1]:
            xc = clip(centroid + 0.5 * (xr - centroid))
            fc = func(xc)
            if fc <= fr:
                sim[-1], fs[-1] = xc, fc
            else:
                sim, fs = _shrink(func, sim, fs, clip)
        else:
            xc = clip(centroid + 0.5 * (sim[-1] - centroid))
            fc = func(xc)
            if fc < fs[-1]:
                sim[-1], fs[-1] = xc, fc
            else:
                sim, fs = _shrink(func, sim, fs, clip)


def _shrink(func, sim, fs, clip):
    for i in range(1, sim.shape[0]):
        sim[i] = clip(sim[0] + 0.5 * (sim[i] - sim[0]))
        fs[i] = func(sim[i])
    return sim, fs


def fit(problem: FitProblem, initial_params, fatol: float = 1e-6,
        max_iter: int = 5000) -> FitResult:
    """Minimize the ridge objective from one starting vector.

    Parameters
    ----------
    problem : FitProblem
    initial_params : array_like
        Start vector in :meth:`FitProblem.param_names` order, within bounds.
    fatol : float
        Simplex spread (GHz^2) declaring convergence.
    max_iter : int
        Iteration budget.

    Returns
    -------
    FitResult
    """
    prep = _Prepared(problem)
    x0 = _checked_params(prep, initial_params)
    x, f, iterations, converged = _nelder_mead(
        lambda v: prep.evaluate(v)[0], x0, prep.lo, prep.hi, fatol, max_iter
    )
    obj, residuals, penalized = prep.evaluate(x)
    return FitResult(
        parameter_names=prep.names,
        parameters=x,
        objective=obj,
        iterations=iterations,
        converged=converged,
        dataset_labels=list(prep.labels),
        residuals=residuals,
        penalized=penalized,
    )


def multistart(problem: FitProblem, seed_count: int = 20, rng_seed: int = 0,
               fatol: float = 1e-6, max_iter: int = 5000) -> FitResult:
    """Run :func:`fit` from ``seed_count`` uniform draws inside the bounds.

    The returned result is the run with the lowest objective (first such
    run on exact ties), with ``parameter_spread`` set to the per-parameter
    max - min over all runs within a factor 2 of the best objective. A
    large spread flags a flat or multimodal objective: those parameters are
    not pinned down by the data.
    """
    if not isinstance(seed_count, int) or seed_count < 1:
        raise ValueError(f"seed_count must be a positive int, got {seed_count}")
    prep = _Prepared(problem)
    rng = np.random.default_rng(rng_seed)
    starts = rng.uniform(prep.lo, prep.hi, size=(seed_count, len(prep.names)))
    results = []
    for s in range(seed_count):
        x, f, iterations, converged = _nelder_mead(
            lambda v: prep.evaluate(v)[0], starts[s], prep.lo, prep.hi,
            fatol, max_iter,
        )
        results.append((x, f, iterations, converged))
    best = 0
    for s in range(1, seed_count):
        if results[s][1] < results[best][1]:
            best = s
    threshold = 2.0 * results[best][1]
    near = np.array([x for x, f, _, _ in results if f <= threshold])
    spread = near.max(axis=0) - near.min(axis=0)
    x, f, iterations, converged = results[best]
    obj, residuals, penalized = prep.evaluate(x)
    return FitResult(
        parameter_names=prep.names,
        parameters=x,
        objective=obj,
        iterations=iterations,
        converged=converged,
        dataset_labels=list(prep.labels),
        residuals=residuals,
        penalized=penalized,
        parameter_spread=spread,
    )


def synthetic_ridges(config, n_g_grid, noise_sigma: float = 0.0,
                     rng_seed: int = 0, max_states=None,
                     visibility_floor: float = VISIBILITY_FLOOR,
                     with_hints: bool = False) -> list:
    """Generate ridge points from a model, mimicking extracted spectroscopy.

    Simulates ``spectrum(config, n_g_grid, max_states)``, keeps lines whose
    visibility is within ``visibility_floor`` of the brightest line at the
    same gate charge, and adds Gaussian frequency noise of width
    ``noise_sigma`` (GHz) drawn in grid-then-state order from a generator
    seeded with ``rng_seed``. With ``with_hints`` each point records its
    true branch index.

    Returns
    -------
    list of RidgePoint
    """
    if not (math.isfinite(noise_sigma) and noise_sigma >= 0.0):
        raise ValueError(f"noise_sigma must be >= 0, got {noise_sigma}")
    table = spectrum(config, n_g_grid, max_states)
    rng = np.random.default_rng(rng_seed)
    points = []
    for n_g in table.grid:
        lines = table.at(float(n_g))
        vmax = max(ln.visibility for ln in lines)
        if vmax <= 0.0:
            continue
        for ln in lines:
            if ln.visibility >= visibility_floor * vmax:
                f = ln.freq
                if noise_sigma > 0.0:
                    f += rng.normal(0.0, noise_sigma)
                points.append(RidgePoint(
                    n_g=ln.n_g,
                    freq=f,
                    weight=1.0,
                    branch_hint=ln.state_index if with_hints else None,
                ))
    return points
