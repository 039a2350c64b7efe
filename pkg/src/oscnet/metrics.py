"""Decoherence metrics: diffusion times, interference decay, entropy, concurrence.

Times may be infinite (zero temperature, decoherence-free component pairs,
single-component states); they are plain floats with ``math.inf`` as the
infinite value, and the harmonic combination is defined on the extended reals.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import NoBracket, ValidationError
from .phasespace import _pair_weights
from .propagation import Model, Propagator, PropagatorBundle
from .states import CoherentMixture

__all__ = [
    "DecoherenceReport",
    "mean_diffusion_time",
    "directional_diffusion_times",
    "decay_function",
    "interference_decay_time",
    "decoherence_time",
    "linear_entropy",
    "concurrence",
    "decoherence_report",
]

_FLAT_RATE = 1e-12
_LIMIT_TOL = 1e-12


def mean_diffusion_time(diffusion: np.ndarray) -> float:
    """Mean diffusion time N / (2 Tr Y); infinite when the trace vanishes.

    Exact for every topology and coupling regime: the trace of the Wigner
    width grows initially at twice the diffusion-matrix trace.
    """
    diffusion = np.asarray(diffusion, dtype=float)
    trace = float(np.trace(diffusion))
    if trace < 0:
        raise ValidationError("diffusion matrix must have non-negative trace")
    if trace == 0:
        return math.inf
    return diffusion.shape[0] / (2.0 * trace)


def directional_diffusion_times(bundles) -> np.ndarray:
    """Per-direction diffusion times from a forward difference at t = 0.

    Takes the first two bundles of a series (the first at t = 0); the inverse
    time of direction m is the initial growth rate of the m-th diffusion
    coefficient.  Flat directions get ``inf``.  The average of the inverse
    times reproduces the inverse mean diffusion time to O(step).
    """
    bundles = list(bundles)
    if len(bundles) < 2:
        raise ValidationError("need bundles at t = 0 and one later time")
    first, second = bundles[0], bundles[1]
    if abs(first.t) > 0:
        raise ValidationError("first bundle must be at t = 0")
    step = second.t - first.t
    if step <= 0:
        raise ValidationError("bundle times must increase")
    rates = (second.diffusion_coeffs - first.diffusion_coeffs) / step
    # below this, the difference quotient is dominated by rounding noise
    floor = max(
        _FLAT_RATE,
        8.0 * np.finfo(float).eps * float(np.max(second.diffusion_coeffs)) / step,
    )
    return np.array([1.0 / r if r > floor else math.inf for r in rates])


def _component_pair(state: CoherentMixture, r: int, s: int, branch: int):
    components = state.branches[branch].components
    if r == s:
        raise ValidationError("decay function needs two distinct components")
    if not (0 <= r < len(components) and 0 <= s < len(components)):
        raise ValidationError("component index out of range")
    return components[r].amplitudes, components[s].amplitudes


def _decay_exponent(delta: np.ndarray, bundle: PropagatorBundle) -> float:
    moved = bundle.rotation.T @ (bundle.transition @ delta)
    reduced = np.sum(np.abs(moved) ** 2 / bundle.diffusion_coeffs)
    return float(-2.0 * (np.sum(np.abs(delta) ** 2) - reduced))


def decay_function(
    state: CoherentMixture, r: int, s: int, bundle: PropagatorBundle, branch: int = 0
) -> float:
    """Interference decay function of a component pair, in (0, 1], equal to 1 at t=0.

    Derived from the ratio of diagonal to off-diagonal Wigner elements in the
    rotated frame; it deducts the spreading common to all elements, so only
    genuine interference loss registers.  At zero temperature it reduces to
    the fourth power of the overlap ratio of the initial and evolved
    component pairs.
    """
    beta_r, beta_s = _component_pair(state, r, s, branch)
    return math.exp(_decay_exponent(beta_r - beta_s, bundle))


def _gap(delta: np.ndarray, bundle: PropagatorBundle) -> float:
    # log decay + 4N / sum(D): positive until the interference terms have
    # decayed past the spread-adjusted threshold.
    n = delta.size
    return _decay_exponent(delta, bundle) + 4.0 * n / float(
        np.sum(bundle.diffusion_coeffs)
    )


def interference_decay_time(
    state: CoherentMixture,
    r: int,
    s: int,
    propagator: Propagator,
    t_grid,
    branch: int = 0,
    rtol: float = 1e-8,
) -> float:
    """Time at which the pair's decay function crosses the diffusion-adjusted
    threshold exp(-4N / sum(D)); ``inf`` if it never does.

    The crossing is bracketed on the supplied grid and refined by bisection to
    the requested relative width.  If the grid ends with the gap still
    positive, the t -> infinity limit decides between a genuinely absent
    crossing (``inf``) and a too-short grid (:class:`NoBracket`).
    """
    beta_r, beta_s = _component_pair(state, r, s, branch)
    delta = beta_r - beta_s
    t_grid = np.asarray(t_grid, dtype=float)
    if t_grid.size < 2 or np.any(np.diff(t_grid) <= 0):
        raise ValidationError("time grid must be increasing with at least two points")
    values = [_gap(delta, propagator.bundle(t)) for t in t_grid]
    lo = hi = None
    for left, right, f_left, f_right in zip(t_grid, t_grid[1:], values, values[1:]):
        if f_left > 0 >= f_right:
            lo, hi, f_lo = left, right, f_left
            break
    if lo is None:
        if values[0] <= 0:
            raise ValidationError("grid starts past the crossing; start earlier")
        n = delta.size
        stationary = propagator.stationary_coeffs()
        limit = -2.0 * float(np.sum(np.abs(delta) ** 2)) + 4.0 * n / float(
            np.sum(stationary)
        )
        if limit < -_LIMIT_TOL:
            raise NoBracket("gap still positive at the end of the grid; extend it")
        return math.inf
    while (hi - lo) > rtol * max(hi, 1e-300):
        mid = 0.5 * (lo + hi)
        if _gap(delta, propagator.bundle(mid)) > 0:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def decoherence_time(tau_diff: float, tau_int: float) -> float:
    """Harmonic combination of diffusion and interference times (extended reals)."""
    for value in (tau_diff, tau_int):
        if not (value > 0):
            raise ValidationError("times must be positive or infinite")
    inverse = (0.0 if math.isinf(tau_diff) else 1.0 / tau_diff) + (
        0.0 if math.isinf(tau_int) else 1.0 / tau_int
    )
    return math.inf if inverse == 0.0 else 1.0 / inverse


def linear_entropy(state: CoherentMixture, bundle: PropagatorBundle) -> float:
    """Linear entropy 1 - Tr rho^2 of the evolved mixture, in [0, 1).

    Computed in closed form from the Gaussian pair sums of the Wigner
    function: the purity is a quadruple sum over component pairs with a
    kernel built from the rotated transition matrix and the diffusion
    coefficients, divided by the Wigner-width determinant.  Equals 0 for any
    pure state at t = 0 and stays 0 without dissipation.
    """
    betas, weights, _ = _pair_weights(state)
    coeffs = bundle.diffusion_coeffs
    det = float(np.prod(coeffs))
    moved = (bundle.rotation.T @ (bundle.transition @ betas.T)).T  # (K, N)
    diff = moved[:, None, :] - moved[None, :, :]  # (a, b, m) = y_a - y_b
    kernel = -np.einsum("abm,cdm,m->abcd", diff, diff.conj(), 1.0 / coeffs)
    purity = np.einsum("rs,pq,sqrp->", weights, weights, np.exp(kernel)).real / det
    entropy = 1.0 - purity
    if entropy < 0 and entropy > -1e-10:
        entropy = 0.0
    return float(entropy)


def _gh_nodes(nodes: int, stiffness: float):
    u, w = np.polynomial.hermite.hermgauss(nodes)
    scale = math.sqrt(stiffness)
    return u / scale, w / scale


def _plane_integral(stiffness: float, px, py, nodes: int):
    """integral exp(-stiffness (x^2+y^2) + px x + py y) dx dy by Gauss-Hermite."""
    x, w = _gh_nodes(nodes, stiffness)
    gx = np.exp(np.asarray(px)[..., None] * x) @ w
    gy = np.exp(np.asarray(py)[..., None] * x) @ w
    return gx * gy


def concurrence(
    state: CoherentMixture, part_a, bundle: PropagatorBundle, nodes: int = 64
) -> float:
    """Bipartite concurrence 1 - Tr_A[(Tr_B rho)^2] for dissipation-free evolution.

    Evaluated through nested mode-by-mode Gauss-Hermite quadrature of the
    joint Wigner function: the B-modes are integrated out of each Gaussian
    pair term, then the squared marginal is integrated over the A-modes.
    Requires a pure (single-branch) state, at most three modes, and a
    dissipation-free bundle; symmetric under swapping the partition.
    """
    branch = state.single_branch()
    n = state.n_modes
    if n > 3:
        raise ValidationError("concurrence quadrature is limited to three modes")
    part_a = sorted(int(m) for m in part_a)
    if not part_a or len(part_a) >= n or len(set(part_a)) != len(part_a):
        raise ValidationError("partition must be a proper non-empty subset of modes")
    if any(m < 0 or m >= n for m in part_a):
        raise ValidationError("partition indexes out of range")
    part_b = [m for m in range(n) if m not in part_a]
    unit = bundle.transition.conj().T @ bundle.transition
    if (
        np.max(np.abs(bundle.wigner_width - np.eye(n))) > 1e-10
        or np.max(np.abs(unit - np.eye(n))) > 1e-10
    ):
        raise ValidationError("concurrence requires a dissipation-free bundle")

    betas = np.array([c.amplitudes for c in branch.components])
    coeffs = np.array([c.coefficient for c in branch.components])
    k = coeffs.size
    centers = (bundle.transition @ betas.T).T  # (K, N)
    norms = np.sum(np.abs(betas) ** 2, axis=1)
    overlap_exp = -0.5 * norms[:, None] - 0.5 * norms[None, :] + betas.conj() @ betas.T
    pair_w = coeffs.conj()[:, None] * coeffs[None, :] * np.exp(overlap_exp)  # (r, s)

    ket = centers[None, :, :]  # s
    bra = centers[:, None, :].conj()  # r
    # Marginal of one pair term over mode m: (2/pi) exp(-2 a conj(b)) * plane integral.
    single = (2.0 / np.pi) * np.exp(-2.0 * ket * bra) * _plane_integral(
        2.0, 2.0 * (ket + bra), 2.0j * (bra - ket), nodes
    )  # (r, s, m)
    marg_b = np.prod(single[:, :, part_b], axis=2)  # (r, s)

    a_ket = centers[:, part_a]  # (K, |A|)
    sum_ket = a_ket[None, :, None, None, :] + a_ket[None, None, None, :, :]  # s, s'
    sum_bra = (
        a_ket.conj()[:, None, None, None, :] + a_ket.conj()[None, None, :, None, :]
    )  # r, r'
    const = (
        a_ket[None, :, None, None, :] * a_ket.conj()[:, None, None, None, :]
        + a_ket[None, None, None, :, :] * a_ket.conj()[None, None, :, None, :]
    )
    squared = (
        np.pi
        * (2.0 / np.pi) ** 2
        * np.exp(-2.0 * const)
        * _plane_integral(4.0, 2.0 * (sum_ket + sum_bra), 2.0j * (sum_bra - sum_ket), nodes)
    )  # (r, s, r', s', m in A)
    over_a = np.prod(squared, axis=4)  # (r, s, r', s')

    total = np.einsum("rs,pq,rspq->", pair_w, pair_w, over_a * marg_b[:, :, None, None]
                      * marg_b[None, None, :, :])
    value = 1.0 - float(total.real)
    if -1e-9 < value < 0:
        value = 0.0
    return value


@dataclass(frozen=True)
class DecoherenceReport:
    """Diffusion, interference, and combined decoherence times plus regime label.

    ``1/tau_d == 1/tau_diff + 1/tau_int`` by construction; any entry may be
    ``inf`` (zero temperature, decoherence-free pairs, single-component
    states).
    """

    tau_diff: float
    tau_directional: tuple
    tau_int: float
    tau_d: float
    regime: str


def decoherence_report(
    state: CoherentMixture,
    model: Model,
    t_grid,
    pair: tuple[int, int] = (0, 1),
    branch: int = 0,
    fd_step: float = 1e-6,
) -> DecoherenceReport:
    """Assemble the full decoherence report for one state and model."""
    tau_diff = mean_diffusion_time(model.rates.diffusion)
    bundles = model.propagator.bundles([0.0, fd_step])
    directional = tuple(directional_diffusion_times(bundles))
    if len(state.branches[branch].components) >= 2:
        tau_int = interference_decay_time(
            state, pair[0], pair[1], model.propagator, t_grid, branch=branch
        )
    else:
        tau_int = math.inf
    tau_d = decoherence_time(tau_diff, tau_int)
    return DecoherenceReport(
        tau_diff=tau_diff,
        tau_directional=directional,
        tau_int=tau_int,
        tau_d=tau_d,
        regime=model.regime,
    )
