"""Command-line interface: validated JSON configs in, CSV/JSON artifacts out.

Verbs:

* ``run <config>``      -- execute one configuration, write the requested outputs
* ``sweep <config> --axis <path>=<start:stop:steps>`` -- cross-product runs,
  long-form CSV (one row per point and metric)
* ``validate <config>`` -- schema-check and echo the canonical form
* ``selftest``          -- seeded randomized property checks

Outputs are deterministic for identical configs; ``--serial`` forces in-process
sequential sweeps for bit-exact reproducibility.  Every file starts with a
header block carrying the config hash and package version.
"""

from __future__ import annotations

import argparse
import concurrent.futures
import hashlib
import json
import math
import os
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .errors import ConfigError, OscnetError
from .metrics import decoherence_report, linear_entropy
from .network import NetworkSpec
from .oracle import (
    FockSpace,
    density_from_coherent,
    evolve_master,
    expect_lowering,
    expect_number_matrix,
    oracle_char,
    oracle_purity,
    select_cutoff,
)
from .phasespace import char_function, moments, wigner_grid
from .propagation import Model, build_model
from .reservoirs import GaussianBand, Lorentzian, ReservoirSpec, WhiteNoise
from .states import (
    CoherentMixture,
    build_cat_family,
    coherent_mixture,
    coherent_superposition,
)

OUTPUT_KINDS = ("tau_report", "dcoef", "wigner_grid", "entropy_curve", "oracle_compare")


# ---------------------------------------------------------------------------
# Config parsing


def _get(config, path, default=None, required=False):
    node = config
    for key in path.split("."):
        if not isinstance(node, dict) or key not in node:
            if required:
                raise ConfigError(path, "missing required field")
            return default
        node = node[key]
    return node


def _complex_field(value, path):
    if isinstance(value, (int, float)):
        return complex(value)
    if isinstance(value, (list, tuple)) and len(value) == 2:
        try:
            return complex(float(value[0]), float(value[1]))
        except (TypeError, ValueError):
            pass
    raise ConfigError(path, "expected a number or [re, im] pair")


def _positive_int(value, path):
    if not isinstance(value, int) or isinstance(value, bool) or value < 1:
        raise ConfigError(path, "expected a positive integer")
    return value


def _parse_network(config) -> NetworkSpec:
    n = _positive_int(_get(config, "network.n", required=True), "network.n")
    omega = _get(config, "network.omega", required=True)
    coupling = _get(config, "network.coupling", 0.0)
    if isinstance(omega, (int, float)):
        omega = [float(omega)] * n
    if len(omega) != n:
        raise ConfigError("network.omega", f"expected {n} entries")
    if isinstance(coupling, (int, float)):
        lam = np.full((n, n), float(coupling))
        np.fill_diagonal(lam, 0.0)
    else:
        lam = np.asarray(coupling, dtype=float)
    try:
        return NetworkSpec(omega=np.asarray(omega, dtype=float), coupling=lam)
    except OscnetError as exc:
        raise ConfigError("network", str(exc)) from exc


def _parse_profile(node, path):
    if not isinstance(node, dict) or "kind" not in node:
        raise ConfigError(path, "expected an object with a 'kind' field")
    kind = node["kind"]
    try:
        if kind == "white":
            return WhiteNoise(gamma=float(node["gamma"]))
        if kind == "lorentzian":
            return Lorentzian(
                gamma=float(node["gamma"]),
                center=float(node["center"]),
                width=float(node["width"]),
            )
        if kind == "gaussian_band":
            return GaussianBand(
                gamma=float(node["gamma"]),
                center=float(node["center"]),
                width=float(node["width"]),
            )
    except KeyError as exc:
        raise ConfigError(path, f"missing profile field {exc}") from exc
    except (TypeError, ValueError, OscnetError) as exc:
        raise ConfigError(path, str(exc)) from exc
    raise ConfigError(f"{path}.kind", f"unknown profile kind {kind!r}")


def _parse_reservoirs(config, n) -> ReservoirSpec:
    temperature = _get(config, "reservoirs.temperature", required=True)
    if isinstance(temperature, (int, float)):
        temps = [float(temperature)] * n
    else:
        temps = [float(t) for t in temperature]
    if len(temps) != n:
        raise ConfigError("reservoirs.temperature", f"expected {n} entries")
    profile = _get(config, "reservoirs.profile", required=True)
    if isinstance(profile, dict):
        profiles = [_parse_profile(profile, "reservoirs.profile")] * n
    else:
        if len(profile) != n:
            raise ConfigError("reservoirs.profile", f"expected {n} entries")
        profiles = [
            _parse_profile(p, f"reservoirs.profile[{i}]") for i, p in enumerate(profile)
        ]
    overlap = _get(config, "reservoirs.overlap")
    if overlap is not None:
        overlap = np.asarray(overlap, dtype=float)
    common = bool(_get(config, "reservoirs.common", False))
    if common and len(set(temps)) > 1:
        raise ConfigError(
            "reservoirs.temperature", "a common reservoir has a single temperature"
        )
    try:
        return ReservoirSpec(
            temperatures=np.asarray(temps),
            profiles=tuple(profiles),
            common=common,
            overlap=overlap,
        )
    except OscnetError as exc:
        raise ConfigError("reservoirs", str(exc)) from exc


def _parse_state(config, n) -> CoherentMixture:
    kind = _get(config, "state.kind", required=True)
    if kind == "cat":
        r = _get(config, "state.r", 1)
        s = _get(config, "state.s", 0)
        alpha = _complex_field(_get(config, "state.alpha", required=True), "state.alpha")
        beta = _complex_field(_get(config, "state.beta", 0.0), "state.beta")
        sign = _get(config, "state.sign", 1)
        try:
            return build_cat_family(n, int(r), int(s), alpha, beta, int(sign))
        except OscnetError as exc:
            field = "state.r" if "exceeds" in str(exc) else "state"
            raise ConfigError(field, str(exc)) from exc
    if kind == "coherent":
        branches_node = _get(config, "state.branches", required=True)
        branches = []
        for i, b in enumerate(branches_node):
            comps = b.get("components", [])
            coeffs = []
            vectors = []
            for j, c in enumerate(comps):
                where = f"state.branches[{i}].components[{j}]"
                if not isinstance(c, dict) or "amplitude" not in c or "beta" not in c:
                    raise ConfigError(where, "needs 'amplitude' and 'beta' fields")
                coeffs.append(_complex_field(c["amplitude"], f"{where}.amplitude"))
                vec = [_complex_field(z, f"{where}.beta") for z in c["beta"]]
                if len(vec) != n:
                    raise ConfigError(f"{where}.beta", f"expected {n} modes")
                vectors.append(vec)
            try:
                branches.append(
                    coherent_superposition(coeffs, vectors, b.get("weight", 1.0))
                )
            except OscnetError as exc:
                raise ConfigError(f"state.branches[{i}]", str(exc)) from exc
        try:
            return coherent_mixture(branches)
        except OscnetError as exc:
            raise ConfigError("state.branches", str(exc)) from exc
    raise ConfigError("state.kind", f"unknown state kind {kind!r}")


def _parse_times(config) -> np.ndarray:
    node = _get(config, "times", required=True)
    if "list" in node:
        times = np.asarray([float(t) for t in node["list"]], dtype=float)
    else:
        start = float(node.get("start", 0.0))
        stop = float(node.get("stop", 0.0))
        steps = node.get("steps", 0)
        if not isinstance(steps, int) or steps < 2 or stop <= start:
            raise ConfigError("times", "need start < stop and integer steps >= 2")
        times = np.linspace(start, stop, steps)
    if times.size < 1 or np.any(times < 0) or np.any(np.diff(times) <= 0):
        raise ConfigError("times", "times must be increasing and >= 0")
    return times


def _parse_outputs(config):
    outputs = _get(config, "outputs", ["tau_report"])
    for out in outputs:
        if out not in OUTPUT_KINDS:
            raise ConfigError("outputs", f"unknown output {out!r}")
    return outputs


def parse_config(config: dict):
    """Validate a raw config tree into model inputs; raises ConfigError."""
    if not isinstance(config, dict):
        raise ConfigError("<root>", "config must be a JSON object")
    network = _parse_network(config)
    reservoirs = _parse_reservoirs(config, network.n)
    regime = _get(config, "regime", "auto")
    if regime not in ("auto", "weak", "strong"):
        raise ConfigError("regime", f"expected auto|weak|strong, got {regime!r}")
    state = _parse_state(config, network.n)
    times = _parse_times(config)
    outputs = _parse_outputs(config)
    return network, reservoirs, regime, state, times, outputs


def canonical_json(config: dict) -> str:
    return json.dumps(config, sort_keys=True, separators=(",", ":"))


def config_hash(config: dict) -> str:
    return hashlib.sha256(canonical_json(config).encode()).hexdigest()[:16]


# ---------------------------------------------------------------------------
# Output writers


def _header_lines(config):
    return [
        f"# oscnet {__version__}",
        f"# config_hash {config_hash(config)}",
    ]


def _write_atomic(path: Path, text: str):
    tmp = path.with_suffix(path.suffix + ".tmp")
    tmp.write_text(text)
    os.replace(tmp, path)


def _write_csv(path: Path, config, columns, rows):
    lines = _header_lines(config)
    lines.append(",".join(columns))
    for row in rows:
        lines.append(",".join(_format_value(v) for v in row))
    _write_atomic(path, "\n".join(lines) + "\n")


def _format_value(value):
    if isinstance(value, str):
        return value
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    value = float(value)
    return "inf" if math.isinf(value) else repr(value)


def _json_time(value: float):
    return "inf" if math.isinf(value) else value


def _write_tau_report(path: Path, config, state, model: Model, times):
    report = decoherence_report(state, model, times)
    payload = {
        "meta": {"oscnet": __version__, "config_hash": config_hash(config)},
        "tau_diff": _json_time(report.tau_diff),
        "tau_directional": [_json_time(t) for t in report.tau_directional],
        "tau_int": _json_time(report.tau_int),
        "tau_d": _json_time(report.tau_d),
        "regime": report.regime,
    }
    _write_atomic(path, json.dumps(payload, indent=2, sort_keys=True) + "\n")
    return payload


def _write_dcoef(path: Path, config, model: Model, times):
    rows = []
    for t in times:
        bundle = model.propagator.bundle(t)
        rows.append([t, *bundle.diffusion_coeffs])
    n = model.network.n
    _write_csv(path, config, ["t"] + [f"d{m + 1}" for m in range(n)], rows)


def _write_entropy_curve(path: Path, config, state, model: Model, times):
    rows = []
    for t in times:
        rows.append([t, linear_entropy(state, model.propagator.bundle(t))])
    _write_csv(path, config, ["t", "linear_entropy"], rows)


def _write_wigner_grid(path: Path, config, state, model: Model, times):
    node = _get(config, "wigner_grid", {}) or {}
    points = node.get("points", 41)
    n = model.network.n
    default_range = [-3.0, 3.0, -3.0, 3.0]
    ranges = node.get("ranges", [default_range] * n)
    if len(ranges) != n:
        raise ConfigError("wigner_grid.ranges", f"expected {n} range tuples")
    index = node.get("time_index", -1)
    bundle = model.propagator.bundle(times[index])
    coords, values = wigner_grid(state, bundle, ranges, points)
    columns = []
    for m in range(n):
        columns += [f"re_xi{m + 1}", f"im_xi{m + 1}"]
    columns.append("wigner")
    rows = [list(c) + [v] for c, v in zip(coords, values)]
    _write_csv(path, config, columns, rows)


def _default_eta_grid(n):
    base = [0.35 + 0.0j, -0.2 + 0.3j, 0.15 - 0.25j]
    grids = np.meshgrid(*([base] * n), indexing="ij")
    return np.stack([g.reshape(-1) for g in grids], axis=-1)


def _write_oracle_compare(path: Path, config, state, model: Model, times):
    node = _get(config, "oracle", {}) or {}
    largest_amp = max(
        float(np.max(np.abs(c.amplitudes)))
        for b in state.branches
        for c in b.components
    )
    occupations = model.rates.diffusion.diagonal() / np.maximum(
        model.rates.damping.diagonal(), 1e-300
    )
    n_max = node.get("n_max", select_cutoff(largest_amp, float(np.max(occupations))))
    space = FockSpace(model.network.n, int(n_max))
    rho0 = density_from_coherent(space, state)
    evolved = evolve_master(
        rho0,
        model.hamiltonian,
        model.rates.damping,
        model.rates.diffusion,
        times,
        space,
    )
    eta_pts = _default_eta_grid(model.network.n)
    rows = []
    for snapshot in evolved:
        bundle = model.propagator.bundle(snapshot.t)
        chi_model = char_function(state, eta_pts, bundle)
        chi_oracle = np.array(
            [oracle_char(snapshot.rho, eta, space) for eta in eta_pts]
        )
        first, second = moments(state, bundle)
        err_first = np.max(np.abs(first - expect_lowering(snapshot.rho, space)))
        err_second = np.max(np.abs(second - expect_number_matrix(snapshot.rho, space)))
        purity_model = 1.0 - linear_entropy(state, bundle)
        rows.append(
            [
                snapshot.t,
                float(np.max(np.abs(chi_model - chi_oracle))),
                float(err_first),
                float(err_second),
                abs(purity_model - oracle_purity(snapshot.rho)),
            ]
        )
    _write_csv(
        path,
        config,
        ["t", "max_chi_err", "max_first_moment_err", "max_second_moment_err", "purity_err"],
        rows,
    )


def run_config(config: dict, out_dir: Path) -> dict:
    """Execute one validated config; returns {output kind: file path}."""
    network, reservoirs, regime, state, times, outputs = parse_config(config)
    model = build_model(network, reservoirs, regime)
    out_dir.mkdir(parents=True, exist_ok=True)
    written = {}
    for kind in outputs:
        if kind == "tau_report":
            path = out_dir / "tau_report.json"
            _write_tau_report(path, config, state, model, times)
        elif kind == "dcoef":
            path = out_dir / "dcoef.csv"
            _write_dcoef(path, config, model, times)
        elif kind == "entropy_curve":
            path = out_dir / "entropy_curve.csv"
            _write_entropy_curve(path, config, state, model, times)
        elif kind == "wigner_grid":
            path = out_dir / "wigner_grid.csv"
            _write_wigner_grid(path, config, state, model, times)
        else:
            path = out_dir / "oracle_compare.csv"
            _write_oracle_compare(path, config, state, model, times)
        written[kind] = str(path)
    return written


# ---------------------------------------------------------------------------
# Sweep


def _set_path(config: dict, path: str, value):
    node = config
    keys = path.split(".")
    for key in keys[:-1]:
        if key not in node or not isinstance(node[key], dict):
            raise ConfigError(path, "axis path does not exist in the config")
        node = node[key]
    if keys[-1] not in node:
        raise ConfigError(path, "axis path does not exist in the config")
    node[keys[-1]] = value


def _parse_axis(text: str):
    if "=" not in text:
        raise ConfigError("--axis", "expected <path>=<start:stop:steps>")
    path, spec = text.split("=", 1)
    parts = spec.split(":")
    if len(parts) != 3:
        raise ConfigError("--axis", "expected <start:stop:steps>")
    start, stop, steps = float(parts[0]), float(parts[1]), int(parts[2])
    if steps < 1:
        raise ConfigError("--axis", "steps must be >= 1")
    values = np.linspace(start, stop, steps) if steps > 1 else np.array([start])
    if path.endswith(".n"):
        values = values.astype(int)
    return path.strip(), [v.item() for v in values]


def _sweep_metrics(config: dict) -> list[tuple[str, float]]:
    network, reservoirs, regime, state, times, _ = parse_config(config)
    model = build_model(network, reservoirs, regime)
    report = decoherence_report(state, model, times)
    return [
        ("tau_diff", report.tau_diff),
        ("tau_int", report.tau_int),
        ("tau_d", report.tau_d),
    ]


def _sweep_point(args):
    config, path, value = args
    metrics = _sweep_metrics(config)
    return [(path, value, name, metric) for name, metric in metrics]


def run_sweep(config: dict, axes, out_dir: Path, serial: bool) -> Path:
    """Cross-product sweep over one or two axes; long-form CSV output."""
    if len(axes) > 2:
        raise ConfigError("--axis", "at most two swept axes are supported")
    jobs = []
    if not axes:
        jobs.append((json.loads(canonical_json(config)), "none", 0.0))
    else:
        grids = [[(path, v) for v in values] for path, values in axes]
        combos = [[p] for p in grids[0]]
        if len(grids) == 2:
            combos = [[a, b] for a in grids[0] for b in grids[1]]
        for combo in combos:
            job = json.loads(canonical_json(config))
            for path, value in combo:
                _set_path(job, path, value)
            label = ";".join(path for path, _ in combo)
            value = (
                combo[0][1]
                if len(combo) == 1
                else ";".join(_format_value(v) for _, v in combo)
            )
            jobs.append((job, label, value))
    rows = []
    if serial or len(jobs) == 1:
        results = [_sweep_point(job) for job in jobs]
    else:
        with concurrent.futures.ProcessPoolExecutor() as pool:
            results = list(pool.map(_sweep_point, jobs))
    for result in results:
        rows.extend(result)
    out_dir.mkdir(parents=True, exist_ok=True)
    path = out_dir / "sweep.csv"
    _write_csv(path, config, ["axis", "value", "metric", "result"], rows)
    return path


# ---------------------------------------------------------------------------
# Selftest


def run_selftest(seed: int) -> bool:
    """Randomized property checks mirroring the library invariants."""
    from .network import dissipative_matrix, normal_modes
    from .propagation import transition_matrix
    from .stationary import solve_pi_eigen, solve_pi_vec

    rng = np.random.default_rng(seed)
    ok = True
    for trial in range(20):
        n = int(rng.integers(1, 5))
        basis, _ = np.linalg.qr(rng.normal(size=(n, n)))
        h = basis.T @ np.diag(rng.uniform(0.5, 3.0, size=n)) @ basis
        h = 0.5 * (h + h.T)  # exact symmetry for the eigensolver contract
        damping = np.diag(rng.uniform(0.05, 0.4, size=n))
        raw = rng.normal(size=(n, n))
        diffusion = 0.05 * (raw @ raw.T)
        dis = dissipative_matrix(h, damping)
        a = solve_pi_vec(dis, diffusion).matrix
        b = solve_pi_eigen(dis, diffusion).matrix
        if np.max(np.abs(a - b)) > 1e-9:
            print(f"selftest: stationary route mismatch on trial {trial}")
            ok = False
        t1, t2 = rng.uniform(0.1, 2.0, size=2)
        semi = transition_matrix(dis, t1 + t2) - transition_matrix(
            dis, t1
        ) @ transition_matrix(dis, t2)
        if np.max(np.abs(semi)) > 1e-10:
            print(f"selftest: transition semigroup violated on trial {trial}")
            ok = False
        modes = normal_modes(h)
        gram = modes.transform @ modes.transform.T
        if np.max(np.abs(gram - np.eye(n))) > 1e-12:
            print(f"selftest: mode transform not orthogonal on trial {trial}")
            ok = False
    print("selftest:", "all checks passed" if ok else "FAILURES above")
    return ok


# ---------------------------------------------------------------------------
# Entry point


def _load_config(path: str) -> dict:
    try:
        return json.loads(Path(path).read_text())
    except FileNotFoundError:
        raise ConfigError("<file>", f"config file not found: {path}")
    except json.JSONDecodeError as exc:
        raise ConfigError("<file>", f"invalid JSON: {exc}")


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="oscnet",
        description="Dissipative oscillator networks at finite temperature",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="execute one configuration")
    p_run.add_argument("config")
    p_run.add_argument("--out", default="out")
    p_run.add_argument("--serial", action="store_true")

    p_sweep = sub.add_parser("sweep", help="sweep one or two config fields")
    p_sweep.add_argument("config")
    p_sweep.add_argument("--axis", action="append", default=[])
    p_sweep.add_argument("--out", default="out")
    p_sweep.add_argument("--serial", action="store_true")

    p_val = sub.add_parser("validate", help="schema-check a configuration")
    p_val.add_argument("config")

    p_self = sub.add_parser("selftest", help="seeded randomized property checks")
    p_self.add_argument("--seed", type=int, default=0)

    args = parser.parse_args(argv)
    try:
        if args.command == "validate":
            config = _load_config(args.config)
            parse_config(config)
            print(canonical_json(config))
            print(f"config_hash {config_hash(config)}")
            return 0
        if args.command == "run":
            config = _load_config(args.config)
            written = run_config(config, Path(args.out))
            for kind, path in written.items():
                print(f"{kind}: {path}")
            return 0
        if args.command == "sweep":
            config = _load_config(args.config)
            axes = [_parse_axis(a) for a in args.axis]
            path = run_sweep(config, axes, Path(args.out), serial=args.serial)
            print(f"sweep: {path}")
            return 0
        if args.command == "selftest":
            return 0 if run_selftest(args.seed) else 1
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except OscnetError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
