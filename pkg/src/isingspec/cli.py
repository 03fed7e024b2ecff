"""Command line interface: config parsing, sweeps, and deterministic output.

One JSON config document drives every subcommand.  Files are written with a
comment header carrying the resolved configuration and tool version, floats
at 17 significant digits, so identical configs produce byte-identical
output.  Exit codes: 0 success, 2 configuration error, 3 capacity error,
4 oracle deviation.
"""

from __future__ import annotations

import json
import math
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path

import click
import numpy as np

from . import __version__
from .chain import bogoliubov_angle, build_mode_table, dispersion, momentum_grid
from .decoherence import enumerate_lines
from .errors import (
    CapacityError,
    ConfigError,
    DegenerateInputError,
    IsingSpecError,
    ParameterError,
)
from .oracle import comparison_suite
from .params import ChainParams, PhysicalParams, derive_chain_params
from .probe import ProbeState, coherent_state, fock_superposition
from .spectrum import (
    TimeGrid,
    auto_time_grid,
    broadening_metrics,
    correlation_series,
    spectrum_fft,
)

EXIT_CONFIG = 2
EXIT_CAPACITY = 3
EXIT_ORACLE = 4

_FLOAT_FMT = "%.17g"


def _fmt(x: float) -> str:
    return _FLOAT_FMT % x


def _fail(code: int, message: str) -> None:
    click.echo(f"error: {message}", err=True)
    sys.exit(code)


def _load_config(path: str) -> dict:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            raw = json.load(fh)
    except FileNotFoundError:
        raise ConfigError(f"config file not found: {path}")
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config is not valid JSON: {exc}")
    if not isinstance(raw, dict):
        raise ConfigError("config: top level must be a JSON object")
    return raw


def _require(cfg: dict, key: str, path: str):
    if key not in cfg:
        raise ConfigError(f"{path}.{key}: missing required field")
    return cfg[key]


def _number(value, path: str) -> float:
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ConfigError(f"{path}: expected a number, got {value!r}")
    if not math.isfinite(value):
        raise ConfigError(f"{path}: must be finite, got {value!r}")
    return float(value)


def _integer(value, path: str) -> int:
    if isinstance(value, bool) or not isinstance(value, int):
        raise ConfigError(f"{path}: expected an integer, got {value!r}")
    return value


def _complex(value, path: str) -> complex:
    if isinstance(value, (int, float)) and not isinstance(value, bool):
        return complex(value)
    if (
        isinstance(value, list)
        and len(value) == 2
        and all(isinstance(v, (int, float)) and not isinstance(v, bool) for v in value)
    ):
        return complex(value[0], value[1])
    raise ConfigError(f"{path}: expected a number or [re, im] pair, got {value!r}")


def parse_chain(cfg: dict) -> ChainParams:
    section = _require(cfg, "chain", "config")
    if not isinstance(section, dict):
        raise ConfigError("config.chain: expected an object")
    try:
        return ChainParams(
            n_sites=_integer(_require(section, "n_sites", "config.chain"), "config.chain.n_sites"),
            lam=_number(_require(section, "lambda", "config.chain"), "config.chain.lambda"),
            g_over_b=_number(
                _require(section, "g_over_b", "config.chain"), "config.chain.g_over_b"
            ),
            gamma_over_b=_number(
                _require(section, "gamma_over_b", "config.chain"),
                "config.chain.gamma_over_b",
            ),
        )
    except ParameterError as exc:
        raise ConfigError(f"config.chain: {exc}")


def parse_probe(cfg: dict) -> ProbeState:
    section = _require(cfg, "probe", "config")
    if not isinstance(section, dict):
        raise ConfigError("config.probe: expected an object")
    kind = _require(section, "type", "config.probe")
    if kind == "fock":
        coeffs = _require(section, "coefficients", "config.probe")
        if not isinstance(coeffs, list) or not coeffs:
            raise ConfigError("config.probe.coefficients: expected a non-empty list")
        values = [
            _complex(c, f"config.probe.coefficients[{i}]") for i, c in enumerate(coeffs)
        ]
        try:
            return fock_superposition(values)
        except DegenerateInputError as exc:
            raise ConfigError(f"config.probe.coefficients: {exc}")
    if kind == "coherent":
        alpha = _complex(_require(section, "alpha", "config.probe"), "config.probe.alpha")
        tail_tol = section.get("tail_tol", 1e-12)
        tail_tol = _number(tail_tol, "config.probe.tail_tol")
        try:
            return coherent_state(alpha, tail_tol=tail_tol)
        except ParameterError as exc:
            raise ConfigError(f"config.probe.tail_tol: {exc}")
    raise ConfigError(f"config.probe.type: must be 'fock' or 'coherent', got {kind!r}")


def parse_sweep(cfg: dict, chain: ChainParams) -> list[float]:
    if "sweep" not in cfg:
        return [chain.lam]
    sweep = cfg["sweep"]
    if not isinstance(sweep, list) or not sweep:
        raise ConfigError("config.sweep: expected a non-empty list of lambda values")
    values = [_number(v, f"config.sweep[{i}]") for i, v in enumerate(sweep)]
    for i, v in enumerate(values):
        if v < 0.0:
            raise ConfigError(f"config.sweep[{i}]: lambda must be >= 0, got {v}")
    if len(set(values)) != len(values):
        raise ConfigError("config.sweep: duplicate lambda values")
    return values


def resolve_time_grid(cfg: dict, params: ChainParams, table, state) -> TimeGrid:
    section = cfg.get("time_grid", "auto")
    if section == "auto":
        return auto_time_grid(params, table, state)
    if not isinstance(section, dict):
        raise ConfigError("config.time_grid: expected 'auto' or an object")
    t_max = _number(_require(section, "t_max", "config.time_grid"), "config.time_grid.t_max")
    n_samples = _integer(
        _require(section, "n_samples", "config.time_grid"), "config.time_grid.n_samples"
    )
    if t_max <= 0.0:
        raise ConfigError(f"config.time_grid.t_max: must be > 0, got {t_max}")
    if n_samples < 2 or n_samples & (n_samples - 1):
        raise ConfigError(
            f"config.time_grid.n_samples: must be a power of two >= 2, got {n_samples}"
        )
    return TimeGrid(t_max=t_max, n_samples=n_samples, omega_estimate=None)


def _out_dir(cfg: dict, out_flag: str | None) -> Path:
    target = out_flag or cfg.get("output")
    if target is None:
        raise ConfigError("config.output: missing (or pass --out)")
    path = Path(target)
    try:
        path.mkdir(parents=True, exist_ok=True)
    except OSError as exc:
        raise ConfigError(f"cannot create output directory {path}: {exc}")
    return path


def _header_lines(cfg: dict, grid: TimeGrid | None = None) -> list[str]:
    lines = [
        f"# isingspec {__version__}",
        "# config " + json.dumps(cfg, separators=(",", ":"), sort_keys=True),
    ]
    if grid is not None:
        omega = "none" if grid.omega_estimate is None else _fmt(grid.omega_estimate)
        lines.append(
            f"# time_grid t_max={_fmt(grid.t_max)} n_samples={grid.n_samples} "
            f"omega_estimate={omega}"
        )
    return lines


def _write_csv(path: Path, header: list[str], columns: list[str], rows) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        for line in header:
            fh.write(line + "\n")
        fh.write(",".join(columns) + "\n")
        for row in rows:
            fh.write(",".join(_fmt(v) for v in row) + "\n")


def _write_json(path: Path, payload: dict) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        json.dump(payload, fh, indent=2)
        fh.write("\n")


def _meta(cfg: dict) -> dict:
    return {"tool": "isingspec", "version": __version__, "config": cfg}


def _threads(count: int) -> int:
    return count if count > 0 else (os.cpu_count() or 1)


def _lambda_tag(lam: float) -> str:
    return ("%g" % lam).replace("-", "m")


def _spectrum_job(params: ChainParams, state: ProbeState, grid_cfg, base_cfg):
    """Series, spectrum and metrics for one lambda; used by sweep workers."""
    table = build_mode_table(params, n_max=max(state.n_max, 1))
    grid = (
        auto_time_grid(params, table, state)
        if grid_cfg == "auto"
        else resolve_time_grid(base_cfg, params, table, state)
    )
    series = correlation_series(params, table, state, grid.t_max, grid.n_samples)
    spec = spectrum_fft(series)
    metrics = broadening_metrics(spec)
    return grid, series, spec, metrics


def _metrics_record(params: ChainParams, lam: float, metrics) -> dict:
    return {
        "lambda": lam,
        "w90": metrics.w90,
        "entropy": metrics.entropy,
        "participation": metrics.participation,
        "n": params.n_sites,
        "g_over_b": params.g_over_b,
        "gamma_over_b": params.gamma_over_b,
    }


def _run(action) -> None:
    try:
        action()
    except (ConfigError, ParameterError, DegenerateInputError) as exc:
        _fail(EXIT_CONFIG, str(exc))
    except CapacityError as exc:
        _fail(EXIT_CAPACITY, str(exc))
    except IsingSpecError as exc:
        _fail(EXIT_CONFIG, str(exc))


config_option = click.option(
    "--config", "config_path", required=True, type=click.Path(), help="JSON config file"
)
out_option = click.option("--out", "out_flag", default=None, help="output directory")
threads_option = click.option(
    "--threads", default=0, show_default=True, help="sweep workers (0 = auto)"
)


@click.group()
@click.version_option(version=__version__, prog_name="isingspec")
def main() -> None:
    """Spectroscopy of a transverse-field Ising chain through a lossy resonator."""


@main.command("dispersion")
@config_option
@out_option
def cmd_dispersion(config_path: str, out_flag: str | None) -> None:
    """Write (k, epsilon_k, theta_k) rows for the configured lambda."""

    def action() -> None:
        cfg = _load_config(config_path)
        chain = parse_chain(cfg)
        out = _out_dir(cfg, out_flag)
        k = momentum_grid(chain.n_sites)
        rows = zip(k, dispersion(k, chain.lam), bogoliubov_angle(k, chain.lam))
        path = out / "dispersion.csv"
        _write_csv(path, _header_lines(cfg), ["k", "epsilon", "theta"], rows)
        click.echo(str(path))

    _run(action)


@main.command("correlation")
@config_option
@out_option
@threads_option
def cmd_correlation(config_path: str, out_flag: str | None, threads: int) -> None:
    """Write S(t) series, one CSV per lambda in the sweep."""

    def action() -> None:
        cfg = _load_config(config_path)
        chain = parse_chain(cfg)
        state = parse_probe(cfg)
        sweep = parse_sweep(cfg, chain)
        out = _out_dir(cfg, out_flag)
        grid_cfg = cfg.get("time_grid", "auto")

        def job(lam: float):
            params = ChainParams(
                n_sites=chain.n_sites,
                lam=lam,
                g_over_b=chain.g_over_b,
                gamma_over_b=chain.gamma_over_b,
            )
            table = build_mode_table(params, n_max=max(state.n_max, 1))
            grid = (
                auto_time_grid(params, table, state)
                if grid_cfg == "auto"
                else resolve_time_grid(cfg, params, table, state)
            )
            series = correlation_series(params, table, state, grid.t_max, grid.n_samples)
            return grid, series

        with ThreadPoolExecutor(max_workers=_threads(threads)) as pool:
            results = list(pool.map(job, sweep))
        for lam, (grid, series) in zip(sweep, results):
            path = out / f"correlation_lambda_{_lambda_tag(lam)}.csv"
            rows = (
                (t, v.real, v.imag, abs(v)) for t, v in zip(series.times, series.values)
            )
            _write_csv(
                path,
                _header_lines(cfg, grid),
                ["t", "re_S", "im_S", "abs_S"],
                rows,
            )
            click.echo(str(path))

    _run(action)


@main.command("spectrum")
@config_option
@out_option
@threads_option
def cmd_spectrum(config_path: str, out_flag: str | None, threads: int) -> None:
    """Write S(omega) CSV and a metrics JSON, one pair per lambda."""

    def action() -> None:
        cfg = _load_config(config_path)
        chain = parse_chain(cfg)
        state = parse_probe(cfg)
        sweep = parse_sweep(cfg, chain)
        out = _out_dir(cfg, out_flag)
        grid_cfg = cfg.get("time_grid", "auto")

        def job(lam: float):
            params = ChainParams(
                n_sites=chain.n_sites,
                lam=lam,
                g_over_b=chain.g_over_b,
                gamma_over_b=chain.gamma_over_b,
            )
            return params, _spectrum_job(params, state, grid_cfg, cfg)

        with ThreadPoolExecutor(max_workers=_threads(threads)) as pool:
            results = list(pool.map(job, sweep))
        for lam, (params, (grid, _series, spec, metrics)) in zip(sweep, results):
            tag = _lambda_tag(lam)
            csv_path = out / f"spectrum_lambda_{tag}.csv"
            _write_csv(
                csv_path,
                _header_lines(cfg, grid),
                ["omega", "S"],
                zip(spec.frequencies, spec.values),
            )
            json_path = out / f"metrics_lambda_{tag}.json"
            _write_json(
                json_path,
                {
                    "meta": _meta(cfg),
                    "participation_normalization": "inverse participation ratio divided by grid size",
                    "metrics": _metrics_record(params, lam, metrics),
                },
            )
            click.echo(str(csv_path))
            click.echo(str(json_path))

    _run(action)


@main.command("sweep")
@config_option
@out_option
@threads_option
def cmd_sweep(config_path: str, out_flag: str | None, threads: int) -> None:
    """Run the lambda sweep and write one metrics record per value."""

    def action() -> None:
        cfg = _load_config(config_path)
        chain = parse_chain(cfg)
        state = parse_probe(cfg)
        if "sweep" not in cfg:
            raise ConfigError("config.sweep: required by the sweep command")
        sweep = parse_sweep(cfg, chain)
        out = _out_dir(cfg, out_flag)
        grid_cfg = cfg.get("time_grid", "auto")

        def job(lam: float):
            params = ChainParams(
                n_sites=chain.n_sites,
                lam=lam,
                g_over_b=chain.g_over_b,
                gamma_over_b=chain.gamma_over_b,
            )
            _grid, _series, _spec, metrics = _spectrum_job(params, state, grid_cfg, cfg)
            return _metrics_record(params, lam, metrics)

        with ThreadPoolExecutor(max_workers=_threads(threads)) as pool:
            records = list(pool.map(job, sweep))
        path = out / "sweep_metrics.json"
        _write_json(
            path,
            {
                "meta": _meta(cfg),
                "participation_normalization": "inverse participation ratio divided by grid size",
                "results": records,
            },
        )
        click.echo(str(path))

    _run(action)


@main.command("lines")
@config_option
@out_option
def cmd_lines(config_path: str, out_flag: str | None) -> None:
    """Write the exact (center, weight) line list per populated branch (small N)."""

    def action() -> None:
        cfg = _load_config(config_path)
        chain = parse_chain(cfg)
        state = parse_probe(cfg)
        out = _out_dir(cfg, out_flag)
        table = build_mode_table(chain, n_max=max(state.n_max, 1))
        weights = state.branch_weights()
        branches = [n for n in range(1, len(weights)) if weights[n] > 0.0] or [1]
        for n in branches:
            decomp = enumerate_lines(table, n)
            path = out / f"lines_branch_{n}.csv"
            header = _header_lines(cfg) + [
                f"# pruned_weight {_fmt(decomp.pruned_weight)} "
                f"pruned_abs_weight {_fmt(decomp.pruned_abs_weight)}"
            ]
            _write_csv(
                path,
                header,
                ["omega_center", "weight"],
                zip(decomp.centers, decomp.weights),
            )
            click.echo(str(path))

    _run(action)


@main.command("oracle-check")
@config_option
@out_option
def cmd_oracle_check(config_path: str, out_flag: str | None) -> None:
    """Run the dense-diagonalization comparison suite; exit 4 on deviation."""

    def action() -> None:
        cfg = _load_config(config_path)
        suite_cfg = cfg.get("oracle", {})
        if not isinstance(suite_cfg, dict):
            raise ConfigError("config.oracle: expected an object")
        kwargs = {}
        if "n_sites_list" in suite_cfg:
            kwargs["n_sites_list"] = [
                _integer(v, f"config.oracle.n_sites_list[{i}]")
                for i, v in enumerate(suite_cfg["n_sites_list"])
            ]
        if "lambdas" in suite_cfg:
            kwargs["lams"] = [
                _number(v, f"config.oracle.lambdas[{i}]")
                for i, v in enumerate(suite_cfg["lambdas"])
            ]
        if "g_over_bs" in suite_cfg:
            kwargs["g_over_bs"] = [
                _number(v, f"config.oracle.g_over_bs[{i}]")
                for i, v in enumerate(suite_cfg["g_over_bs"])
            ]
        if "tolerance" in suite_cfg:
            kwargs["tolerance"] = _number(
                suite_cfg["tolerance"], "config.oracle.tolerance"
            )
        report = comparison_suite(**kwargs)
        out = _out_dir(cfg, out_flag)
        path = out / "oracle_check.json"
        _write_json(path, {"meta": _meta(cfg), "report": report})
        click.echo(str(path))
        if not report["ok"]:
            _fail(
                EXIT_ORACLE,
                "oracle deviation: max echo deviation "
                f"{report['max_echo_deviation']:.3e}, max ground-energy deviation "
                f"{report['max_ground_energy_deviation']:.3e} "
                f"(tolerance {report['tolerance']:g})",
            )

    _run(action)


@main.command("params")
@config_option
@out_option
def cmd_params(config_path: str, out_flag: str | None) -> None:
    """Derive dimensionless chain parameters from lab-frame device values."""

    def action() -> None:
        cfg = _load_config(config_path)
        section = _require(cfg, "physical", "config")
        if not isinstance(section, dict):
            raise ConfigError("config.physical: expected an object")
        n_sites = _integer(_require(cfg, "n_sites", "config"), "config.n_sites")
        known = {
            "e_j",
            "c_sigma",
            "c_m",
            "tlr_length",
            "squid_area",
            "distance",
            "inductance_per_length",
            "omega",
            "flux_bias",
            "decay",
        }
        for key in section:
            if key not in known:
                raise ConfigError(f"config.physical.{key}: unknown field")
        values = {
            key: _number(value, f"config.physical.{key}") for key, value in section.items()
        }
        try:
            phys = PhysicalParams(**values)
        except TypeError as exc:
            raise ConfigError(f"config.physical: {exc}")
        except ParameterError as exc:
            raise ConfigError(f"config.physical: {exc}")
        try:
            params, report = derive_chain_params(phys, n_sites)
        except ParameterError as exc:
            raise ConfigError(f"config: {exc}")
        out = _out_dir(cfg, out_flag)
        path = out / "params.json"
        _write_json(
            path,
            {
                "meta": _meta(cfg),
                "chain": {
                    "n_sites": params.n_sites,
                    "lambda": params.lam,
                    "g_over_b": params.g_over_b,
                    "gamma_over_b": params.gamma_over_b,
                },
                "report": report,
            },
        )
        click.echo(str(path))

    _run(action)


if __name__ == "__main__":
    main()
