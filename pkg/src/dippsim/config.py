"""Flat ``key = value`` configuration files with ``[section]`` headers.

Grammar: blank lines and lines starting with '#' are ignored; a line of the
form ``[name]`` opens a section; every other line must read ``key = value``.
Keys are namespaced as ``section.key``.  List-valued settings hold
whitespace-separated tokens.  The recognized keys are listed in KNOWN_KEYS.
"""
from __future__ import annotations

from .experiment import ConfigError, ExperimentConfig

KNOWN_KEYS = frozenset(
    {
        "scenario.n", "scenario.j", "scenario.i", "scenario.l", "scenario.kind",
        "sweep.alphas", "sweep.smnr_db", "sweep.topology", "sweep.degrees",
        "sweep.q", "sweep.p_rewire",
        "sweep.matrix_realizations", "sweep.data_realizations", "sweep.algorithms",
        "run.seed", "run.output", "run.workers", "run.max_outer", "run.max_inner",
        "run.measure_runtime",
    }
)


def parse_config_file(path: str) -> dict[str, str]:
    values: dict[str, str] = {}
    section = ""
    with open(path) as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.strip()
            if not line or line.startswith("#"):
                continue
            if line.startswith("[") and line.endswith("]"):
                section = line[1:-1].strip()
                continue
            if "=" not in line:
                raise ConfigError(f"{path}:{lineno}: expected 'key = value', got {line!r}")
            key, value = (part.strip() for part in line.split("=", 1))
            full = f"{section}.{key}" if section else key
            if full not in KNOWN_KEYS:
                raise ConfigError(f"{path}:{lineno}: unknown key {full!r}")
            values[full] = value
    return values


def _get_int(values: dict[str, str], key: str) -> int | None:
    if key not in values:
        return None
    try:
        return int(values[key])
    except ValueError as exc:
        raise ConfigError(f"{key}: expected an integer, got {values[key]!r}") from exc


def _get_float(values: dict[str, str], key: str) -> float | None:
    if key not in values:
        return None
    try:
        return float(values[key])
    except ValueError as exc:
        raise ConfigError(f"{key}: expected a number, got {values[key]!r}") from exc


def parse_alphas(text: str) -> tuple[float, ...]:
    try:
        return tuple(float(tok) for tok in text.split())
    except ValueError as exc:
        raise ConfigError(f"bad alpha list {text!r}") from exc


def parse_smnrs(text: str) -> tuple[float | None, ...]:
    out: list[float | None] = []
    for tok in text.split():
        if tok == "clean":
            out.append(None)
        else:
            try:
                out.append(float(tok))
            except ValueError as exc:
                raise ConfigError(f"bad smnr value {tok!r}") from exc
    return tuple(out)


def parse_degrees(text: str) -> tuple[int, ...]:
    try:
        return tuple(int(tok) for tok in text.split())
    except ValueError as exc:
        raise ConfigError(f"bad degree list {text!r}") from exc


def parse_algorithms(text: str) -> tuple[str, ...]:
    return tuple(text.split())


def experiment_from_values(values: dict[str, str]) -> ExperimentConfig:
    """Build an ExperimentConfig from a flat key mapping, defaulting missing keys."""
    kwargs = {}
    mapping_int = {
        "scenario.n": "N", "scenario.j": "J", "scenario.i": "I", "scenario.l": "L",
        "sweep.q": "ws_q",
        "sweep.matrix_realizations": "matrix_realizations",
        "sweep.data_realizations": "data_realizations",
        "run.seed": "master_seed", "run.workers": "workers",
        "run.max_outer": "max_outer", "run.max_inner": "max_inner",
    }
    for key, attr in mapping_int.items():
        val = _get_int(values, key)
        if val is not None:
            kwargs[attr] = val
    if "scenario.kind" in values:
        kwargs["signal_kind"] = values["scenario.kind"]
    if "sweep.topology" in values:
        kwargs["topology_kind"] = values["sweep.topology"]
    if "sweep.alphas" in values:
        kwargs["alphas"] = parse_alphas(values["sweep.alphas"])
    if "sweep.smnr_db" in values:
        kwargs["smnr_dbs"] = parse_smnrs(values["sweep.smnr_db"])
    if "sweep.degrees" in values:
        kwargs["degrees"] = parse_degrees(values["sweep.degrees"])
    if "sweep.algorithms" in values:
        kwargs["algorithms"] = parse_algorithms(values["sweep.algorithms"])
    p = _get_float(values, "sweep.p_rewire")
    if p is not None:
        kwargs["ws_p_rewire"] = p
    if "run.measure_runtime" in values:
        kwargs["measure_runtime"] = values["run.measure_runtime"] not in ("0", "false", "no")
    try:
        return ExperimentConfig(**kwargs)
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc
