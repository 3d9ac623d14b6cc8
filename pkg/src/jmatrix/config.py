"""Run configuration: a single JSON document, shipped presets, validation.

The effective configuration is assembled in layers, later ones winning:
package defaults, then the selected preset (user file presets shadow the
shipped ones), then the user file's top-level values, then command-line
overrides. Unknown keys and out-of-range values are rejected with the
offending path.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from importlib import resources
from pathlib import Path

from .basis import ChannelSpec
from .deformation import DeformationSpec, build_deformation
from .errors import ConfigError
from .scattering import EnergyGrid, PotentialSpec, ScatterConfig

__all__ = ["RunConfig", "load_config", "builtin_presets", "config_to_dict"]

_CHANNEL_KEYS = {"lambda", "ell", "charge"}
_POTENTIAL_KEYS = {"v0", "power", "decay"}
_DEFORMATION_KEYS = {"kind", "mu", "mu_plus", "mu_minus", "mu_zero", "bridge_m"}
_GRID_KEYS = {"emin", "emax", "steps", "adaptive"}
_TOP_KEYS = {"channel", "potential", "deformation", "n_basis", "grid",
             "mode", "out", "format", "tol", "plot", "presets"}

_DEFORMATION_PARAMS = {
    "one_parameter": {"mu"},
    "block_three": {"mu_plus", "mu_minus", "mu_zero"},
    "bridge_three": {"mu_plus", "mu_minus", "mu_zero", "bridge_m"},
}


@dataclass(frozen=True)
class RunConfig:
    """Validated configuration for one CLI invocation."""

    channel: ChannelSpec
    potential: PotentialSpec
    deformation: DeformationSpec
    n_basis: int
    grid: EnergyGrid
    mode: str
    out: str | None
    fmt: str
    tol: float
    plot: str | None

    def scatter_config(self) -> ScatterConfig:
        return ScatterConfig(channel=self.channel, n_basis=self.n_basis,
                             potential=self.potential,
                             deformation=self.deformation)


def _package_document() -> dict:
    text = resources.files("jmatrix").joinpath("presets.json").read_text()
    return json.loads(text)


def builtin_presets() -> dict:
    """Names and raw dictionaries of the shipped presets."""
    return _package_document()["presets"]


def _reject_unknown(section: dict, allowed: set, path: str):
    for key in section:
        if key not in allowed:
            raise ConfigError(f"{path}{key}", "unknown key")


def _merge(base: dict, override: dict) -> dict:
    out = dict(base)
    for key, value in override.items():
        if key == "deformation" and isinstance(value, dict) and "kind" in value:
            # A kind switch resets the section; stale parameters from a
            # lower layer must not leak into the new family.
            out[key] = dict(value)
        elif isinstance(value, dict) and isinstance(out.get(key), dict):
            out[key] = _merge(out[key], value)
        else:
            out[key] = value
    return out


def _number(section: dict, key: str, path: str, cls=float):
    value = section[key]
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ConfigError(f"{path}{key}", f"expected a number, got {value!r}")
    if cls is int and int(value) != value:
        raise ConfigError(f"{path}{key}", f"expected an integer, got {value!r}")
    return cls(value)


def _build_channel(section: dict) -> ChannelSpec:
    _reject_unknown(section, _CHANNEL_KEYS, "channel.")
    try:
        return ChannelSpec(lam=_number(section, "lambda", "channel."),
                           ell=_number(section, "ell", "channel.", int),
                           charge=_number(section, "charge", "channel."))
    except ValueError as exc:
        raise ConfigError("channel", str(exc)) from exc


def _build_potential(section: dict) -> PotentialSpec:
    _reject_unknown(section, _POTENTIAL_KEYS, "potential.")
    try:
        return PotentialSpec(v0=_number(section, "v0", "potential."),
                             power=_number(section, "power", "potential.", int),
                             decay=_number(section, "decay", "potential."))
    except ValueError as exc:
        raise ConfigError("potential", str(exc)) from exc


def _build_deformation(section: dict) -> DeformationSpec:
    _reject_unknown(section, _DEFORMATION_KEYS, "deformation.")
    kind = section.get("kind")
    if kind not in _DEFORMATION_PARAMS:
        raise ConfigError("deformation.kind",
                          f"expected one of {sorted(_DEFORMATION_PARAMS)}, "
                          f"got {kind!r}")
    wanted = _DEFORMATION_PARAMS[kind]
    for key in section:
        if key != "kind" and key not in wanted:
            raise ConfigError(f"deformation.{key}",
                              f"not a parameter of kind {kind!r}")
    missing = [key for key in wanted if key not in section]
    if missing:
        raise ConfigError(f"deformation.{missing[0]}",
                          f"required by kind {kind!r}")
    params = {key: _number(section, key, "deformation.",
                           int if key == "bridge_m" else float)
              for key in wanted}
    if "bridge_m" in params:
        params["m"] = params.pop("bridge_m")
    try:
        return build_deformation(kind, **params)
    except ValueError as exc:
        raise ConfigError("deformation", str(exc)) from exc


def _build_grid(section: dict) -> EnergyGrid:
    _reject_unknown(section, _GRID_KEYS, "grid.")
    adaptive = section.get("adaptive", False)
    if not isinstance(adaptive, bool):
        raise ConfigError("grid.adaptive", f"expected a boolean, got {adaptive!r}")
    try:
        return EnergyGrid(emin=_number(section, "emin", "grid."),
                          emax=_number(section, "emax", "grid."),
                          steps=_number(section, "steps", "grid.", int),
                          adaptive=adaptive)
    except ValueError as exc:
        raise ConfigError("grid", str(exc)) from exc


def _build(document: dict) -> RunConfig:
    _reject_unknown(document, _TOP_KEYS - {"presets"}, "")
    for section in ("channel", "potential", "deformation", "grid"):
        if section not in document:
            raise ConfigError(section, "missing section")
        if not isinstance(document[section], dict):
            raise ConfigError(section, "expected an object")
    mode = document.get("mode", "full")
    if mode not in ("full", "truncated", "both"):
        raise ConfigError("mode", f"expected full, truncated or both, got {mode!r}")
    fmt = document.get("format", "csv")
    if fmt not in ("csv", "json"):
        raise ConfigError("format", f"expected csv or json, got {fmt!r}")
    out = document.get("out")
    if out is not None and not isinstance(out, str):
        raise ConfigError("out", f"expected a string path, got {out!r}")
    plot = document.get("plot")
    if plot is not None and not isinstance(plot, str):
        raise ConfigError("plot", f"expected a string path, got {plot!r}")
    if "n_basis" not in document:
        raise ConfigError("n_basis", "missing")
    channel = _build_channel(document["channel"])
    potential = _build_potential(document["potential"])
    deformation = _build_deformation(document["deformation"])
    grid = _build_grid(document["grid"])
    n_basis = _number(document, "n_basis", "", int)
    tol = _number(document, "tol", "") if "tol" in document else 1e-4
    if tol < 1e-6:
        raise ConfigError("tol", f"must be >= 1e-6, got {tol}")
    config = RunConfig(channel=channel, potential=potential,
                       deformation=deformation, n_basis=n_basis, grid=grid,
                       mode=mode, out=out, fmt=fmt, tol=tol, plot=plot)
    try:
        config.scatter_config()
    except Exception as exc:
        raise ConfigError("n_basis" if "support" in str(exc) else "channel",
                          str(exc)) from exc
    return config


def load_config(path: str | None = None, preset: str | None = None,
                overrides: dict | None = None) -> RunConfig:
    """Assemble and validate the effective configuration.

    Parameters
    ----------
    path : str, optional
        JSON document; its top-level values override the preset, and its
        own ``presets`` section shadows the shipped ones.
    preset : str, optional
        Name of a preset to start from.
    overrides : dict, optional
        Final layer, typically from command-line flags.
    """
    package = _package_document()
    document = dict(package["defaults"])
    user_doc: dict = {}
    if path is not None:
        try:
            user_doc = json.loads(Path(path).read_text())
        except FileNotFoundError as exc:
            raise ConfigError("config", f"cannot read {path}: {exc}") from exc
        except json.JSONDecodeError as exc:
            raise ConfigError("config", f"invalid JSON in {path}: {exc}") from exc
        if not isinstance(user_doc, dict):
            raise ConfigError("config", "top level must be an object")
        _reject_unknown(user_doc, _TOP_KEYS, "")
    if preset is not None:
        table = dict(package["presets"])
        table.update(user_doc.get("presets", {}))
        if preset not in table:
            raise ConfigError("preset", f"unknown preset {preset!r}; "
                              f"available: {', '.join(sorted(table))}")
        document = _merge(document, table[preset])
    top = {k: v for k, v in user_doc.items() if k != "presets"}
    document = _merge(document, top)
    if overrides:
        document = _merge(document, overrides)
    return _build(document)


def config_to_dict(config: RunConfig) -> dict:
    """Canonical dictionary form (the inverse of parsing)."""
    deformation: dict = {"kind": config.deformation.kind}
    values = {(i, j): v for i, j, v in config.deformation.entries}
    if config.deformation.kind == "one_parameter":
        deformation["mu"] = values[(0, 0)]
    elif config.deformation.kind == "block_three":
        deformation.update(mu_plus=values[(0, 0)], mu_minus=values[(1, 1)],
                           mu_zero=values[(0, 1)])
    elif config.deformation.kind == "bridge_three":
        m = config.deformation.support
        deformation.update(mu_plus=values[(0, 0)], mu_minus=values[(m, m)],
                           mu_zero=values[(0, m)], bridge_m=m)
    out = {
        "channel": {"lambda": config.channel.lam, "ell": config.channel.ell,
                    "charge": config.channel.charge},
        "potential": {"v0": config.potential.v0,
                      "power": config.potential.power,
                      "decay": config.potential.decay},
        "deformation": deformation,
        "n_basis": config.n_basis,
        "grid": {"emin": config.grid.emin, "emax": config.grid.emax,
                 "steps": config.grid.steps, "adaptive": config.grid.adaptive},
        "mode": config.mode,
        "format": config.fmt,
        "tol": config.tol,
    }
    if config.out is not None:
        out["out"] = config.out
    if config.plot is not None:
        out["plot"] = config.plot
    return out
