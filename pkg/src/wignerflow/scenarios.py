"""Scenario configuration, figure presets and the output-writing runner."""

from __future__ import annotations

import copy
import hashlib
import io
import json
import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from datetime import datetime, timezone
from pathlib import Path

import numpy as np
import yaml

from . import __version__
from .current import inversion_detect, continuity_residual, velocity, wigner_and_current
from .flowlines import portrait
from .fock import (
    DEFAULT_LEAKAGE_BOUND,
    apply_beam_splitter,
    make_coherent,
    make_fock,
    make_squeezed_vacuum,
    product_state,
    reflectivity_to_tau,
    tau_to_reflectivity,
)
from .gaussian import (
    evolve_moments,
    product_moments,
    reduced_current,
    reduced_wigner,
    single_mode_coherent,
    single_mode_squeezed,
)
from .observables import FIELDS, sweep
from .wigner import PhaseSpaceGrid

__all__ = [
    "ConfigError",
    "StateSpec",
    "Outputs",
    "ScenarioConfig",
    "PRESETS",
    "list_presets",
    "preset_config",
    "load_config",
    "apply_overrides",
    "run",
]

OUTPUT_ENV = "WIGNERFLOW_OUTPUT_DIR"
STATE_KINDS = ("fock", "coherent", "squeezed")


class ConfigError(ValueError):
    """Invalid scenario configuration; the message names the offending field."""


def _require(cond, where, msg):
    if not cond:
        raise ConfigError(f"{where}: {msg}")


def _number(value, where):
    try:
        out = float(value)
    except (TypeError, ValueError):
        raise ConfigError(f"{where}: expected a number, got {value!r}") from None
    _require(math.isfinite(out), where, f"expected a finite number, got {value!r}")
    return out


def _integer(value, where, minimum=0):
    _require(
        isinstance(value, (int, np.integer)) and not isinstance(value, bool),
        where,
        f"expected an integer, got {value!r}",
    )
    _require(value >= minimum, where, f"must be >= {minimum}, got {value}")
    return int(value)


@dataclass(frozen=True)
class StateSpec:
    kind: str
    cutoff: int
    n: int = 0
    alpha: complex = 0j
    z: float = 0.0
    theta: float = 0.0

    @classmethod
    def from_dict(cls, d, where):
        _require(isinstance(d, dict), where, "expected a mapping")
        kind = d.get("kind")
        _require(kind in STATE_KINDS, f"{where}.kind", f"must be one of {STATE_KINDS}, got {kind!r}")
        allowed = {"kind", "cutoff", {"fock": "n", "coherent": "alpha", "squeezed": "z"}[kind]}
        if kind == "squeezed":
            allowed.add("theta")
        extra = set(d) - allowed
        _require(not extra, where, f"unexpected keys {sorted(extra)} for kind {kind!r}")
        _require("cutoff" in d, f"{where}.cutoff", "missing")
        cutoff = _integer(d["cutoff"], f"{where}.cutoff")
        if kind == "fock":
            n = _integer(d.get("n"), f"{where}.n")
            _require(n <= cutoff, f"{where}.n", f"exceeds cutoff {cutoff}")
            return cls(kind, cutoff, n=n)
        if kind == "coherent":
            a = d.get("alpha")
            _require(
                isinstance(a, (list, tuple)) and len(a) == 2,
                f"{where}.alpha",
                "expected [re, im]",
            )
            return cls(kind, cutoff, alpha=complex(_number(a[0], f"{where}.alpha[0]"), _number(a[1], f"{where}.alpha[1]")))
        z = _number(d.get("z"), f"{where}.z")
        _require(z >= 0, f"{where}.z", "must be >= 0")
        return cls(kind, cutoff, z=z, theta=_number(d.get("theta", 0.0), f"{where}.theta"))

    def to_dict(self):
        out = {"kind": self.kind, "cutoff": self.cutoff}
        if self.kind == "fock":
            out["n"] = self.n
        elif self.kind == "coherent":
            out["alpha"] = [self.alpha.real, self.alpha.imag]
        else:
            out["z"] = self.z
            out["theta"] = self.theta
        return out

    def build(self, leakage_bound):
        if self.kind == "fock":
            return make_fock(self.n, self.cutoff)
        if self.kind == "coherent":
            return make_coherent(self.alpha, self.cutoff, leakage_bound)
        return make_squeezed_vacuum(self.z, self.theta, self.cutoff, leakage_bound)

    @property
    def gaussian(self):
        return self.kind in ("coherent", "squeezed")

    def moments(self):
        if self.kind == "coherent":
            return single_mode_coherent(self.alpha)
        if self.kind == "squeezed":
            return single_mode_squeezed(self.z, self.theta)
        raise ValueError("Fock states are not Gaussian")


@dataclass(frozen=True)
class Outputs:
    currents: bool = True
    velocity: bool = True
    field_lines: bool = True
    observables: bool = True
    continuity: bool = False
    gaussian_check: bool = False
    inversion: bool = True

    @classmethod
    def from_dict(cls, d):
        _require(isinstance(d, dict), "outputs", "expected a mapping")
        names = set(cls.__dataclass_fields__)
        extra = set(d) - names
        _require(not extra, "outputs", f"unknown toggles {sorted(extra)}")
        for k, v in d.items():
            _require(isinstance(v, bool), f"outputs.{k}", f"expected true/false, got {v!r}")
        return cls(**d)

    def to_dict(self):
        return {k: getattr(self, k) for k in self.__dataclass_fields__}


@dataclass(frozen=True)
class ScenarioConfig:
    name: str
    a: StateSpec
    b: StateSpec
    taus: tuple
    grid: PhaseSpaceGrid = field(default_factory=PhaseSpaceGrid)
    description: str = ""
    reflectivities: tuple | None = None
    leakage_bound: float = DEFAULT_LEAKAGE_BOUND
    n_total: int | None = None
    modes: tuple = ("a", "b")
    outputs: Outputs = field(default_factory=Outputs)
    dtau: float = 1e-3
    field_line_density: int = 8
    field_lines_max: int = 16
    workers: int = 1

    @classmethod
    def from_dict(cls, d):
        _require(isinstance(d, dict), "config", "expected a mapping")
        known = {
            "name", "description", "states", "taus", "reflectivities", "grid", "leakage_bound",
            "n_total", "modes", "outputs", "dtau", "field_line_density", "field_lines_max", "workers",
        }
        extra = set(d) - known
        _require(not extra, "config", f"unknown keys {sorted(extra)}")
        name = d.get("name", "scenario")
        _require(isinstance(name, str) and name, "name", "expected a non-empty string")
        states = d.get("states")
        _require(isinstance(states, dict), "states", "expected a mapping with exactly 'a' and 'b'")
        _require(set(states) == {"a", "b"}, "states", f"need exactly two input states 'a' and 'b', got {sorted(states)}")
        a = StateSpec.from_dict(states["a"], "states.a")
        b = StateSpec.from_dict(states["b"], "states.b")
        has_t, has_r = d.get("taus") is not None, d.get("reflectivities") is not None
        _require(not (has_t and has_r), "taus", "give either taus or reflectivities, not both")
        if has_r:
            refl = d["reflectivities"]
            _require(isinstance(refl, (list, tuple)), "reflectivities", "expected a list")
            refl = tuple(_number(r, f"reflectivities[{i}]") for i, r in enumerate(refl))
            for i, r in enumerate(refl):
                _require(0 <= r <= 1, f"reflectivities[{i}]", f"must lie in [0, 1], got {r}")
            taus = tuple(reflectivity_to_tau(r) for r in refl)
        else:
            raw = d.get("taus") or []
            _require(isinstance(raw, (list, tuple)), "taus", "expected a list")
            taus = tuple(_number(t, f"taus[{i}]") for i, t in enumerate(raw))
            for i, t in enumerate(taus):
                _require(0 <= t <= 1, f"taus[{i}]", f"must lie in [0, 1], got {t}")
            refl = None
        _require(len(taus) > 0, "taus", "no evaluation points")
        grid_d = d.get("grid", {})
        _require(isinstance(grid_d, dict), "grid", "expected a mapping")
        try:
            grid = PhaseSpaceGrid.from_dict(grid_d)
        except (TypeError, ValueError) as exc:
            raise ConfigError(f"grid: {exc}") from None
        _require(grid.nx >= 3 and grid.np_ >= 3, "grid", "need at least 3 points per axis")
        leak = _number(d.get("leakage_bound", DEFAULT_LEAKAGE_BOUND), "leakage_bound")
        _require(0 < leak <= 1, "leakage_bound", "must lie in (0, 1]")
        n_total = d.get("n_total")
        if n_total is not None:
            n_total = _integer(n_total, "n_total")
        modes = tuple(d.get("modes", ("a", "b")))
        _require(modes and set(modes) <= {"a", "b"} and len(set(modes)) == len(modes), "modes", f"expected a subset of ['a', 'b'], got {list(modes)}")
        outputs = Outputs.from_dict(d.get("outputs", {}))
        dtau = _number(d.get("dtau", 1e-3), "dtau")
        _require(0 < dtau < 0.5, "dtau", "must lie in (0, 0.5)")
        density = _integer(d.get("field_line_density", 8), "field_line_density", 1)
        lines_max = _integer(d.get("field_lines_max", 16), "field_lines_max", 0)
        workers = _integer(d.get("workers", 1), "workers", 1)
        if outputs.gaussian_check:
            _require(a.gaussian and b.gaussian, "outputs.gaussian_check", "needs two Gaussian input states")
        return cls(
            name=name, a=a, b=b, taus=taus, grid=grid, description=str(d.get("description", "")),
            reflectivities=refl, leakage_bound=leak, n_total=n_total, modes=modes, outputs=outputs,
            dtau=dtau, field_line_density=density, field_lines_max=lines_max, workers=workers,
        )

    def to_dict(self):
        out = {
            "name": self.name,
            "description": self.description,
            "states": {"a": self.a.to_dict(), "b": self.b.to_dict()},
        }
        if self.reflectivities is not None:
            out["reflectivities"] = list(self.reflectivities)
        else:
            out["taus"] = list(self.taus)
        out.update(
            grid=self.grid.to_dict(),
            leakage_bound=self.leakage_bound,
            n_total=self.n_total,
            modes=list(self.modes),
            outputs=self.outputs.to_dict(),
            dtau=self.dtau,
            field_line_density=self.field_line_density,
            field_lines_max=self.field_lines_max,
            workers=self.workers,
        )
        return out


_ROWS = "Rows at reflectivities 25%, 50% and 75% (assumed values, override with reflectivities=[...])."

PRESETS = {
    "fig1": {
        "name": "fig1",
        "description": "Coherent state |alpha = 4i/sqrt2> with single photon |1>, mixed at 34.5% reflectivity.",
        "states": {
            "a": {"kind": "coherent", "alpha": [0.0, 4.0 / math.sqrt(2.0)], "cutoff": 30},
            "b": {"kind": "fock", "n": 1, "cutoff": 1},
        },
        "reflectivities": [0.345],
    },
    "fig2": {
        "name": "fig2",
        "description": "Two single photons |1>|1> (Hong-Ou-Mandel). " + _ROWS,
        "states": {
            "a": {"kind": "fock", "n": 1, "cutoff": 1},
            "b": {"kind": "fock", "n": 1, "cutoff": 1},
        },
        "reflectivities": [0.25, 0.5, 0.75],
    },
    "fig3": {
        "name": "fig3",
        "description": (
            "Two squeezed vacua |z=2, theta=0>|z=2, theta=-pi/3>, checked against the Gaussian "
            "closed forms. Cutoff 60 truncates about 3.4% of each input's probability, hence the "
            "relaxed leakage bound. " + _ROWS
        ),
        "states": {
            "a": {"kind": "squeezed", "z": 2.0, "theta": 0.0, "cutoff": 60},
            "b": {"kind": "squeezed", "z": 2.0, "theta": -math.pi / 3, "cutoff": 60},
        },
        "reflectivities": [0.25, 0.5, 0.75],
        "leakage_bound": 0.05,
        "outputs": {"gaussian_check": True},
    },
    "fig4": {
        "name": "fig4",
        "description": "Three-photon Fock state |3> with squeezed vacuum |z=1.2, theta=0>. " + _ROWS,
        "states": {
            "a": {"kind": "fock", "n": 3, "cutoff": 3},
            "b": {"kind": "squeezed", "z": 1.2, "theta": 0.0, "cutoff": 100},
        },
        "reflectivities": [0.25, 0.5, 0.75],
    },
    "fig5": {
        "name": "fig5",
        "description": "Three-photon Fock state |3> with coherent state |alpha = 2(1+i)/sqrt2>. " + _ROWS,
        "states": {
            "a": {"kind": "fock", "n": 3, "cutoff": 3},
            "b": {"kind": "coherent", "alpha": [math.sqrt(2.0), math.sqrt(2.0)], "cutoff": 25},
        },
        "reflectivities": [0.25, 0.5, 0.75],
    },
}


def list_presets():
    """(name, description) pairs in figure order."""
    return [(name, PRESETS[name]["description"]) for name in sorted(PRESETS)]


def preset_dict(name):
    if name not in PRESETS:
        raise ConfigError(f"unknown preset {name!r}; valid presets: {', '.join(sorted(PRESETS))}")
    return copy.deepcopy(PRESETS[name])


def preset_config(name, overrides=()):
    return ScenarioConfig.from_dict(apply_overrides(preset_dict(name), overrides))


def load_config(path, overrides=()):
    try:
        with open(path) as fh:
            data = yaml.safe_load(fh)
    except OSError as exc:
        raise ConfigError(f"config: cannot read {path}: {exc}") from None
    except yaml.YAMLError as exc:
        raise ConfigError(f"config: invalid YAML in {path}: {exc}") from None
    return ScenarioConfig.from_dict(apply_overrides(data or {}, overrides))


def apply_overrides(d, overrides):
    """Apply ``key.sub=value`` strings; values are parsed as YAML scalars."""
    d = copy.deepcopy(d)
    for item in overrides:
        if "=" not in item:
            raise ConfigError(f"override {item!r}: expected key=value")
        key, raw = item.split("=", 1)
        parts = key.strip().split(".")
        try:
            value = yaml.safe_load(raw)
        except yaml.YAMLError:
            raise ConfigError(f"override {key}: cannot parse value {raw!r}") from None
        node = d
        for p in parts[:-1]:
            node = node.setdefault(p, {})
            if not isinstance(node, dict):
                raise ConfigError(f"override {key}: {p} is not a mapping")
        node[parts[-1]] = value
        if parts == ["taus"]:
            d.pop("reflectivities", None)
        elif parts == ["reflectivities"]:
            d.pop("taus", None)
    return d


# ---------------------------------------------------------------- output files

def _fmt(values):
    return [v if isinstance(v, str) else "%.17g" % v for v in values]


def _grid_header(kind, grid, extra):
    lines = [f"# wignerflow {kind}"]
    for k, v in extra.items():
        lines.append(f"# {k}: {v}")
    for k, v in grid.to_dict().items():
        lines.append(f"# {k}: {v!r}")
    return lines


def _grid_csv(kind, grid, columns, arrays, extra):
    X, P = grid.mesh()
    buf = io.StringIO()
    buf.write("\n".join(_grid_header(kind, grid, extra)) + "\n")
    buf.write(",".join(["x", "p", *columns]) + "\n")
    data = np.column_stack([X.ravel(), P.ravel()] + [a.ravel() for a in arrays])
    np.savetxt(buf, data, fmt="%.17g", delimiter=",")
    return buf.getvalue()


def _rows_csv(header, rows):
    buf = io.StringIO()
    buf.write(",".join(header) + "\n")
    for row in rows:
        buf.write(",".join(_fmt(row) if not isinstance(row, dict) else _fmt([row[h] for h in header])) + "\n")
    return buf.getvalue()


def _evaluate_point(cfg, psi0, gm, index, tau):
    """All per-tau results for one evaluation point (pure computation)."""
    psi = apply_beam_splitter(psi0, tau)
    meta = {"tau": repr(tau), "reflectivity": repr(tau_to_reflectivity(tau))}
    out = []
    for mode in cfg.modes:
        files = {}
        stats = {}
        w, j = wigner_and_current(psi, mode, cfg.grid, tau)
        tag = f"tau{index:02d}_{mode}"
        extra = {**meta, "mode": mode}
        files[f"{tag}_wigner.csv"] = _grid_csv("scalar field", cfg.grid, ["value"], [w.values], {"meaning": "wigner-distribution", **extra})
        if cfg.outputs.currents:
            files[f"{tag}_current.csv"] = _grid_csv("vector field", cfg.grid, ["jx", "jp"], [j.jx, j.jp], {"meaning": "wigner-current", **extra})
        singular = None
        if cfg.outputs.velocity:
            v = velocity(j, w)
            singular = v.singular_mask()
            files[f"{tag}_velocity.csv"] = _grid_csv(
                "vector field", cfg.grid, ["wx", "wp"], [v.wx, v.wp],
                {"meaning": "velocity", "threshold": repr(v.threshold), **extra},
            )
            gx, gp = cfg.grid.x, cfg.grid.p
            rows = [
                (i, k, 0.5 * (gx[i] + gx[i + 1]), 0.5 * (gp[k] + gp[k + 1])) for i, k in v.singular_cells
            ]
            files[f"{tag}_singular_cells.csv"] = _rows_csv(["i", "j", "x_centre", "p_centre"], rows)
            stats["singular_cells"] = len(rows)
        if cfg.outputs.field_lines:
            lines = portrait(j, cfg.field_line_density, cfg.field_lines_max, singular=singular)
            payload = {"tau": tau, "mode": mode, "lines": [ln.to_dict() for ln in lines]}
            files[f"{tag}_fieldlines.json"] = json.dumps(payload, indent=1, sort_keys=True) + "\n"
        if cfg.outputs.inversion:
            stats["inversion"] = inversion_detect(j, w).as_dict()
        if cfg.outputs.continuity:
            # the central tau difference needs room on both sides
            centre = min(max(tau, cfg.dtau), 1.0 - cfg.dtau)
            res = continuity_residual(lambda t: apply_beam_splitter(psi0, t), mode, cfg.grid, centre, cfg.dtau)
            stats["continuity"] = {"tau": centre, "dtau": cfg.dtau, "max_abs": res.max_abs, "l2": res.l2, "rate_scale": res.rate_scale}
        if gm is not None:
            g = evolve_moments(gm, tau)
            wg = reduced_wigner(g, mode, cfg.grid).values
            jg = reduced_current(g, mode, cfg.grid)
            stats["gaussian_check"] = {
                "w_max_abs": float(np.max(np.abs(w.values - wg))),
                "j_max_abs": float(max(np.max(np.abs(j.jx - jg.jx)), np.max(np.abs(j.jp - jg.jp)))),
            }
        out.append((mode, files, stats))
    return index, tau, out


def _sha256(data):
    return hashlib.sha256(data).hexdigest()


def run(cfg, out_dir):
    """Run a scenario and write every output plus ``manifest.json``.

    Returns the manifest as a dict.  Data files never carry timestamps;
    the manifest's ``created`` field is the only one.
    """
    out_dir = Path(out_dir)
    a_in = cfg.a.build(cfg.leakage_bound)
    b_in = cfg.b.build(cfg.leakage_bound)
    psi0 = product_state(a_in, b_in, cfg.n_total)
    gm = None
    if cfg.outputs.gaussian_check:
        gm = product_moments(cfg.a.moments(), cfg.b.moments())

    jobs = list(enumerate(cfg.taus))
    if cfg.workers > 1:
        with ThreadPoolExecutor(cfg.workers) as pool:
            results = list(pool.map(lambda it: _evaluate_point(cfg, psi0, gm, *it), jobs))
    else:
        results = [_evaluate_point(cfg, psi0, gm, *it) for it in jobs]
    results.sort(key=lambda r: r[0])

    out_dir.mkdir(parents=True, exist_ok=True)
    written = []

    def emit(name, text):
        data = text.encode()
        (out_dir / name).write_bytes(data)
        written.append({"path": name, "bytes": len(data), "sha256": _sha256(data)})

    summary = []
    for index, tau, per_mode in results:
        for mode, files, stats in per_mode:
            for name in sorted(files):
                emit(name, files[name])
            summary.append({"index": index, "tau": tau, "mode": mode, **stats})
    if cfg.outputs.continuity:
        rows = [
            (s["index"], s["mode"], s["tau"], s["continuity"]["tau"], s["continuity"]["dtau"], s["continuity"]["max_abs"], s["continuity"]["l2"], s["continuity"]["rate_scale"])
            for s in summary
        ]
        emit("continuity.csv", _rows_csv(["index", "mode", "tau", "tau_centre", "dtau", "max_abs", "l2", "rate_scale"], rows))
    if gm is not None:
        rows = [(s["index"], s["mode"], s["tau"], s["gaussian_check"]["w_max_abs"], s["gaussian_check"]["j_max_abs"]) for s in summary]
        emit("gaussian_check.csv", _rows_csv(["index", "mode", "tau", "w_max_abs", "j_max_abs"], rows))
    if cfg.outputs.observables:
        records = sweep(a_in, b_in, cfg.taus, cfg.grid, cfg.n_total)
        emit("observables.csv", _rows_csv(list(FIELDS), [r.as_dict() for r in records]))
    emit("summary.json", json.dumps(summary, indent=1, sort_keys=True) + "\n")

    manifest = {
        "wignerflow_version": __version__,
        "created": datetime.now(timezone.utc).isoformat(timespec="seconds"),
        "config": cfg.to_dict(),
        "taus": list(cfg.taus),
        "leakage": {"a": a_in.leakage, "b": b_in.leakage, "two_mode": psi0.leakage},
        "files": written,
    }
    (out_dir / "manifest.json").write_text(json.dumps(manifest, indent=1, sort_keys=True) + "\n")
    return manifest


def default_output_dir(name):
    base = os.environ.get(OUTPUT_ENV)
    return Path(base) / name if base else Path("wignerflow-output") / name
