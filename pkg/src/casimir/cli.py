"""Batch command-line front end.

Subcommands: plates, thermal-sweep, pfa, gradient, spheres,
sphere-plate, casimir-polder, strip, half-plane.

Configuration may come from flags, from an INI-style file
(one section per subcommand, flat key = value lines), or both; flags
win over file values.  Unknown keys are rejected with their full path.

Units
-----
``natural`` (default): hbar = c = k_B = 1.  All lengths share one
arbitrary unit L0; frequencies and temperatures are in 1/L0; energies
come out in hbar*c/L0 (per area: hbar*c/L0^3, per length: hbar*c/L0^2).

``si-ev``: lengths in meters, temperatures in kelvin, material
frequencies in electron-volts (1 eV = 1.5192678e15 rad/s); outputs are
converted to joule-based units at the boundary.

Output is JSON (default, ``schema_version`` 1, no NaN/Inf -- failures
carry string diagnostics) or CSV with frozen per-subcommand columns,
written to stdout or ``--out``.  Exit codes: 0 success, 2 finished with
convergence warnings, 1 error.  ``CASIMIR_THREADS`` caps the linear
algebra thread pools.
"""

from __future__ import annotations

import argparse
import configparser
import json
import math
import os
import sys
import time
from dataclasses import dataclass, field

SCHEMA_VERSION = 1

# hbar*c in J*m and k_B/(hbar c) in (1/m)/K, used only in si-ev mode.
_HBAR_C_JM = 3.16152677e-26
_KELVIN_TO_INV_M = 436.70433
_EV_TO_INV_M = 5067730.7  # (e/hbar)/c

# quantity dimension per subcommand: power of 1/length of the natural result
_DIMENSION = {
    "plates": 3, "thermal-sweep": 3,
    "pfa": 1, "gradient": 1, "spheres": 1, "sphere-plate": 1,
    "casimir-polder": 1,
    "strip": 2, "half-plane": 2,
}

_SUBCOMMANDS = tuple(_DIMENSION)


@dataclass
class RunConfig:
    """Validated invocation: subcommand plus its parameter mapping."""

    subcommand: str
    params: dict
    output_format: str = "json"
    units: str = "natural"
    out_path: str | None = None

    def to_ini(self) -> str:
        """Canonical INI serialization; re-parsing yields an equal config."""
        cp = configparser.ConfigParser()
        cp["run"] = {
            "subcommand": self.subcommand,
            "output_format": self.output_format,
            "units": self.units,
        }
        cp[self.subcommand] = {
            k: _canon_str(v) for k, v in sorted(self.params.items())
        }
        import io

        buf = io.StringIO()
        cp.write(buf)
        return buf.getvalue()


def _canon_str(v) -> str:
    if isinstance(v, float):
        return repr(v)
    if isinstance(v, (list, tuple)):
        return ",".join(_canon_str(x) for x in v)
    return str(v)


# ---------------------------------------------------------------------------
# parameter schemas
# ---------------------------------------------------------------------------

def _float_list(text: str) -> tuple:
    return tuple(float(x) for x in text.split(",") if x.strip())


def _positive(name):
    def check(v, _p=name):
        if not v > 0:
            raise ValueError(f"{_p} must be > 0, got {v}")
    return check


def _tol_check(v):
    if not (0.0 < v <= 1e-2):
        raise ValueError(f"tol must be in (0, 1e-2], got {v}")


# name -> (parse, default, validator, help); default None means required
_SCHEMAS = {
    "plates": {
        "a": (float, None, _positive("a"), "plate separation"),
        "material_1": (str, "pec", None, "pec|vacuum|plasma:wp|drude:wp,g|constant:eps"),
        "material_2": (str, "pec", None, "second plate material"),
        "temperature": (float, 0.0, None, "temperature (0 = T=0 integral)"),
        "tol": (float, 1e-8, _tol_check, "quadrature tolerance"),
    },
    "thermal-sweep": {
        "a_values": (_float_list, None, None, "comma-separated separations"),
        "t_values": (_float_list, None, None, "comma-separated temperatures"),
        "material_1": (str, "pec", None, "first plate material"),
        "material_2": (str, "pec", None, "second plate material"),
        "tol": (float, 1e-8, _tol_check, "quadrature tolerance"),
    },
    "pfa": {
        "kind": (str, "EM", None, "boundary pair DD|NN|DN|ND|EM"),
        "r1": (float, None, _positive("r1"), "first radius"),
        "r2": (float, math.inf, None, "second radius (inf = plate)"),
        "d": (float, None, _positive("d"), "surface gap"),
    },
    "gradient": {
        "kind": (str, "EM", None, "boundary pair DD|NN|DN|ND|EM"),
        "profile_1": (str, None, None, "CSV height grid for surface 1"),
        "profile_2": (str, None, None, "CSV height grid for surface 2"),
    },
    "spheres": {
        "r1": (float, None, _positive("r1"), "first sphere radius"),
        "r2": (float, None, _positive("r2"), "second sphere radius"),
        "d_cc": (float, None, _positive("d_cc"), "center-to-center distance"),
        "bc": (str, "dirichlet", None, "dirichlet|neumann (both spheres)"),
        "l_max": (int, 16, _positive("l_max"), "partial-wave cutoff"),
        "tol": (float, 1e-6, _tol_check, "kappa-integral tolerance"),
    },
    "sphere-plate": {
        "r": (float, None, _positive("r"), "sphere radius"),
        "d_gap": (float, None, _positive("d_gap"), "surface gap"),
        "bc_sphere": (str, "dirichlet", None, "sphere boundary condition"),
        "bc_plate": (str, "dirichlet", None, "plate boundary condition"),
        "l_max": (int, 24, _positive("l_max"), "partial-wave cutoff"),
        "tol": (float, 1e-6, _tol_check, "kappa-integral tolerance"),
    },
    "casimir-polder": {
        "alpha1": (float, None, None, "polarizability of particle 1"),
        "alpha2": (float, None, None, "polarizability of particle 2"),
        "d": (float, None, _positive("d"), "separation"),
    },
    "strip": {
        "half_width": (float, None, _positive("half_width"), "strip half-width d"),
        "h": (float, None, _positive("h"), "strip-plane separation H"),
    },
    "half-plane": {
        "h": (float, None, _positive("h"), "half-plane to plane separation H"),
        "nu_max": (int, 12, _positive("nu_max"), "determinant truncation"),
        "tol": (float, 1e-9, _tol_check, "q-integral tolerance"),
    },
}

_EXAMPLES = {
    "plates": "casimir plates --a 1 --material-1 pec --material-2 pec",
    "thermal-sweep": "casimir thermal-sweep --a-values 1 --t-values 0.5,1 "
                     "--material-1 drude:10,0.01 --material-2 drude:10,0.01 --format csv",
    "pfa": "casimir pfa --kind EM --r1 10 --r2 inf --d 0.5",
    "gradient": "casimir gradient --kind DD --profile-1 flat.csv --profile-2 bump.csv",
    "spheres": "casimir spheres --r1 1 --r2 1 --d-cc 4 --bc dirichlet",
    "sphere-plate": "casimir sphere-plate --r 1 --d-gap 0.1 --l-max 30",
    "casimir-polder": "casimir casimir-polder --alpha1 1 --alpha2 1 --d 1",
    "strip": "casimir strip --half-width 5 --h 1",
    "half-plane": "casimir half-plane --h 1 --nu-max 12",
}


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="casimir",
        description="Casimir energies for canonical geometries "
                    "(natural units hbar = c = k_B = 1 by default).",
    )
    parser.add_argument("--version", action="store_true", help="print version and exit")
    sub = parser.add_subparsers(dest="subcommand")
    for name, schema in _SCHEMAS.items():
        p = sub.add_parser(
            name,
            help=f"{name} calculation",
            description=f"Example: {_EXAMPLES[name]}",
        )
        for key, (parse, default, _check, help_text) in schema.items():
            flag = "--" + key.replace("_", "-")
            suffix = "" if default is None else f" (default {default})"
            p.add_argument(flag, type=str, default=None, help=help_text + suffix)
        p.add_argument("--config", type=str, default=None,
                       help="INI file; flags override file values")
        p.add_argument("--format", dest="output_format", choices=("json", "csv"),
                       default=None, help="output format (default json)")
        p.add_argument("--units", choices=("natural", "si-ev"), default=None,
                       help="unit system (default natural)")
        p.add_argument("--out", type=str, default=None,
                       help="write output to this file instead of stdout")
    return parser


def parse_config(argv: list[str]) -> RunConfig:
    """Parse flags (and an optional INI file) into a validated RunConfig."""
    parser = _build_parser()
    ns = parser.parse_args(argv)
    if ns.version:
        from . import __version__

        print(__version__)
        raise SystemExit(0)
    if ns.subcommand is None:
        parser.print_help()
        raise SystemExit(1)
    schema = _SCHEMAS[ns.subcommand]

    file_values: dict = {}
    output_format = "json"
    units = "natural"
    if ns.config is not None:
        cp = configparser.ConfigParser()
        read = cp.read(ns.config)
        if not read:
            raise ValueError(f"config file not found: {ns.config}")
        if cp.has_section("run"):
            for key, value in cp.items("run"):
                if key == "subcommand":
                    if value != ns.subcommand:
                        raise ValueError(
                            f"run.subcommand = {value!r} does not match "
                            f"invoked subcommand {ns.subcommand!r}"
                        )
                elif key == "output_format":
                    output_format = value
                elif key == "units":
                    units = value
                else:
                    raise ValueError(f"unknown config key run.{key}")
        if cp.has_section(ns.subcommand):
            for key, value in cp.items(ns.subcommand):
                if key not in schema:
                    raise ValueError(f"unknown config key {ns.subcommand}.{key}")
                file_values[key] = value

    params: dict = {}
    for key, (parse, default, check, _help) in schema.items():
        raw = getattr(ns, key)
        if raw is None:
            raw = file_values.get(key)
        if raw is None:
            if default is None:
                raise ValueError(f"missing required parameter {ns.subcommand}.{key}")
            value = default
        else:
            try:
                value = parse(raw) if isinstance(raw, str) else raw
            except (TypeError, ValueError) as exc:
                raise ValueError(f"bad value for {ns.subcommand}.{key}: {raw!r}") from exc
        if check is not None and value is not None:
            try:
                check(value)
            except ValueError as exc:
                raise ValueError(f"{ns.subcommand}.{key}: {exc}") from exc
        params[key] = value

    if ns.output_format is not None:
        output_format = ns.output_format
    if ns.units is not None:
        units = ns.units
    if output_format not in ("json", "csv"):
        raise ValueError(f"output_format must be json or csv, got {output_format!r}")
    if units not in ("natural", "si-ev"):
        raise ValueError(f"units must be natural or si-ev, got {units!r}")
    return RunConfig(subcommand=ns.subcommand, params=params,
                     output_format=output_format, units=units, out_path=ns.out)


# ---------------------------------------------------------------------------
# execution
# ---------------------------------------------------------------------------

def _parse_material(text: str, units: str):
    from .materials import DielectricModel

    freq_scale = _EV_TO_INV_M if units == "si-ev" else 1.0
    kind, _, rest = text.partition(":")
    kind = kind.strip().lower()
    if kind in ("pec", "perfect", "perfect_conductor"):
        return DielectricModel.perfect_conductor()
    if kind == "vacuum":
        return DielectricModel.vacuum()
    if kind == "plasma":
        return DielectricModel.plasma(float(rest) * freq_scale)
    if kind == "drude":
        wp, _, g = rest.partition(",")
        return DielectricModel.drude(float(wp) * freq_scale, float(g) * freq_scale)
    if kind == "constant":
        return DielectricModel.constant(float(rest))
    raise ValueError(f"unknown material {text!r}")


def _load_profile(path: str):
    """CSV height grid: first line '# dx=<v> dy=<v>', then row-major heights."""
    import numpy as np

    from .pfa import SurfaceProfile

    with open(path, "r", encoding="utf-8") as fh:
        header = fh.readline().strip()
    if not header.startswith("#"):
        raise ValueError(f"{path}: first line must be '# dx=<val> dy=<val>'")
    fields = dict(
        item.split("=") for item in header.lstrip("# ").split() if "=" in item
    )
    try:
        dx, dy = float(fields["dx"]), float(fields["dy"])
    except KeyError as exc:
        raise ValueError(f"{path}: header is missing dx or dy") from exc
    heights = np.loadtxt(path, delimiter=",", comments="#", ndmin=2)
    return SurfaceProfile(heights=heights, dx=dx, dy=dy)


def _temperature_in(v: float, units: str) -> float:
    return v * _KELVIN_TO_INV_M if units == "si-ev" else v


def _dispatch(config: RunConfig) -> dict:
    """Run the physics; returns a dict of result fields in natural units."""
    p = dict(config.params)
    units = config.units
    name = config.subcommand

    if name == "plates":
        from .lifshitz import PlateConfig, plate_energy_t0, plate_free_energy

        cfg = PlateConfig(
            a=p["a"],
            model_1=_parse_material(p["material_1"], units),
            model_2=_parse_material(p["material_2"], units),
            temperature=_temperature_in(p["temperature"], units),
        )
        br = (plate_energy_t0(cfg, p["tol"]) if cfg.temperature == 0.0
              else plate_free_energy(cfg, p["tol"]))
        return {
            "results": {
                "total": br.total, "te": br.te, "tm": br.tm,
                "zero_mode_contribution": br.zero_mode_contribution,
            },
            "error_estimate": br.error_estimate,
            "convergence": {"evaluations": br.evaluations, "converged": br.converged},
            "warnings": [] if br.converged else ["quadrature tolerance not certified"],
        }

    if name == "thermal-sweep":
        from .thermal import ThermalSweep, thermal_sweep

        sweep = ThermalSweep(
            separations=p["a_values"],
            temperatures=tuple(_temperature_in(t, units) for t in p["t_values"]),
            model_1=_parse_material(p["material_1"], units),
            model_2=_parse_material(p["material_2"], units),
            tol=p["tol"],
        )
        rows = thermal_sweep(sweep)
        warnings = [r["error"] for r in rows if r["error"]]
        return {"results": {"rows": rows}, "error_estimate": None,
                "convergence": {"points": len(rows)}, "warnings": warnings}

    if name == "pfa":
        from .pfa import TwoSphereConfig, beta_table, gradient_corrected_two_spheres, pfa_two_spheres

        pair = beta_table(p["kind"])
        cfg = TwoSphereConfig(r1=p["r1"], r2=p["r2"], d=p["d"], pair=pair)
        leading = pfa_two_spheres(cfg)
        results = {"pfa_energy": leading}
        warnings = []
        if pair.beta_1 == pair.beta_2:
            results["gradient_corrected_energy"] = gradient_corrected_two_spheres(cfg)
        else:
            warnings.append("mixed boundary pair: no closed-form gradient correction")
        return {"results": results, "error_estimate": 0.0,
                "convergence": {}, "warnings": warnings}

    if name == "gradient":
        from .pfa import beta_table, gradient_expansion_energy

        pair = beta_table(p["kind"])
        prof1 = _load_profile(p["profile_1"])
        prof2 = _load_profile(p["profile_2"])
        import warnings as _warnings

        with _warnings.catch_warnings(record=True) as caught:
            _warnings.simplefilter("always")
            energy = gradient_expansion_energy(prof1, prof2, pair)
        return {"results": {"energy": energy}, "error_estimate": None,
                "convergence": {"grid": list(prof1.heights.shape)},
                "warnings": [str(w.message) for w in caught]}

    if name == "spheres":
        from .scattering import tgtg_energy_scalar

        res = tgtg_energy_scalar(p["r1"], p["r2"], p["d_cc"], p["bc"],
                                 l_max=p["l_max"], tol=p["tol"])
        return _energy_result_fields(res)

    if name == "sphere-plate":
        from .scattering import tgtg_energy_sphere_plate

        res = tgtg_energy_sphere_plate(p["r"], p["d_gap"], p["bc_sphere"],
                                       p["bc_plate"], l_max=p["l_max"], tol=p["tol"])
        return _energy_result_fields(res)

    if name == "casimir-polder":
        from .scattering import DipolePair, casimir_polder_energy, casimir_polder_quadrature

        pair = DipolePair(alpha_1=p["alpha1"], alpha_2=p["alpha2"], d=p["d"])
        closed = casimir_polder_energy(pair)
        quadr = casimir_polder_quadrature(pair)
        return {
            "results": {"energy": closed, "energy_quadrature": quadr},
            "error_estimate": abs(closed - quadr),
            "convergence": {}, "warnings": [],
        }

    if name == "strip":
        from .edges import StripConfig, strip_energy_per_length

        cfg = StripConfig(half_width=p["half_width"], separation=p["h"])
        return {"results": {"energy_per_length": strip_energy_per_length(cfg)},
                "error_estimate": None, "convergence": {}, "warnings": []}

    if name == "half-plane":
        from .edges import HalfPlaneConfig, halfplane_perp_energy

        cfg = HalfPlaneConfig(separation=p["h"], nu_max=p["nu_max"], tol=p["tol"])
        res = halfplane_perp_energy(cfg)
        return {
            "results": {"energy_per_length": res.energy_per_length,
                        "c_perp": res.c_perp},
            "error_estimate": res.truncation_spread + res.quadrature_error,
            "convergence": {
                "nu_max": res.nu_max,
                "truncation_spread": res.truncation_spread,
                "cutoff_sensitivity": res.cutoff_sensitivity,
            },
            "warnings": [],
        }

    raise ValueError(f"unknown subcommand {name!r}")


def _energy_result_fields(res) -> dict:
    return {
        "results": {"energy": res.value},
        "error_estimate": res.error_estimate,
        "convergence": {
            "l_max": res.l_max,
            "truncation_spread": res.truncation_spread,
            "kappa_evaluations": res.evaluations,
            "converged": res.converged,
        },
        "warnings": list(res.notes),
    }


def _si_factor(units: str) -> float:
    """Multiply natural results (1/m powers) into joule-based SI units.

    Values carry their geometric dimension in 1/m powers already, so a
    single factor hbar*c [J m] lands every quantity in its J-based unit
    (J, J/m or J/m^2).
    """
    return _HBAR_C_JM if units == "si-ev" else 1.0


def _sanitize(obj):
    """JSON-safe: no NaN/Inf leaves this function."""
    if isinstance(obj, float):
        if math.isnan(obj):
            return "nan"
        if math.isinf(obj):
            return "inf" if obj > 0 else "-inf"
        return obj
    if isinstance(obj, dict):
        return {k: _sanitize(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_sanitize(v) for v in obj]
    return obj


def _scale_results(fields: dict, factor: float) -> dict:
    out = {}
    for key, value in fields.items():
        if key == "rows":
            out[key] = [
                {k: (v * factor if k in ("F_per_A", "S_per_A") else v)
                 for k, v in row.items()}
                for row in value
            ]
        elif isinstance(value, (int, float)):
            out[key] = value * factor
        else:
            out[key] = value
    return out


def _render_csv(report: dict) -> str:
    sub = report["subcommand"]
    results = report["results"]
    if sub == "thermal-sweep":
        cols = ["a", "T", "F_per_A", "S_per_A", "zero_mode_share",
                "model_1", "model_2"]
        lines = [",".join(cols)]
        for row in results["rows"]:
            lines.append(",".join(_canon_str(row[c]) for c in cols))
        return "\n".join(lines) + "\n"
    cols = sorted(results)
    lines = [",".join(cols),
             ",".join(_canon_str(results[c]) for c in cols)]
    return "\n".join(lines) + "\n"


def run(config: RunConfig) -> tuple[dict, int]:
    """Execute a validated config; returns (report, exit_code)."""
    start = time.monotonic()
    from . import __version__

    fields = _dispatch(config)
    factor = _si_factor(config.units)
    results = _scale_results(fields["results"], factor)
    report = {
        "schema_version": SCHEMA_VERSION,
        "version": __version__,
        "subcommand": config.subcommand,
        "units": config.units,
        "inputs": {k: _canon_str(v) for k, v in sorted(config.params.items())},
        "results": results,
        "error_estimate": fields["error_estimate"],
        "convergence": fields["convergence"],
        "warnings": fields["warnings"],
        "wall_time_s": round(time.monotonic() - start, 6),
    }
    exit_code = 2 if fields["warnings"] else 0
    return report, exit_code


def _emit(report: dict, config: RunConfig) -> None:
    if config.output_format == "csv":
        text = _render_csv(_sanitize(report))
    else:
        text = json.dumps(_sanitize(report), sort_keys=True, indent=1,
                          allow_nan=False) + "\n"
    if config.out_path:
        with open(config.out_path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def main(argv: list[str] | None = None) -> int:
    threads = os.environ.get("CASIMIR_THREADS")
    if threads:
        for var in ("OMP_NUM_THREADS", "OPENBLAS_NUM_THREADS", "MKL_NUM_THREADS"):
            os.environ.setdefault(var, threads)
    try:
        config = parse_config(sys.argv[1:] if argv is None else argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    try:
        report, code = run(config)
    except (ValueError, RuntimeError, OverflowError, OSError) as exc:
        print(f"error: {config.subcommand}: {exc}", file=sys.stderr)
        return 1
    _emit(report, config)
    return code


if __name__ == "__main__":
    raise SystemExit(main())
