"""Command-line runner: ``semiwf <experiment> [flags]`` or ``semiwf run CONFIG``.

Config files are INI with sections ``[experiment]`` (``name``), ``[ladder]``,
``[detect]``, ``[run]`` and ``[params]``; see ``configs/`` for examples.
Every subcommand resolves to the same config dictionary, echoed in full
into the output together with a SHA-256 of the canonical result.

Exit codes: 0 verdict true, 2 verdict false, 1 error (including schema).
"""

from __future__ import annotations

import argparse
import configparser
import hashlib
import json
import os
import sys
import warnings
from pathlib import Path

import numpy as np

from semiwf import bounds
from semiwf.grid import AliasingWarning, hfourier_forward, hfourier_inverse, l2_norm
from semiwf.states import Window, coherent_state_fourier, wkb_catalog
from semiwf.families import CoherentFamily, WkbFamily
from semiwf.symbols import CATALOG, example1_symbol, example2_symbol, from_catalog
from semiwf.wavefront import HLadder, dumps, wf_scan, within_one_cell

THREADS_ENV = "SEMIWF_THREADS"
EXPERIMENTS = ("transform", "scan", "example1", "example2", "theorem1", "wkb", "bounds", "selftest")


class SchemaError(ValueError):
    pass


def _floats(s):
    return [float(v) for v in str(s).replace(" ", "").split(",") if v]


def _ints(s):
    return [int(v) for v in str(s).replace(" ", "").split(",") if v]


def _points(s):
    return [tuple(_floats(p)) for p in str(s).split(";") if p.strip()]


def _bool(s):
    v = str(s).strip().lower()
    if v in ("1", "true", "yes", "on"):
        return True
    if v in ("0", "false", "no", "off"):
        return False
    raise ValueError(f"not a boolean: {s!r}")


_T1 = {"radii": (_floats, "0.5,0.25"), "eps": (float, 0.1), "delta": (float, 0.0), "resolution": (int, 256),
       "rho": (float, 1.0), "quad_nodes": (int, 513)}

SCHEMA = {
    "experiment": {"name": (str, None)},
    "ladder": {"kmin": (int, 4), "kmax": (int, 14)},
    "detect": {"K_detect": (float, 5.0), "R_max": (float, 0.5)},
    "run": {"workers": (int, 1), "output": (str, "")},
}

PARAMS = {
    "transform": {"state": (str, "coherent"), "window": (str, "gaussian"), "rho": (float, 1.0), "x0": (float, 0.5),
                  "xi0": (float, -1.0), "wkb": (str, "real_quadratic"), "h": (float, 2.0**-8)},
    "scan": {"u": (str, "coherent"), "window": (str, "gaussian"), "rho": (float, 1.0), "x0": (float, 0.5),
             "xi0": (float, -1.0), "rect": (_floats, "-2,2,-2,2"), "counts": (_ints, "41,41")},
    "example1": dict(_T1),
    "example2": dict(_T1, radii=(_floats, "0.5,0.25,0.125,0.0625")),
    "theorem1": dict(_T1, symbol=(str, "phase_bump")),
    "wkb": {"name": (str, "real_quadratic"), "rect": (_floats, "-2,2,-2,2"), "counts": (_ints, "41,41"),
            "probes": (_points, "0,0"), "probe_window": (str, "gaussian"), "rho": (float, 1.0)},
    "bounds": {"recurrence": (int, 10), "dx": (float, 1e-3), "scaling": (_bool, "true")},
    "selftest": {"criteria": (_ints, "")},
}


def resolve(raw: dict) -> dict:
    """Validate a ``{section: {key: str}}`` mapping against the schema and fill defaults."""
    name = raw.get("experiment", {}).get("name")
    if name is None:
        raise SchemaError("experiment.name: missing")
    if name not in PARAMS:
        raise SchemaError(f"experiment.name: unknown experiment {name!r}; choose from {', '.join(EXPERIMENTS)}")
    schema = dict(SCHEMA, params=PARAMS[name])
    for sec in raw:
        if sec not in schema:
            raise SchemaError(f"{sec}: unknown section")
        for key in raw[sec]:
            if key not in schema[sec]:
                raise SchemaError(f"{sec}.{key}: unknown key")
    out = {}
    for sec, keys in schema.items():
        out[sec] = {}
        for key, (typ, default) in keys.items():
            val = raw.get(sec, {}).get(key, default)
            try:
                out[sec][key] = typ(val) if val is not None else None
            except (TypeError, ValueError) as exc:
                raise SchemaError(f"{sec}.{key}: {exc}") from None
    _check(out)
    return out


def _check(cfg: dict):
    p, name = cfg["params"], cfg["experiment"]["name"]
    lad = cfg["ladder"]
    if not 1 <= lad["kmin"] < lad["kmax"] - 2:
        raise SchemaError("ladder: need 1 <= kmin and at least 4 ladder values")
    if name in ("example1", "example2", "theorem1"):
        delta = p["delta"]
        if name == "theorem1":
            if p["symbol"] not in CATALOG:
                raise SchemaError(f"params.symbol: unknown symbol {p['symbol']!r}")
        bound = 0.5 * (0.5 - delta)
        if not 0 <= delta < 0.5:
            raise SchemaError("params.delta: must lie in [0, 1/2)")
        if not 0 < p["eps"] < bound:
            raise SchemaError(f"params.eps: must satisfy 0 < eps < (1/2)(1/2 - delta) = {bound:g}")
        if any(r <= 0 for r in p["radii"]) or any(b >= a for a, b in zip(p["radii"], p["radii"][1:])):
            raise SchemaError("params.radii: must be positive and strictly decreasing")
    if name in ("scan", "wkb"):
        if len(p["rect"]) != 4:
            raise SchemaError("params.rect: need x_lo,x_hi,xi_lo,xi_hi")
        if len(p["counts"]) != 2 or min(p["counts"]) < 1:
            raise SchemaError("params.counts: need two positive integers")


def load_config(path) -> dict:
    cp = configparser.ConfigParser(interpolation=None)
    cp.optionxform = str
    with open(path) as fh:
        cp.read_file(fh)
    return resolve({s: dict(cp[s]) for s in cp.sections()})


def _workers(cfg) -> int:
    env = os.environ.get(THREADS_ENV)
    return max(1, int(env)) if env else max(1, cfg["run"]["workers"])


def _ladder(cfg) -> HLadder:
    return HLadder.dyadic(cfg["ladder"]["kmin"], cfg["ladder"]["kmax"])


# -- experiment runners: each returns (verdict, result, extra_files) ------------

def _transform(cfg):
    p = cfg["params"]
    h = p["h"]
    if p["state"] == "coherent":
        w = Window(p["window"], p["rho"])
        u = CoherentFamily(w, p["x0"], p["xi0"])(h)
    else:
        u = WkbFamily(wkb_catalog(p["wkb"]))(h)
    v = hfourier_forward(u)
    n = l2_norm(u)
    res = {"num_points": u.grid.num_points, "half_width": u.grid.half_width,
           "unitarity_error": abs(l2_norm(v) - n) / n,
           "inversion_error": float(np.linalg.norm(hfourier_inverse(v).samples - u.samples) * np.sqrt(u.weight) / n)}
    ok = res["unitarity_error"] <= 1e-10 and res["inversion_error"] <= 1e-10
    if p["state"] == "coherent":
        ref = coherent_state_fourier(w, p["x0"], p["xi0"], h, u.grid).samples
        res["closed_form_error"] = float(np.linalg.norm(v.samples - ref) / np.linalg.norm(ref))
        ok = ok and res["closed_form_error"] <= 1e-8
    return ok, res, {}


def _scan(cfg):
    p, d = cfg["params"], cfg["detect"]
    rect, counts = tuple(p["rect"]), tuple(p["counts"])
    xc = max(abs(rect[0]), abs(rect[1]))
    xie = max(abs(rect[2]), abs(rect[3])) + 0.5
    w = Window("gaussian", p["rho"])
    if p["u"] == "coherent":
        fam = CoherentFamily(Window(p["window"], p["rho"]), p["x0"], p["xi0"], xi_extent=xie, x_cover=xc)
    else:
        fam = WkbFamily(wkb_catalog(p["u"]), xi_extent=xie + 0.5, x_cover=xc)
    res = wf_scan(fam, w, rect, counts, _ladder(cfg), d["K_detect"], d["R_max"], _workers(cfg))
    det = res.detected_points()
    if p["u"] == "coherent":
        dx = (rect[1] - rect[0]) / max(counts[0] - 1, 1)
        dxi = (rect[3] - rect[2]) / max(counts[1] - 1, 1)
        ok = bool(det) and within_one_cell(det, [(p["x0"], p["xi0"])], dx, dxi)
    else:
        ok = True
    return ok, res.to_json(), {"csv": res.to_csv()}


def _theorem1(cfg, a):
    from semiwf.theorem1 import Theorem1Config, theorem1_experiment

    p, d = cfg["params"], cfg["detect"]
    tc = Theorem1Config(radii=p["radii"], eps=p["eps"], resolution=p["resolution"], rho=p["rho"],
                        quad_nodes=p["quad_nodes"], K_detect=d["K_detect"], R_max=d["R_max"])
    rep = theorem1_experiment(a, _ladder(cfg), tc)
    out = rep.to_json()
    ok = rep.verdict
    if cfg["experiment"]["name"] == "example2":
        al = [e.alpha for e in rep.alpha_estimates]
        out["alpha_staircase"] = all(b > c for c, b in zip(al, al[1:]))
        ok = ok and out["alpha_staircase"]
    return ok, out, {}


def _wkb(cfg):
    from semiwf.appendix_wkb import WkbConfig, wkb_experiment

    p, d = cfg["params"], cfg["detect"]
    wc = WkbConfig(tuple(p["rect"]), tuple(p["counts"]), p["probes"], p["probe_window"], window_rho=p["rho"],
                   K_detect=d["K_detect"], R_max=d["R_max"], workers=_workers(cfg))
    rep = wkb_experiment(p["name"], wc, _ladder(cfg))
    return rep.verdicts["sandwich"], rep.to_json(), {}


def _bounds(cfg):
    p = cfg["params"]
    eps = bounds.epsilon_recurrence(p["recurrence"])
    ratios = bounds.catalog_ratios(p["dx"])
    fine = bounds.catalog_ratios(p["dx"] / 2)
    c1, c2 = max(ratios.values()), max(fine.values())
    res = {"epsilon": eps, "catalog_ratios": ratios, "C_emp": c1, "C_emp_refined": c2}
    ok = all(b < a for a, b in zip(eps, eps[1:])) and abs(c1 - c2) <= 1e-3
    if p["scaling"]:
        from semiwf.symbols import modulated_bump, phase_bump

        reps = [bounds.prop2_scaling_check(phase_bump(power=2.0), 2.0, _ladder(cfg)),
                bounds.prop2_scaling_check(phase_bump(power=2.0, delta=0.3), 2.0, _ladder(cfg)),
                bounds.prop2_scaling_check(modulated_bump(), 2.0, _ladder(cfg))]
        res["scaling"] = [r.as_dict() for r in reps]
        ok = ok and all(r.holds for r in reps)
    return ok, res, {}


def _selftest(cfg):
    from semiwf.acceptance import run_all

    results = run_all(cfg["params"]["criteria"] or None, echo=lambda s: print(s, file=sys.stderr))
    res = {"criteria": [{"number": r.number, "title": r.title, "passed": r.passed, "detail": r.detail} for r in results]}
    return all(r.passed for r in results), res, {}


def execute(cfg: dict):
    name = cfg["experiment"]["name"]
    if name == "transform":
        return _transform(cfg)
    if name == "scan":
        return _scan(cfg)
    if name == "example1":
        return _theorem1(cfg, example1_symbol())
    if name == "example2":
        return _theorem1(cfg, example2_symbol())
    if name == "theorem1":
        return _theorem1(cfg, from_catalog(cfg["params"]["symbol"]))
    if name == "wkb":
        return _wkb(cfg)
    if name == "bounds":
        return _bounds(cfg)
    return _selftest(cfg)


def content_hash(cfg: dict, result) -> str:
    blob = json.dumps({"config": cfg, "result": result}, sort_keys=True, default=str, separators=(",", ":"))
    return hashlib.sha256(blob.encode()).hexdigest()


def emit(cfg: dict, verdict: bool, result, extra: dict, stream=None) -> str:
    """Serialize ``{config, verdict, result, sha256}``; write to ``run.output`` when set."""
    result = json.loads(dumps(result))
    digest = content_hash(cfg, result)
    doc = dumps({"config": cfg, "verdict": bool(verdict), "result": result, "sha256": digest}) + "\n"
    csv_doc = None
    if "csv" in extra:
        csv_doc = f"# config: {json.dumps(cfg, sort_keys=True)}\n# sha256: {digest}\n" + extra["csv"]
    out = cfg["run"]["output"]
    if out:
        base = Path(out)
        base.parent.mkdir(parents=True, exist_ok=True)
        base.with_suffix(".json").write_text(doc)
        if csv_doc is not None:
            base.with_suffix(".csv").write_text(csv_doc)
    else:
        (stream or sys.stdout).write(csv_doc if csv_doc is not None else doc)
    return doc


def run_config(cfg: dict, stream=None) -> int:
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", AliasingWarning)
        verdict, result, extra = execute(cfg)
    emit(cfg, verdict, result, extra, stream)
    return 0 if verdict else 2


# -- argparse --------------------------------------------------------------

def _add_common(sp):
    sp.add_argument("--kmin", type=int, help="ladder starts at h = 2^-kmin")
    sp.add_argument("--kmax", type=int, help="ladder ends at h = 2^-kmax")
    sp.add_argument("--K-detect", dest="K_detect", type=float)
    sp.add_argument("--R-max", dest="R_max", type=float)
    sp.add_argument("--workers", type=int, help=f"thread count (overridden by ${THREADS_ENV})")
    sp.add_argument("--output", help="output path stem; .json (and .csv for scans) are written")


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="semiwf", description=__doc__.splitlines()[0])
    sub = ap.add_subparsers(dest="command", required=True)
    r = sub.add_parser("run", help="run an experiment described by an INI config file")
    r.add_argument("config")
    for name in EXPERIMENTS:
        sp = sub.add_parser(name, help=f"run the {name} experiment")
        _add_common(sp)
        for key, (typ, default) in PARAMS[name].items():
            flag = "--" + key.replace("_", "-")
            sp.add_argument(flag, dest=f"p_{key}", help=f"default: {default}")
    return ap


def _raw_from_args(args) -> dict:
    raw = {"experiment": {"name": args.command}, "params": {}}
    for sec, keys in (("ladder", ("kmin", "kmax")), ("detect", ("K_detect", "R_max")), ("run", ("workers", "output"))):
        for k in keys:
            v = getattr(args, k, None)
            if v is not None:
                raw.setdefault(sec, {})[k] = v
    for k, v in vars(args).items():
        if k.startswith("p_") and v is not None:
            raw["params"][k[2:]] = v
    return raw


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = load_config(args.config) if args.command == "run" else resolve(_raw_from_args(args))
    except (OSError, configparser.Error, SchemaError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    try:
        return run_config(cfg)
    except Exception as exc:  # noqa: BLE001 - any failure inside an experiment maps to exit code 1
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
