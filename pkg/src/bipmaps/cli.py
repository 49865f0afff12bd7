"""Command-line front end.

Every command reads an optional JSON config, fills in defaults, validates
the result against a schema and writes:

* ``config.json``: the resolved config, which reproduces the run when passed
  back with ``--config``;
* ``<command>.<ext>``: the data artifact, headed by the config and the
  package version.

Outputs contain no timestamps or host data, so a rerun from the emitted
config gives byte-identical files.  Sample ``k`` always draws from stream
``k`` of the seed, so ``--jobs`` changes the speed and nothing else.
"""
from __future__ import annotations

import argparse
import copy
import functools
import json
import math
import os
import sys
from concurrent.futures import ProcessPoolExecutor

import jsonschema
import numpy as np

from . import __version__
from .errors import CapacityError, CertificationError, ConfigError, PhaseError
from .rng import RngStream
from .weights import FaceWeights, laws_for, power_law_with_kappa

EXIT_OK, EXIT_CONFIG, EXIT_CAPACITY, EXIT_STAT = 0, 2, 3, 4

COMMANDS = ("analyze-weights", "sample-tree", "sample-mobile", "sample-map", "limit-ball", "walk",
            "spectral-run", "resistance-run", "verify", "export-dot")

FORMATS = {
    "analyze-weights": ("json", "tsv"),
    "sample-tree": ("json",),
    "sample-mobile": ("json",),
    "sample-map": ("json", "dot"),
    "limit-ball": ("json", "dot"),
    "walk": ("json", "tsv"),
    "spectral-run": ("json", "tsv"),
    "resistance-run": ("json", "tsv"),
    "verify": ("json",),
    "export-dot": ("dot",),
}

DEFAULTS = {
    "analyze-weights": {"n_pi": 10},
    "sample-tree": {"n": 20, "count": 1},
    "sample-mobile": {"n": 20, "count": 1},
    "sample-map": {"n": 20, "count": 1},
    "limit-ball": {"radius": 4, "count": 1},
    "walk": {"radius": 8, "count": 1, "walkers": 1000, "steps": 64},
    "spectral-run": {"maps": 10, "walkers": 1000, "fit_window": [128, 4096], "min_vertices": 10000,
                     "points": 24},
    "resistance-run": {"radii": [4, 8], "count": 10, "lambda": 20.0, "pairs": 0},
    "verify": {"suites": ["bijection", "measure", "counting"], "max_n": 5, "max_map_n": 4},
    "export-dot": {"n": 10, "index": 0},
}

_POS = {"type": "integer", "minimum": 1}
SCHEMA = {
    "type": "object",
    "properties": {
        "command": {"enum": list(COMMANDS)},
        "seed": {"type": "integer", "minimum": 0, "maximum": 2**64 - 1},
        "format": {"enum": ["json", "tsv", "dot"]},
        "weights": {
            "type": "object",
            "required": ["family"],
            "properties": {"family": {"enum": ["explicit", "power_law", "geometric", "factorial",
                                               "power_law_kappa"]}},
        },
        "n": _POS, "count": _POS, "radius": _POS, "walkers": _POS, "steps": _POS, "maps": _POS,
        "min_vertices": _POS, "points": {"type": "integer", "minimum": 2}, "n_pi": _POS,
        "max_n": {"type": "integer", "minimum": 1, "maximum": 5},
        "max_map_n": {"type": "integer", "minimum": 1, "maximum": 4},
        "index": {"type": "integer", "minimum": 0},
        "pairs": {"type": "integer", "minimum": 0},
        "lambda": {"type": "number", "exclusiveMinimum": 1},
        "fit_window": {"type": "array", "items": _POS, "minItems": 2, "maxItems": 2},
        "radii": {"type": "array", "items": _POS, "minItems": 1},
        "suites": {"type": "array", "items": {"enum": ["bijection", "measure", "counting"]}, "minItems": 1},
        "input": {"type": "string"},
    },
    "additionalProperties": False,
}


# ----------------------------------------------------------------------------
# config handling


def _pointer(path) -> str:
    return "/" + "/".join(str(p) for p in path) if path else ""


def resolve_config(command: str, raw: dict | None, seed: int | None, fmt: str | None) -> dict:
    """Defaults, overrides and schema validation; raises :class:`ConfigError`."""
    cfg = {"command": command, "seed": 0, "weights": {"family": "geometric", "a": 1, "b": 1}}
    cfg.update(copy.deepcopy(DEFAULTS[command]))
    if raw is not None:
        if not isinstance(raw, dict):
            raise ConfigError("config must be a JSON object", "")
        if raw.get("command", command) != command:
            raise ConfigError(f"config is for {raw['command']!r}, not {command!r}", "/command")
        cfg.update(copy.deepcopy(raw))
    if seed is not None:
        cfg["seed"] = seed
    if fmt is not None:
        cfg["format"] = fmt
    cfg.setdefault("format", FORMATS[command][0])
    errs = sorted(jsonschema.Draft202012Validator(SCHEMA).iter_errors(cfg), key=lambda e: list(e.absolute_path))
    if errs:
        e = errs[0]
        raise ConfigError(e.message, _pointer(e.absolute_path) or "/")
    if cfg["format"] not in FORMATS[command]:
        raise ConfigError(f"{command} writes {', '.join(FORMATS[command])}", "/format")
    if command == "spectral-run" and cfg["fit_window"][0] >= cfg["fit_window"][1]:
        raise ConfigError("fit window must be increasing", "/fit_window")
    face_weights(cfg["weights"])
    return cfg


def face_weights(wcfg: dict) -> FaceWeights:
    try:
        if wcfg.get("family") == "power_law_kappa":
            extra = set(wcfg) - {"family", "kappa", "beta"}
            if extra:
                raise ConfigError(f"unknown key {sorted(extra)[0]!r}", f"/{sorted(extra)[0]}")
            if "kappa" not in wcfg or "beta" not in wcfg:
                raise ConfigError("power_law_kappa needs kappa and beta", "/kappa" if "kappa" not in wcfg else "/beta")
            return power_law_with_kappa(float(wcfg["kappa"]), float(wcfg["beta"]))
        return FaceWeights.from_config(wcfg)
    except ConfigError as exc:
        ptr = "/weights" + (exc.pointer or "")
        msg = str(exc).split(": ", 1)[-1] if exc.pointer else str(exc)
        raise ConfigError(msg, ptr) from None


@functools.lru_cache(maxsize=8)
def _laws(wjson: str):
    return laws_for(face_weights(json.loads(wjson)))


def laws_of(cfg: dict):
    return _laws(json.dumps(cfg["weights"], sort_keys=True))


def _stream(cfg: dict, k: int) -> RngStream:
    return RngStream(cfg["seed"], 0).derive(k)


def _jsonable(x):
    if isinstance(x, (np.integer,)):
        return int(x)
    if isinstance(x, (np.floating,)):
        return float(x)
    if isinstance(x, np.ndarray):
        return x.tolist()
    if isinstance(x, np.bool_):
        return bool(x)
    raise TypeError(f"cannot serialise {type(x).__name__}")


def _finite(x):
    """Non-finite floats become the strings ``inf``, ``-inf`` and ``nan``."""
    if isinstance(x, float) and not math.isfinite(x):
        return repr(x)
    if isinstance(x, dict):
        return {k: _finite(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_finite(v) for v in x]
    return x


def dumps(obj) -> str:
    obj = json.loads(json.dumps(obj, default=_jsonable))
    return json.dumps(_finite(obj), sort_keys=True, separators=(",", ":"), allow_nan=False)


# ----------------------------------------------------------------------------
# per-sample tasks (top level so that worker processes can run them)


def _task_tree(cfg, k):
    from .samplers import sample_sgt_n
    return sample_sgt_n(laws_of(cfg), cfg["n"], _stream(cfg, k)).to_records()


def _task_mobile(cfg, k):
    from .samplers import sample_mobile_n
    return sample_mobile_n(laws_of(cfg), cfg["n"], _stream(cfg, k)).to_record()


def _task_map(cfg, k):
    from .samplers import sample_map_n
    pm = sample_map_n(laws_of(cfg), cfg["n"], _stream(cfg, k))
    return pm.to_dot(f"map{k}") if cfg["format"] == "dot" else pm.to_record()


def _task_ball(cfg, k):
    from .samplers import limit_ball
    pm = limit_ball(laws_of(cfg), cfg["radius"], _stream(cfg, k)).ball
    return pm.to_dot(f"ball{k}") if cfg["format"] == "dot" else pm.to_record()


def _task_walk(cfg, k):
    from .samplers import limit_ball
    from .walks import BallTooSmall, run_srw
    st = _stream(cfg, k)
    r = cfg["radius"]
    while True:
        ball = limit_ball(laws_of(cfg), r, st.derive(0)).ball
        try:
            ws = run_srw(ball, cfg["steps"], cfg["walkers"], st.derive(1))
            break
        except BallTooSmall:
            if r > cfg["steps"]:
                raise
            r *= 2
    return ws.returns_at, ws.walker_count, ws.steps_total, ws.max_excursion


def _task_spectral(cfg, k):
    from .walks import spectral_map
    lo, hi = cfg["fit_window"]
    res = spectral_map(laws_of(cfg), cfg["seed"], k, cfg["walkers"], (lo, hi), cfg["min_vertices"], cfg["points"])
    return res


def _task_resistance(cfg, k):
    from .resistance import certified_star_structure, geosup_pairs, j_lambda, shorting_check
    rmax = max(cfg["radii"])
    st = _stream(cfg, k)
    try:
        ss = certified_star_structure(laws_of(cfg), rmax, st.derive(0))
    except (CapacityError, CertificationError) as exc:
        return {"sample": k, "error": type(exc).__name__, "message": str(exc)}
    rows = []
    for R in sorted(cfg["radii"]):
        om = ss.omega(R)
        sh = shorting_check(ss, R)
        jl = j_lambda(ss, R, cfg["lambda"])
        rows.append({"R": R, "omega": om, "omega_over_R2": om / R**2, "star_ball": ss.star_ball_size(R),
                     "reff_map": sh["reff_map"], "reff_projected": sh["reff_projected"], "shorting_holds": sh["holds"],
                     "vol_lower": jl.vol_lower, "vol_upper": jl.vol_upper, "res_lower": jl.res_lower,
                     "res_upper": jl.res_upper})
    out = {"sample": k, "vertices": ss.pm.n_vertices, "chunks": list(ss.window_chunks), "radii": rows}
    if cfg["pairs"]:
        out["geosup"] = geosup_pairs(ss, rmax, cfg["pairs"], st.derive(1))
    return out


def _run_tasks(fn, cfg, count, jobs):
    if jobs <= 1 or count <= 1:
        return [fn(cfg, k) for k in range(count)]
    with ProcessPoolExecutor(max_workers=jobs) as ex:
        return list(ex.map(fn, [cfg] * count, range(count)))


# ----------------------------------------------------------------------------
# commands; each returns (summary, artifact_text, exit_code)


def _header(cfg) -> dict:
    return {"bipmaps": __version__, "config": cfg}


def _ndjson(cfg, records) -> str:
    return "\n".join([dumps(_header(cfg))] + [dumps(r) for r in records]) + "\n"


def _tsv(cfg, columns, rows) -> str:
    lines = [f"# bipmaps {__version__} config={dumps(cfg)}", "\t".join(columns)]
    for r in rows:
        lines.append("\t".join(_fmt(r[c]) for c in columns))
    return "\n".join(lines) + "\n"


def _fmt(x) -> str:
    if isinstance(x, (bool, np.bool_)):
        return "1" if x else "0"
    if x is None:
        return "NA"
    if isinstance(x, (float, np.floating)):
        return repr(float(x))
    return str(x)


def _dot(cfg, graphs) -> str:
    return f"// bipmaps {__version__} config={dumps(cfg)}\n" + "".join(graphs)


def cmd_analyze(cfg, jobs):
    laws = laws_of(cfg)
    summ = laws.summary(cfg["n_pi"])
    summ["weights"] = face_weights(cfg["weights"]).to_config()
    if cfg["format"] == "tsv":
        rows = [{"i": i, "pi": p} for i, p in enumerate(summ["pi"])]
        art = _tsv(cfg, ["i", "pi"], rows)
    else:
        art = dumps({**_header(cfg), "result": summ}) + "\n"
    return summ, art, EXIT_OK


def _sampling(fn):
    def cmd(cfg, jobs):
        recs = _run_tasks(fn, cfg, cfg["count"], jobs)
        art = _dot(cfg, recs) if cfg["format"] == "dot" else _ndjson(cfg, recs)
        return {"written": len(recs)}, art, EXIT_OK
    return cmd


def cmd_walk(cfg, jobs):
    res = _run_tasks(_task_walk, cfg, cfg["count"], jobs)
    ret = sum(r[0] for r in res)
    walkers = sum(r[1] for r in res)
    p = ret / walkers
    rows = [{"n": n, "time": 2 * n, "returns": int(ret[n]), "p_hat": float(p[n]),
             "stderr": float(math.sqrt(p[n] * (1 - p[n]) / walkers))} for n in range(len(ret))]
    summ = {"walkers": walkers, "maps": len(res), "max_excursion": max(r[3] for r in res)}
    if cfg["format"] == "tsv":
        art = _tsv(cfg, ["n", "time", "returns", "p_hat", "stderr"], rows)
    else:
        art = dumps({**_header(cfg), "result": {**summ, "returns": rows}}) + "\n"
    return summ, art, EXIT_OK


def cmd_spectral(cfg, jobs):
    from .walks import spectral_ensemble
    lo, hi = cfg["fit_window"]
    res = _run_tasks(_task_spectral, cfg, cfg["maps"], jobs)
    ens = spectral_ensemble(None, cfg["maps"], cfg["walkers"], cfg["seed"], (lo, hi), cfg["min_vertices"],
                            cfg["points"], results=res)
    summ = ens.to_dict()
    summ["d_s"] = summ["fit"]["ds_estimate"]
    summ["per_map_ds"] = ens.per_map_ds.tolist()
    if cfg["format"] == "tsv":
        rows = [{"map": k, "ds": r["ds"], "vertices": r["size"], "radius": r["radius"]} for k, r in enumerate(res)]
        art = _tsv(cfg, ["map", "ds", "vertices", "radius"], rows)
    else:
        p = ens.pooled.p_hat
        summ_full = {**summ, "pooled_p": p.tolist()}
        art = dumps({**_header(cfg), "result": summ_full}) + "\n"
    return summ, art, EXIT_OK


def cmd_resistance(cfg, jobs):
    res = _run_tasks(_task_resistance, cfg, cfg["count"], jobs)
    ok = [r for r in res if "error" not in r]
    summ = {"samples": len(res), "failed": len(res) - len(ok), "median_omega_over_R2": {}}
    for R in sorted(cfg["radii"]):
        vals = [row["omega_over_R2"] for r in ok for row in r["radii"] if row["R"] == R]
        summ["median_omega_over_R2"][str(R)] = float(np.median(vals)) if vals else None
    summ["shorting_violations"] = sum(not row["shorting_holds"] for r in ok for row in r["radii"])
    summ["note"] = ("resistances are computed on a finite certified window; the complement of the ball "
                    "is merged into one node")
    if cfg["format"] == "tsv":
        cols = ["sample", "R", "omega", "omega_over_R2", "star_ball", "reff_map", "reff_projected",
                "shorting_holds", "vol_lower", "vol_upper", "res_lower", "res_upper"]
        rows = [{"sample": r["sample"], **row} for r in ok for row in r["radii"]]
        art = _tsv(cfg, cols, rows)
    else:
        art = _ndjson(cfg, res)
    return summ, art, EXIT_OK


def cmd_verify(cfg, jobs):
    from .oracle import bijection_suite, counting_suite, measure_suite
    reports = []
    for name in cfg["suites"]:
        if name == "bijection":
            reports.append(bijection_suite(cfg["max_n"]))
        elif name == "measure":
            reports.append(measure_suite(cfg["max_map_n"]))
        else:
            reports.append(counting_suite())
    summ = {"ok": all(r.ok for r in reports), "suites": [r.to_dict() for r in reports]}
    art = dumps({**_header(cfg), "result": summ}) + "\n"
    return summ, art, EXIT_OK if summ["ok"] else EXIT_STAT


def cmd_export_dot(cfg, jobs):
    from .bdg import PlanarMap
    if "input" in cfg:
        try:
            with open(cfg["input"], encoding="utf-8") as fh:
                lines = [ln for ln in fh.read().splitlines() if ln.strip()]
        except OSError as exc:
            raise ConfigError(f"cannot read input: {exc.strerror}", "/input") from None
        recs = [json.loads(ln) for ln in lines]
        recs = [r for r in recs if "bipmaps" not in r]
        if cfg["index"] >= len(recs):
            raise ConfigError(f"input holds {len(recs)} maps", "/index")
        pm = PlanarMap.from_record(recs[cfg["index"]])
    else:
        from .samplers import sample_map_n
        pm = sample_map_n(laws_of(cfg), cfg["n"], _stream(cfg, cfg["index"]))
    art = _dot(cfg, [pm.to_dot("map")])
    return {"vertices": pm.n_vertices, "edges": pm.n_edges}, art, EXIT_OK


HANDLERS = {
    "analyze-weights": cmd_analyze,
    "sample-tree": _sampling(_task_tree),
    "sample-mobile": _sampling(_task_mobile),
    "sample-map": _sampling(_task_map),
    "limit-ball": _sampling(_task_ball),
    "walk": cmd_walk,
    "spectral-run": cmd_spectral,
    "resistance-run": cmd_resistance,
    "verify": cmd_verify,
    "export-dot": cmd_export_dot,
}

EXT = {"json": "json", "tsv": "tsv", "dot": "dot"}


def _ext(cmd, fmt):
    if fmt == "json" and cmd in ("sample-tree", "sample-mobile", "sample-map", "limit-ball", "resistance-run"):
        return "ndjson"
    return EXT[fmt]


# ----------------------------------------------------------------------------
# entry point


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="bipmaps", description="Random bipartite planar maps: sample, walk, measure.")
    p.add_argument("--version", action="version", version=f"bipmaps {__version__}")
    sub = p.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        sp = sub.add_parser(name)
        sp.add_argument("--config", metavar="PATH", help="JSON run config")
        sp.add_argument("--seed", type=int, metavar="U64", help="overrides the config seed")
        sp.add_argument("--out", metavar="DIR", help="directory for config.json and the data file")
        sp.add_argument("--jobs", type=int, default=1, metavar="N", help="worker processes")
        sp.add_argument("--format", choices=["json", "tsv", "dot"])
    return p


def run(argv=None, stdout=None) -> int:
    stdout = stdout or sys.stdout
    args = build_parser().parse_args(argv)
    try:
        raw = None
        if args.config:
            try:
                with open(args.config, encoding="utf-8") as fh:
                    raw = json.load(fh)
            except OSError as exc:
                raise ConfigError(f"cannot read config: {exc.strerror}", "") from None
            except json.JSONDecodeError as exc:
                raise ConfigError(f"invalid JSON at line {exc.lineno}: {exc.msg}", "") from None
        if args.jobs < 1:
            raise ConfigError("--jobs must be at least 1", "/jobs")
        cfg = resolve_config(args.command, raw, args.seed, args.format)
        summary, artifact, code = HANDLERS[args.command](cfg, args.jobs)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (CapacityError, CertificationError, PhaseError) as exc:
        print(f"{type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_CAPACITY
    if args.out:
        os.makedirs(args.out, exist_ok=True)
        with open(os.path.join(args.out, "config.json"), "w", encoding="utf-8") as fh:
            fh.write(json.dumps(cfg, sort_keys=True, indent=2) + "\n")
        with open(os.path.join(args.out, f"{args.command}.{_ext(args.command, cfg['format'])}"), "w",
                  encoding="utf-8") as fh:
            fh.write(artifact)
        stdout.write(dumps({"command": args.command, "exit": code, "summary": summary}) + "\n")
    else:
        stdout.write(artifact)
    return code


def main(argv=None) -> None:
    sys.exit(run(argv))


if __name__ == "__main__":
    main()
