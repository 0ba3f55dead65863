"""Experiment runner: `qdc <kind> [--config cfg.json] [--set k=v] ...`.

Every experiment is driven by a single JSON config (CLI flags override
individual keys), runs deterministically for a given (config, seed), and
emits CSV with '#'-prefixed metadata lines plus an optional JSON sidecar.
See docs/formats.md for the per-kind schemas.
"""
from __future__ import annotations

import argparse
import json
import os
import sys
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import __version__, acceptance, cmaybe, infotheory, spinmodel
from .cmaybe import CMaybeParams
from .errors import ConfigError, QdcError
from .measurement import tilted_basis

SNAP = 1e-10  # reported values this close to 0 are emitted as 0


def _snap(x: float) -> float:
    return 0.0 if abs(x) < SNAP else float(x)


@dataclass
class ExperimentConfig:
    kind: str
    params: dict = field(default_factory=dict)
    seed: int = 0
    threads: int | None = None


@dataclass
class ResultTable:
    columns: list[str]
    rows: list[dict]
    metadata: dict


DEFAULTS = {
    "cmaybe-scan": {
        "n": 20,
        "p": [0.1, 0.3, 0.5],
        "s": [0.1, 0.3, 0.5, 0.8],
        "m": None,  # defaults to 0..n
    },
    "cmaybe-consensus": {
        "n": 100,
        "p": [0.5],
        "s": [0.3, 0.8],
        "m": None,  # m = m' sweep, defaults to 0..n//2
    },
    "holevo-tilt": {
        "n": 100,
        "p": [0.5],
        "s": [0.3, 0.8],
        "m": [1, 2, 3, 4, 5, 6, 8, 10, 15, 20],
        "mu": [0.0, np.pi / 12, np.pi / 4],
    },
    "spin-evolve": {
        "n": 16,
        "delta_d": 1.0,
        "delta_g": 0.01,
        "times": None,  # defaults to a log grid over [0.05, 500]
        "m": [4],
        "mu": [0.0, np.pi / 4],
        "delta_target": 0.1,
        "n_real": 1,
        "quantum_cmi": False,
    },
    "pip": {
        "n": 16,
        "delta_d": 1.0,
        "delta_g": 0.01,
        "times": [1.0, 10.0, 100.0],
        "sizes": None,  # defaults to 0..n
        "sampler": "contiguous",
        "k_samples": 8,
    },
    "redundancy": {
        "n": 16,
        "delta_d": 1.0,
        "delta_g": 0.01,
        "times": None,
        "delta": 0.1,
    },
    "theorem1": {"n_states": 100, "d_s": [2, 3, 4]},
    "lemma1": {"n_states": 100, "d_s": [2, 3, 4]},
    "theorem2-stress": {"n_states": 50, "n_povms": 5},
}


def _threads(config: ExperimentConfig) -> int:
    if config.threads:
        return config.threads
    env = os.environ.get("QDC_THREADS")
    if env:
        return int(env)
    return os.cpu_count() or 1


def _pmap(fn, items, n_threads: int):
    """Fork-join map with deterministic output ordering."""
    if n_threads <= 1 or len(items) <= 1:
        return [fn(item) for item in items]
    with ThreadPoolExecutor(max_workers=n_threads) as pool:
        return list(pool.map(fn, items))


def _log_grid():
    return [float(t) for t in np.geomspace(0.05, 500.0, 24)]


def _validate(config: ExperimentConfig) -> dict:
    if config.kind not in DEFAULTS:
        raise ConfigError(f"unknown experiment kind {config.kind!r}")
    params = dict(DEFAULTS[config.kind])
    unknown = set(config.params) - set(params)
    if unknown:
        raise ConfigError(f"unknown config keys {sorted(unknown)}")
    params.update(config.params)
    if "times" in params:
        if params["times"] is None:
            params["times"] = _log_grid()
        if len(params["times"]) == 0:
            raise ConfigError("times must be nonempty")
    return params


# ---------------------------------------------------------------------------
# experiment kinds


def _run_cmaybe_scan(params: dict, seed: int, n_threads: int) -> list[dict]:
    n = params["n"]
    ms = params["m"] if params["m"] is not None else list(range(n + 1))
    rows = []
    for p in params["p"]:
        for s in params["s"]:
            cp = CMaybeParams(n, p, s)
            h_s = cmaybe._h_lambda(n, p, s)
            for m in ms:
                i_sf = cmaybe.mi_sf_exact(cp, m)
                rows.append(
                    {
                        "n": n,
                        "p": p,
                        "s": s,
                        "m": m,
                        "h_s": h_s,
                        "i_sf": i_sf,
                        "c_fs": i_sf / h_s,
                    }
                )
    return rows


def _run_cmaybe_consensus(params: dict, seed: int, n_threads: int) -> list[dict]:
    n = params["n"]
    ms = params["m"] if params["m"] is not None else list(range(n // 2 + 1))
    rows = []
    for p in params["p"]:
        for s in params["s"]:
            cp = CMaybeParams(n, p, s)
            for m in ms:
                gram = cmaybe.gram_reduce(cp, m, m)
                h_s = gram.h_s()
                rows.append(
                    {
                        "n": n,
                        "p": p,
                        "s": s,
                        "m": m,
                        "h_s": h_s,
                        "i_sf": gram.mi_sf(),
                        "i_sf_prime": gram.mi_sf2(),
                        "i_ff": gram.mi_ff(),
                        "c_ff": gram.mi_ff() / h_s,
                    }
                )
    return rows


def _run_holevo_tilt(params: dict, seed: int, n_threads: int) -> list[dict]:
    n = params["n"]
    rows = []
    for p in params["p"]:
        for s in params["s"]:
            cp = CMaybeParams(n, p, s)
            for m in params["m"]:
                gram = cmaybe.gram_reduce(cp, m, m)
                h_s = gram.h_s()
                for mu in params["mu"]:
                    meas = tilted_basis(mu)
                    chi = gram.holevo(meas)
                    refined = gram.refined_mi(meas)
                    rows.append(
                        {
                            "n": n,
                            "p": p,
                            "s": s,
                            "m": m,
                            "mu": mu,
                            "h_s": h_s,
                            "chi": chi,
                            "c_slf": chi / h_s,
                            "refined_mi": refined,
                            "big_c": refined / h_s,
                        }
                    )
    return rows


def _spin_spec(params: dict) -> spinmodel.TimeSeriesSpec:
    fragments = tuple(
        (tuple(range(1, 1 + m)), tuple(range(1 + m, 1 + 2 * m))) for m in params["m"]
    )
    return spinmodel.TimeSeriesSpec(
        times=tuple(params["times"]),
        fragments=fragments,
        mus=tuple(params["mu"]),
        delta_target=params["delta_target"],
        quantum_cmi=params["quantum_cmi"],
    )


def _run_spin_evolve(params: dict, seed: int, n_threads: int) -> list[dict]:
    spec = _spin_spec(params)
    sp = spinmodel.SpinModelParams(params["n"], params["delta_d"], params["delta_g"], seed)
    avg, tables = spinmodel.ensemble_average(sp, params["n_real"], spec)
    rows = []
    for i, table in enumerate(tables):
        for r in table:
            rows.append({"realization": i, **r})
    if params["n_real"] > 1:
        for r in avg:
            rows.append({"realization": "mean", **r})
    return rows


def _run_pip(params: dict, seed: int, n_threads: int) -> list[dict]:
    n = params["n"]
    sizes = params["sizes"] if params["sizes"] is not None else list(range(n + 1))
    sp = spinmodel.SpinModelParams(n, params["delta_d"], params["delta_g"], seed)
    real = spinmodel.sample_couplings(sp)

    def one(t):
        curve = spinmodel.pip(
            real, t, sizes, params["sampler"], params["k_samples"], seed
        )
        return [
            {"t": t, "m": m, "i_sf_mean": mean, "i_sf_std": std}
            for m, mean, std in curve
        ]

    return [row for chunk in _pmap(one, list(params["times"]), n_threads) for row in chunk]


def _run_redundancy(params: dict, seed: int, n_threads: int) -> list[dict]:
    sp = spinmodel.SpinModelParams(params["n"], params["delta_d"], params["delta_g"], seed)
    real = spinmodel.sample_couplings(sp)

    def one(t):
        return {
            "t": t,
            "delta": params["delta"],
            "r_delta": spinmodel.redundancy(real, t, params["delta"]),
            "h_s": spinmodel.system_entropy(real, t),
        }

    return _pmap(one, list(params["times"]), n_threads)


def _run_theorem1(params: dict, seed: int, n_threads: int) -> list[dict]:
    rng = np.random.default_rng(seed)
    rows = []
    for i in range(params["n_states"]):
        d_s = int(rng.choice(params["d_s"]))
        bs = infotheory.random_branching_state(rng, d_s, orthogonal=("remainder",))
        rep = infotheory.theorem1_check(bs)
        rows.append(
            {
                "instance": i,
                "d_s": d_s,
                "h_s": rep.h_s,
                "delta": rep.delta,
                "delta_prime": rep.delta_prime,
                "delta_tilde": rep.delta_tilde,
                "delta_hat": rep.delta_hat,
                "i_ff": rep.mi_ff,
                "identity_residual": rep.identity_residual,
                "bound_ok": rep.bound_ok,
            }
        )
    return rows


def _run_lemma1(params: dict, seed: int, n_threads: int) -> list[dict]:
    rng = np.random.default_rng(seed)
    rows = []
    for i in range(params["n_states"]):
        d_s = int(rng.choice(params["d_s"]))
        bs = infotheory.random_branching_state(rng, d_s, orthogonal=())
        rep = infotheory.lemma1_check(bs)
        rows.append(
            {
                "instance": i,
                "d_s": d_s,
                "h_s": rep.h_s,
                "delta": rep.delta,
                "delta_prime": rep.delta_prime,
                "delta_tilde": rep.delta_tilde,
                "eps": rep.eps,
                "eps_prime": rep.eps_prime,
                "eps_tilde": rep.eps_tilde,
                "i_ff": rep.mi_ff,
                "identity_residual": rep.identity_residual,
                "bound_ok": rep.bound_ok,
            }
        )
    return rows


def _run_theorem2(params: dict, seed: int, n_threads: int) -> list[dict]:
    from .measurement import random_povm

    rng = np.random.default_rng(seed)
    rows = []
    for i in range(params["n_states"]):
        d_s = int(rng.choice([2, 3, 4]))
        bs = infotheory.random_branching_state(rng, d_s, orthogonal=("frag_a", "remainder"))
        state, parts = infotheory.realize_dense(bs)
        dim = 2 ** len(parts["system"])
        for j in range(params["n_povms"]):
            n_out = int(rng.integers(2, 7))
            povm = random_povm(int(rng.integers(0, 2**32)), n_out, dim=dim)
            val = infotheory.refined_mi(state, parts["frag_a"], parts["frag_b"], povm)
            rows.append(
                {
                    "instance": i,
                    "povm": j,
                    "d_s": d_s,
                    "n_outcomes": n_out,
                    "refined_mi": val,
                    "nonnegative": val >= -1e-9,
                }
            )
    return rows


RUNNERS = {
    "cmaybe-scan": _run_cmaybe_scan,
    "cmaybe-consensus": _run_cmaybe_consensus,
    "holevo-tilt": _run_holevo_tilt,
    "spin-evolve": _run_spin_evolve,
    "pip": _run_pip,
    "redundancy": _run_redundancy,
    "theorem1": _run_theorem1,
    "lemma1": _run_lemma1,
    "theorem2-stress": _run_theorem2,
}


def run(config: ExperimentConfig) -> ResultTable:
    """Execute one experiment; deterministic per (config, seed)."""
    params = _validate(config)
    start = time.perf_counter()
    rows = RUNNERS[config.kind](params, config.seed, _threads(config))
    elapsed = time.perf_counter() - start
    columns = list(rows[0].keys()) if rows else []
    metadata = {
        "experiment": config.kind,
        "seed": config.seed,
        "version": __version__,
        "wall_time_s": round(elapsed, 3),
        "config": params,
    }
    return ResultTable(columns=columns, rows=rows, metadata=metadata)


def _fmt(value) -> str:
    if isinstance(value, bool):
        return str(value).lower()
    if isinstance(value, float):
        return format(value, ".17g")
    return str(value)


def write_table(table: ResultTable, path: Path, sidecar: bool = True) -> None:
    """CSV with '#' metadata header; floats at 17 significant digits."""
    lines = []
    for key, value in table.metadata.items():
        lines.append(f"# {key}: {json.dumps(value)}")
    lines.append(",".join(table.columns))
    for row in table.rows:
        cells = []
        for col in table.columns:
            v = row[col]
            if isinstance(v, float):
                v = _snap(v)
            cells.append(_fmt(v))
        lines.append(",".join(cells))
    path = Path(path)
    path.write_text("\n".join(lines) + "\n")
    if sidecar:
        path.with_suffix(path.suffix + ".json").write_text(
            json.dumps(table.metadata, indent=2) + "\n"
        )


# ---------------------------------------------------------------------------
# argument parsing


def _parse_set(pairs: list[str]) -> dict:
    out = {}
    for pair in pairs:
        if "=" not in pair:
            raise ConfigError(f"--set expects key=value, got {pair!r}")
        key, raw = pair.split("=", 1)
        try:
            out[key] = json.loads(raw)
        except json.JSONDecodeError:
            out[key] = raw
    return out


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="qdc", description="Quantum Darwinism consensus experiments"
    )
    sub = parser.add_subparsers(dest="kind", required=True)
    for kind in RUNNERS:
        p = sub.add_parser(kind, help=f"run the {kind} experiment")
        p.add_argument("--config", type=Path, help="JSON config file")
        p.add_argument("--set", action="append", default=[], metavar="K=V")
        p.add_argument("--out", type=Path, help="output CSV path")
        p.add_argument("--seed", type=int, default=None)
        p.add_argument("--threads", type=int, default=None)
    v = sub.add_parser("verify", help="run the acceptance suite")
    v.add_argument("suite", nargs="?", default="fast", choices=["fast", "full"])
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    if args.kind == "verify":
        return 0 if acceptance.verify(args.suite) else 1
    try:
        file_cfg = {}
        if args.config:
            file_cfg = json.loads(Path(args.config).read_text())
        file_cfg.update(_parse_set(args.set))
        seed = args.seed if args.seed is not None else int(file_cfg.pop("seed", 0))
        file_cfg.pop("kind", None)
        config = ExperimentConfig(
            kind=args.kind, params=file_cfg, seed=seed, threads=args.threads
        )
        table = run(config)
    except ConfigError as exc:
        print(json.dumps({"error": "ConfigError", "message": str(exc)}), file=sys.stderr)
        return 2
    except QdcError as exc:
        print(
            json.dumps({"error": type(exc).__name__, "message": str(exc)}),
            file=sys.stderr,
        )
        return 3
    out = args.out or Path(f"{args.kind}.csv")
    write_table(table, out)
    print(f"wrote {len(table.rows)} rows to {out}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
