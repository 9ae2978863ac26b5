"""Command-line driver: data generation, decompositions, benchmarks and demos.

Each command reads an optional JSON config file, applies flag overrides
(flags win), runs, and writes ``report.json`` and ``report.csv`` into
``--out``.  Report metric sections depend only on the config and seed;
wall-clock numbers live in the separate ``time`` section.
"""

import argparse
import csv
import io
import json
import sys
import time
from pathlib import Path

import numpy as np

from . import errors, experiments
from .apps.cluster import ClusterConfig, cluster_pipeline
from .cobe import CobeConfig, cobe
from .cobec import CobecConfig, cobec
from .features import cnfe, cnfe_relative_error, split
from .io import read_multiblock, read_sample_dir, write_matrix, write_multiblock
from .multiblock import SyntheticSpec, derive_seed, generate_synthetic
from .preprocess import preprocess
from .scaling import projected_common_basis

EXIT_CODES = {
    errors.IoError: 3,
    errors.InvalidSpec: 4,
    errors.DimensionMismatch: 10,
    errors.NonFinite: 11,
    errors.TooFewBlocks: 12,
    errors.ZeroSignal: 13,
    errors.RankTooLarge: 14,
    errors.ZeroMatrix: 15,
    errors.TooShort: 16,
    errors.DegenerateSum: 17,
    errors.DegenerateP: 18,
    errors.DegenerateLift: 19,
    errors.SeparatorFailure: 20,
    errors.TooFewSamples: 21,
    errors.ZeroVariance: 22,
    errors.LengthMismatch: 23,
}
EXIT_CONFIG = 5
EXIT_OTHER_OS = 6
EXIT_CIFA = 9
EXIT_VALUE = 8
EXIT_UNEXPECTED = 1


class ConfigError(Exception):
    pass


def exit_code_for(exc):
    for cls in type(exc).__mro__:
        if cls in EXIT_CODES:
            return EXIT_CODES[cls]
    if isinstance(exc, ConfigError):
        return EXIT_CONFIG
    if isinstance(exc, OSError):
        return EXIT_OTHER_OS
    if isinstance(exc, errors.CifaError):
        return EXIT_CIFA
    if isinstance(exc, ValueError):
        return EXIT_VALUE
    return EXIT_UNEXPECTED


def _exit_code_help():
    lines = ["exit codes:", "  0   success", "  1   unexpected error", "  2   bad command line"]
    named = [(code, cls.__name__) for cls, code in EXIT_CODES.items()]
    named += [(EXIT_CONFIG, "ConfigError (unreadable or invalid config)"), (EXIT_OTHER_OS, "other OS error"), (EXIT_VALUE, "other invalid value"), (EXIT_CIFA, "other package error")]
    lines += [f"  {code:<3} {name}" for code, name in sorted(named)]
    return "\n".join(lines)


# ---------------------------------------------------------------- config


def load_config(args):
    cfg = {}
    if args.config:
        path = Path(args.config)
        if not path.is_file():
            raise errors.IoError(f"config file {path} not found")
        try:
            cfg = json.loads(path.read_text())
        except json.JSONDecodeError as exc:
            raise ConfigError(f"{path}: {exc}") from exc
        if not isinstance(cfg, dict):
            raise ConfigError(f"{path}: top level must be a JSON object")
    for key in ("seed", "epsilon", "c", "project", "runs", "input"):
        value = getattr(args, key, None)
        if value is not None:
            cfg[key] = value
    cfg.setdefault("seed", 0)
    return cfg


def _require_input(cfg):
    if "input" not in cfg:
        raise ConfigError("an input directory is required (--input or config key 'input')")
    return cfg["input"]


# ---------------------------------------------------------------- reports


def _plain(x):
    if isinstance(x, dict):
        return {str(k): _plain(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_plain(v) for v in x]
    if isinstance(x, np.ndarray):
        return _plain(x.tolist())
    if isinstance(x, (np.bool_, bool)):
        return bool(x)
    if isinstance(x, (np.integer,)):
        return int(x)
    if isinstance(x, (np.floating, float)):
        x = float(x)
        return x if np.isfinite(x) else str(x)
    return x


def _summary(values):
    v = np.asarray(values, dtype=float)
    out = {"mean": float(v.mean())}
    if v.size > 1:
        out["std"] = float(v.std(ddof=1))
    return out


def write_report(out, command, cfg, metrics, table, timing, fmt):
    out = Path(out)
    out.mkdir(parents=True, exist_ok=True)
    report = {"command": command, "config": _plain(cfg), "metrics": _plain(metrics), "time": _plain(timing)}
    text = json.dumps(report, indent=2, sort_keys=True) + "\n"
    (out / "report.json").write_text(text)
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    for row in table:
        writer.writerow([format(v, ".10g") if isinstance(v, float) else v for v in row])
    (out / "report.csv").write_text(buf.getvalue())
    sys.stdout.write(buf.getvalue() if fmt == "csv" else text)


# ---------------------------------------------------------------- commands


def _spec_from(cfg):
    n_blocks = int(cfg.get("n_blocks", 5))
    j = cfg.get("J", 30)
    r = cfg.get("R", 8)
    j = list(j) if isinstance(j, list) else [int(j)] * n_blocks
    r = list(r) if isinstance(r, list) else [int(r)] * len(j)
    return SyntheticSpec(
        I=int(cfg.get("I", 200)),
        J=tuple(j),
        c=int(cfg.get("c", 3)),
        R=tuple(r),
        snr_db=cfg.get("snr_db"),
        seed=int(cfg["seed"]),
        sources=cfg.get("sources", "gaussian"),
    )


def cmd_generate(cfg, out):
    spec = _spec_from(cfg)
    data, truth = generate_synthetic(spec)
    write_multiblock(out, data)
    sidecar = {
        "spec": _plain(spec.__dict__),
        "common_basis": _plain(truth.common_basis),
        "common_sources": None if truth.common_sources is None else _plain(truth.common_sources),
    }
    (Path(out) / "truth.json").write_text(json.dumps(sidecar, sort_keys=True) + "\n")
    metrics = {"n_blocks": data.n_blocks, "shared_rows": data.shared_rows, "cols": data.cols, "c": spec.c}
    table = [["block", "rows", "cols", "rank"]] + [[n, data.shared_rows, j, r] for n, (j, r) in enumerate(zip(spec.J, spec.R))]
    return metrics, table, {}


def _common_basis(cfg, data, timing):
    """COBE, COBEc (``c`` set) or the projected path (``project`` set)."""
    rank = cfg.get("rank")
    seed = int(cfg["seed"])
    t0 = time.perf_counter()
    if cfg.get("project"):
        cobe_cfg = CobecConfig(c=int(cfg["c"]), seed=seed) if cfg.get("c") else _cobe_config(cfg)
        run = projected_common_basis(data, int(cfg["project"]), rank, cobe_cfg, cfg.get("verify_tol"), seed)
        timing["extract"] = time.perf_counter() - t0
        extra = {"i_p": run.plan.i_p, "accepted": run.basis.diagnostics["accepted"], "projected_c": run.projected.c}
        return run.basis, preprocess(data, rank), "projected", extra
    factors = preprocess(data, rank)
    timing["preprocess"] = time.perf_counter() - t0
    t0 = time.perf_counter()
    if cfg.get("c"):
        basis, mode = cobec(factors, CobecConfig(c=int(cfg["c"]), seed=seed)), "cobec"
    else:
        basis, mode = cobe(factors, _cobe_config(cfg)), "cobe"
    timing["extract"] = time.perf_counter() - t0
    return basis, factors, mode, {}


def _cobe_config(cfg):
    return CobeConfig(
        epsilon=float(cfg.get("epsilon", 1e-6)),
        max_components=cfg.get("max_components"),
        auto_stop=bool(cfg.get("auto", False)),
        auto_ceiling=cfg.get("auto_ceiling"),
        seed=int(cfg["seed"]),
    )


def cmd_cobe(cfg, out):
    data = read_multiblock(_require_input(cfg))
    timing = {}
    basis, _, mode, extra = _common_basis(cfg, data, timing)
    out = Path(out)
    out.mkdir(parents=True, exist_ok=True)
    write_matrix(out / "a_bar.csv", basis.a_bar)
    for n, y in enumerate(data):
        write_matrix(out / f"b_bar_{n:03d}.csv", y.T @ basis.a_bar)
    f_curve = np.asarray(basis.candidate_residuals or basis.residuals) / data.n_blocks
    metrics = {"mode": mode, "c": basis.c, "residuals": basis.residuals, "f_curve": f_curve, "diagnostics": basis.diagnostics, **extra}
    table = [["index", "f_over_n", "common"]] + [[i + 1, float(f), i < basis.c] for i, f in enumerate(f_curve)]
    return metrics, table, timing


def cmd_split(cfg, out):
    data = read_multiblock(_require_input(cfg))
    timing = {}
    basis, factors, mode, _ = _common_basis(cfg, data, timing)
    dec = split(factors, basis)
    out = Path(out)
    out.mkdir(parents=True, exist_ok=True)
    write_matrix(out / "a_bar.csv", dec.common_basis)
    for n in range(data.n_blocks):
        write_matrix(out / f"common_{n:03d}.csv", dec.common_space[n])
        write_matrix(out / f"individual_{n:03d}.csv", dec.individual_space[n])
    rows = []
    for n in range(data.n_blocks):
        rows.append([n, float(np.linalg.norm(dec.common_space[n])), float(np.linalg.norm(dec.individual_space[n])), dec.individual_basis[n].shape[1]])
    metrics = {"mode": mode, "c": dec.c, "empty_individual": dec.empty_individual, "blocks": rows}
    return metrics, [["block", "common_norm", "individual_norm", "individual_rank"]] + rows, timing


def cmd_cnfe(cfg, out):
    data = read_multiblock(_require_input(cfg))
    timing = {}
    basis, factors, mode, _ = _common_basis(cfg, data, timing)
    dec = split(factors, basis)
    r = int(cfg.get("r", dec.c))
    t0 = time.perf_counter()
    res = cnfe(dec, r, int(cfg.get("max_iter", 2000)), int(cfg["seed"]), bool(cfg.get("nonnegative_mixing", False)))
    timing["cnfe"] = time.perf_counter() - t0
    out = Path(out)
    out.mkdir(parents=True, exist_ok=True)
    write_matrix(out / "f_bar.csv", res.f_bar)
    trace = res.objective_trace
    metrics = {"mode": mode, "c": dec.c, "r": r, "iterations": res.iterations, "relative_error": cnfe_relative_error(dec, res), "objective": trace[-1]}
    table = [["iteration", "objective"]] + [[i, float(v)] for i, v in enumerate(trace)]
    return metrics, table, timing


def _runs(cfg, default):
    runs = int(cfg.get("runs", default))
    if runs < 1:
        raise ConfigError("runs must be >= 1")
    return runs


def cmd_bench_linked_bss(cfg, out):
    runs = _runs(cfg, 10)
    seed = int(cfg["seed"])
    snr = float(cfg.get("snr_db", 20.0))
    results = [experiments.linked_bss_run(derive_seed(seed, i), snr, I=int(cfg.get("I", 1000))) for i in range(runs)]
    n_src = len(results[0]["sir"]["COBE"])
    header = ["method"] + [f"SIR{k + 1}" for k in range(n_src)]
    if runs > 1:
        header += [f"SIR{k + 1}_std" for k in range(n_src)]
    table, metrics, timing = [header], {"runs": runs, "snr_db": snr, "sir": {}}, {}
    for m in experiments.METHODS:
        sirs = np.array([r["sir"][m] for r in results])
        summ = [_summary(sirs[:, k]) for k in range(n_src)]
        metrics["sir"][m] = summ
        row = [m] + [s["mean"] for s in summ]
        if runs > 1:
            row += [s["std"] for s in summ]
        table.append(row)
        timing[m] = float(np.mean([r["time"][m] for r in results]))
    sweep = cfg.get("snr_sweep")
    if sweep:
        table.append([])
        table.append(["snr_db", "max_common_f", "min_other_f", "gap", "detected_4_fraction"])
        metrics["sweep"] = []
        for s in sweep:
            gaps = [experiments.gap_run(derive_seed(seed, i), float(s)) for i in range(runs)]
            common = float(np.mean([g["f"][:4].max() for g in gaps]))
            other = float(np.mean([g["f"][4:].min() for g in gaps]))
            frac = float(np.mean([g["detected"] == 4 for g in gaps]))
            metrics["sweep"].append({"snr_db": float(s), "max_common_f": common, "min_other_f": other, "gap": other - common, "detected_4_fraction": frac})
            table.append([float(s), common, other, other - common, frac])
    return metrics, table, timing


def _cluster_samples(cfg):
    if "input" in cfg:
        groups = read_sample_dir(cfg["input"])
        names = sorted(groups)
        x = np.hstack([groups[k] for k in names])
        truth = np.concatenate([np.full(groups[k].shape[1], i) for i, k in enumerate(names)])
        return x, truth
    params = {k: cfg[k] for k in ("I", "K", "per_cluster", "noise", "separation", "common_sd") if k in cfg}
    return experiments.clustering_scenario(int(cfg["seed"]), **params)


def cmd_cluster_demo(cfg, out):
    x, truth = _cluster_samples(cfg)
    k = int(cfg.get("K", truth.max() + 1))
    base = dict(n_groups=int(cfg.get("n_groups", 3)), K=k, c=int(cfg.get("c", 2)), seed=int(cfg["seed"]))
    table = [["common_removal", "accuracy", "nmi"]]
    metrics = {}
    for removal in (False, True):
        labels, rep = cluster_pipeline(x, truth, ClusterConfig(remove_common=removal, **base))
        name = "with" if removal else "without"
        metrics[name] = {"accuracy": rep["accuracy"], "nmi": rep["nmi"], "c_removed": rep["c_removed"]}
        table.append([name, rep["accuracy"], rep["nmi"]])
        if removal:
            emb = np.column_stack([rep["embedding"], labels, truth])
            Path(out).mkdir(parents=True, exist_ok=True)
            with open(Path(out) / "embedding.csv", "w") as fh:
                fh.write("x,y,label,truth\n" if emb.shape[1] == 4 else "")
                for row in emb:
                    fh.write(",".join(format(v, ".10g") for v in row[:-2]) + f",{int(row[-2])},{int(row[-1])}\n")
    return metrics, table, {}


def cmd_classify_demo(cfg, out):
    runs = _runs(cfg, 20)
    seed = int(cfg["seed"])
    frac = float(cfg.get("train_fraction", 0.5))
    method = cfg.get("method", "correlation")
    classes = None
    if "input" in cfg:
        classes = read_sample_dir(cfg["input"])
    results = []
    for i in range(runs):
        s = derive_seed(seed, i)
        cls = experiments.classification_scenario(s) if classes is None else classes
        results.append(experiments.classification_run(s, frac, float(cfg.get("c_fraction", 0.8)), method, cls))
    acc = _summary([r["accuracy"] for r in results])
    labels = list(results[0]["per_class"])
    per_class = {str(k): _summary([r["per_class"][k] for r in results]) for k in labels}
    table = [["class", "accuracy_mean", "accuracy_std"]]
    for k in labels:
        table.append([str(k), per_class[str(k)]["mean"], per_class[str(k)].get("std", "")])
    table.append(["all", acc["mean"], acc.get("std", "")])
    metrics = {"runs": runs, "train_fraction": frac, "method": method, "accuracy": acc, "per_class": per_class}
    return metrics, table, {}


COMMANDS = {
    "generate": (cmd_generate, "write a synthetic multi-block data set and its ground truth"),
    "cobe": (cmd_cobe, "extract the common basis of a data set (COBE, COBEc with --c, projected with --project)"),
    "cnfe": (cmd_cnfe, "nonnegative common features of a data set"),
    "split": (cmd_split, "split each block into common and individual spaces"),
    "bench-linked-bss": (cmd_bench_linked_bss, "linked blind-source-separation benchmark (COBE / COBEc / stacked PCA)"),
    "cluster-demo": (cmd_cluster_demo, "clustering on individual features, with and without common removal"),
    "classify-demo": (cmd_classify_demo, "classification by common-feature matching"),
}


def build_parser():
    parser = argparse.ArgumentParser(
        prog="cifa",
        description="Common and individual feature analysis of multi-block data.",
        epilog=_exit_code_help(),
        formatter_class=argparse.RawDescriptionHelpFormatter,
    )
    sub = parser.add_subparsers(dest="command", required=True)
    for name, (_, help_text) in COMMANDS.items():
        p = sub.add_parser(name, help=help_text, description=help_text, epilog=_exit_code_help(), formatter_class=argparse.RawDescriptionHelpFormatter)
        p.add_argument("--config", help="JSON file with command parameters; flags override it")
        p.add_argument("--seed", type=int, help="master seed (default 0)")
        p.add_argument("--out", default="out", help="output directory (default ./out)")
        p.add_argument("--format", choices=("csv", "json"), default="json", help="report echoed to stdout")
        p.add_argument("--epsilon", type=float, help="COBE threshold on f/N")
        p.add_argument("--c", type=int, help="number of common components (COBEc path)")
        p.add_argument("--project", type=int, help="random-projection dimension I_P")
        p.add_argument("--runs", type=int, help="Monte-Carlo repetitions")
        p.add_argument("--input", help="input data directory")
    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    fn = COMMANDS[args.command][0]
    try:
        cfg = load_config(args)
        if cfg["seed"] < 0:
            raise ConfigError("seed must be unsigned")
        metrics, table, timing = fn(cfg, args.out)
        write_report(args.out, args.command, cfg, metrics, table, timing, args.format)
    except Exception as exc:  # noqa: BLE001 - every failure becomes an exit code
        code = exit_code_for(exc)
        sys.stderr.write(f"cifa {args.command}: {type(exc).__name__}: {exc}\n")
        return code
    return 0


if __name__ == "__main__":
    sys.exit(main())
