"""Command-line entry point: ``dpconnect <subcommand> ...``.

Every subcommand writes CSV (or the generator's text formats) and exits 0
only if none of its tasks raised.  Aborted releases are reported in the
``aborted`` column and do not count as errors.
"""

from __future__ import annotations

import argparse
import csv
import logging
import sys
from dataclasses import replace
from pathlib import Path

import numpy as np

from .binary import privatize_binary, release_binary
from .continuous import LITERAL, MATCHED, privatize_ranks, release_mafr
from .graph import CELL_MODES, EGO_TO_ALL
from .harness import (
    CSV_VERSION,
    DEFAULT_DELTA_LABEL,
    fmt,
    load_experiment_config,
    run_correlation_study,
    run_experiment,
    results_csv,
    summarize,
)
from .io import ingest, write_graph
from .netgen import GeneratorSpec, gen_village_panel
from .noise import PrivacyBudget, make_rng
from .verification import run_checks

log = logging.getLogger("dpconnect")


def _interval(text: str) -> tuple[float, float]:
    try:
        lo, hi = (float(v) for v in text.split(":"))
    except ValueError:
        raise argparse.ArgumentTypeError(f"interval must look like lo:hi, got {text!r}") from None
    return lo, hi


def _floats(text: str) -> list[float]:
    return [float(v) for v in text.split(",") if v.strip()]


def _open_out(path):
    if path in (None, "-"):
        return sys.stdout, False
    return open(path, "w", encoding="utf-8", newline=""), True


def _write_csv(path, header, rows, kind: str) -> None:
    fh, close = _open_out(path)
    try:
        fh.write(f"# {CSV_VERSION} {kind}\n")
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        w.writerows(rows)
    finally:
        if close:
            fh.close()


def _cells_to_release(g, requested):
    if requested:
        return list(requested)
    if g.cells:
        return list(g.cells)
    return [None]


# -- subcommands ------------------------------------------------------------


def cmd_generate(args) -> int:
    rng = make_rng(args.seed, 0)
    if args.kind == "village":
        prefix = Path(args.out)
        for k, g in enumerate(gen_village_panel(rng)):
            write_graph(g, prefix.parent / f"{prefix.name}{k:02d}")
        return 0
    params = {}
    for key in ("p_edge", "avg_degree", "frac_a", "p_within", "p_between", "d_bar", "h"):
        val = getattr(args, key)
        if val is not None:
            params[key] = val
    g = GeneratorSpec(args.kind, args.n, params).build(rng)
    paths = write_graph(g, args.out)
    log.info("wrote %s", ", ".join(str(p) for p in paths.values()))
    return 0


def cmd_release_binary(args) -> int:
    g = ingest(args.edges, args.labels, args.cells)
    budget = PrivacyBudget(args.eps_label, args.eps_edge)
    # one randomized-response draw shared by every cell released here
    priv = privatize_binary(g, budget.eps_label, make_rng(args.seed, 1, 0))
    rows, errors = [], 0
    for k, cell in enumerate(_cells_to_release(g, args.cell)):
        cid = "all" if cell is None else cell
        try:
            rel = release_binary(g, budget, make_rng(args.seed, 1, 1, k), cell, args.cell_mode,
                                 private_labels=priv, clamp=args.clamp)
        except (KeyError, ValueError) as exc:
            errors += 1
            log.error("cell %s: %s", cid, exc)
            continue
        rows.append([cid, fmt(rel.value), fmt(rel.s0), fmt(rel.s1), fmt(rel.noise_scale), fmt(rel.aborted)])
    _write_csv(args.out, ["cell_id", "value", "s0", "s1", "noise_scale", "aborted"], rows, "release-binary")
    total = budget.eps_label + budget.eps_edge * len(rows)
    log.info("privacy spend: eps_label %g + eps_edge %g x %d cells = %g",
             budget.eps_label, budget.eps_edge, len(rows), total)
    return 1 if errors else 0


def cmd_release_mafr(args) -> int:
    g = ingest(args.edges, args.labels, args.cells)
    budget = PrivacyBudget(args.eps_label, args.eps_edge, args.delta_label)
    priv = privatize_ranks(g.ranks, budget.eps_label, budget.delta_label, make_rng(args.seed, 1, 0))
    rows, errors = [], 0
    for k, cell in enumerate(_cells_to_release(g, args.cell)):
        cid = "all" if cell is None else cell
        try:
            reg = release_mafr(g, budget, args.interval, make_rng(args.seed, 1, 1, k), cell,
                               args.cell_mode, private_ranks=priv, pairing=args.pairing)
        except (KeyError, ValueError) as exc:
            errors += 1
            log.error("cell %s: %s", cid, exc)
            continue
        rows.append([cid, fmt(reg.alpha_tilde), fmt(reg.beta_tilde), fmt(reg.mafr),
                     fmt(reg.sigma2), fmt(priv.params.bound), fmt(reg.aborted)])
    _write_csv(args.out, ["cell_id", "alpha_tilde", "beta_tilde", "mafr", "sigma2", "A", "aborted"],
               rows, "release-mafr")
    return 1 if errors else 0


def cmd_simulate(args) -> int:
    spec = load_experiment_config(args.config)
    out = args.out or spec.output
    try:
        rows = run_experiment(replace(spec, output=None), workers=args.workers)
    except Exception as exc:  # noqa: BLE001 - any task failure fails the run
        log.error("simulation failed: %s", exc)
        return 1
    text = results_csv(rows, spec.sweep, timing=args.timing)
    fh, close = _open_out(out)
    try:
        fh.write(text)
    finally:
        if close:
            fh.close()
    for value, s in summarize(rows).items():
        log.info("%s=%s  mse=%.6g  median_se=%.6g  aborted=%d/%d",
                 spec.sweep, value, s["mse"], s["median_se"], s["aborted"], s["n"])
    return 0


def cmd_correlate(args) -> int:
    if args.village_panel:
        graphs = gen_village_panel(make_rng(args.seed, 0))
        units = [(g, None) for g in graphs]
        names = [f"village{k:02d}" for k in range(len(graphs))]
    else:
        if not args.edges or not args.labels or not args.cells:
            log.error("correlate needs --village-panel or --edges, --labels and --cells")
            return 2
        g = ingest(args.edges, args.labels, args.cells)
        units = [(g, c) for c in g.cells]
        names = list(g.cells)
    study = run_correlation_study(units, args.eps, args.replicates, args.seed,
                                  args.label_fraction, args.cell_mode, names)
    prefix = Path(args.out)
    prefix.with_name(prefix.name + "_cells.csv").write_text(study.summary_csv(), encoding="utf-8")
    prefix.with_name(prefix.name + "_correlations.csv").write_text(study.correlation_csv(), encoding="utf-8")
    for eps in study.eps_values:
        corr = study.correlations(eps)
        # correlations need three finite cells per replicate
        med = float(np.nanmedian(corr)) if np.isfinite(corr).any() else float("nan")
        log.info("eps=%g  median corr=%.3f  SNR=%.2f  aborted=%d", eps, med,
                 study.signal_to_noise(eps), study.aborted(eps))
    return 0


def cmd_oracle_check(args) -> int:
    results = run_checks(args.seed)
    for r in results:
        print(r.line())
    failed = sum(not r.passed for r in results)
    print(f"{len(results) - failed}/{len(results)} checks passed")
    return 1 if failed else 0


# -- parser -----------------------------------------------------------------


def _add_graph_inputs(p, labels_required=True):
    p.add_argument("--edges", required=True, help="edge file: 'i j [weight]' per line")
    p.add_argument("--labels", required=labels_required, help="label file: 'i label' per line")
    p.add_argument("--cells", help="cell file: 'cell_id i' per line")
    p.add_argument("--cell", action="append", help="release only this cell (repeatable)")
    p.add_argument("--cell-mode", choices=CELL_MODES, default=EGO_TO_ALL)


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="dpconnect", description=__doc__.splitlines()[0])
    ap.add_argument("-v", "--verbose", action="store_true")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("generate", help="write a synthetic labeled graph")
    p.add_argument("--kind", choices=("er", "sbm2", "graphon", "village"), required=True)
    p.add_argument("--n", type=int, default=1000)
    p.add_argument("--p-edge", dest="p_edge", type=float)
    p.add_argument("--avg-degree", dest="avg_degree", type=float)
    p.add_argument("--frac-a", dest="frac_a", type=float)
    p.add_argument("--p-within", dest="p_within", type=float)
    p.add_argument("--p-between", dest="p_between", type=float)
    p.add_argument("--d-bar", dest="d_bar", type=float)
    p.add_argument("--h", type=float)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True, help="output prefix")
    p.set_defaults(func=cmd_generate)

    p = sub.add_parser("release-binary", help="private cross-type connectedness")
    _add_graph_inputs(p)
    p.add_argument("--eps-label", type=float, required=True)
    p.add_argument("--eps-edge", type=float, required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--clamp", action="store_true", help="clamp released values into [0, 1]")
    p.add_argument("--out", help="CSV path (default stdout)")
    p.set_defaults(func=cmd_release_binary)

    p = sub.add_parser("release-mafr", help="private friend-rank regression and MAFR")
    _add_graph_inputs(p)
    p.add_argument("--eps-label", type=float, required=True)
    p.add_argument("--eps-edge", type=float, required=True)
    p.add_argument("--delta-label", type=float, default=DEFAULT_DELTA_LABEL)
    p.add_argument("--interval", type=_interval, default=(0.0, 0.25))
    p.add_argument("--pairing", choices=(MATCHED, LITERAL), default=MATCHED)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", help="CSV path (default stdout)")
    p.set_defaults(func=cmd_release_mafr)

    p = sub.add_parser("simulate", help="run a Monte Carlo sweep from a config file")
    p.add_argument("config")
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--timing", action="store_true", help="add a per-release seconds column")
    p.add_argument("--out", help="CSV path (default: config 'output' key, else stdout)")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("correlate", help="cross-cell correlation study")
    p.add_argument("--village-panel", action="store_true", help="use the synthetic 46-village panel")
    p.add_argument("--edges")
    p.add_argument("--labels")
    p.add_argument("--cells")
    p.add_argument("--cell-mode", choices=CELL_MODES, default=EGO_TO_ALL)
    p.add_argument("--eps", type=_floats, default=[8.0, 4.0], help="comma-separated total budgets")
    p.add_argument("--label-fraction", type=float, default=0.5)
    p.add_argument("--replicates", type=int, default=500)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True, help="output prefix for the two CSVs")
    p.set_defaults(func=cmd_correlate)

    p = sub.add_parser("oracle-check", help="run the verification suite")
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_oracle_check)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(message)s", stream=sys.stderr)
    try:
        return args.func(args)
    except (OSError, ValueError) as exc:
        log.error("%s", exc)
        return 1


if __name__ == "__main__":
    sys.exit(main())
