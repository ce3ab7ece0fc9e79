# -*- coding: utf-8 -*-

"""
esdlab command-line front end.

    esdlab sweep --manifest demo/data/avoidance.json --out runs/avoidance
    esdlab verify-oracle --out runs/oracle
    esdlab error-report --seed 7 --out runs/errors

Each subcommand reads one manifest (or its built-in defaults), writes CSV
and JSON artifacts with 17 significant digits plus an SVG plot, and exits
with status 1 on any validation or tolerance failure.
"""

import argparse
import csv
import json
import logging
import math
import os
import sys

import numpy as np

from esdlab import manifests
from esdlab.analysis import concurrence, regime_map
from esdlab.channels import adc_pair, correlated_adc_kraus
from esdlab.exceptions import DegeneracyError, EsdlabError, ToleranceError
from esdlab.optics import derive_kraus, derive_single_kraus, displaced_sagnac, match_kraus_sets
from esdlab.protocol import (ProtocolConfig, characterize_first_channel, characterize_second_channel, evolve,
                             run_pipeline, separable_purity_test, uniform_grid)
from esdlab.states import make_state, renormalize
from esdlab.syserrors import (concurrence_vs_alpha, delta_c_for_budget, monte_carlo_delta_c,
                              spread_over_state_parameter)
from esdlab.tomography import (reconstruct, reconstruction_report, repeated_qst, simulate_counts, standard_settings,
                               write_counts)

try:
    from esdlab import plotting
    HAS_PYCAIRO = True
except ImportError:
    HAS_PYCAIRO = False

L = logging.getLogger("esdlab.cli")

LOG_LEVELS = ("DEBUG", "INFO", "WARNING", "ERROR")
EXPLORATORY_NOTE = "exploratory, no closed-form reference"


def format_number(value):
    """17 significant digits, always with a decimal point or exponent."""
    text = "%.17g" % value
    if not any(c in text for c in ".en"):
        text += ".0"
    return text


def _encode(value, indent, level):
    pad = " " * (indent * (level + 1))
    end = " " * (indent * level)
    if isinstance(value, dict):
        if not value:
            return "{}"
        items = ["%s%s: %s" % (pad, json.dumps(str(k)), _encode(v, indent, level + 1))
                 for k, v in sorted(value.items(), key=lambda kv: str(kv[0]))]
        return "{\n%s\n%s}" % (",\n".join(items), end)
    if isinstance(value, (list, tuple)):
        if not value:
            return "[]"
        items = ["%s%s" % (pad, _encode(v, indent, level + 1)) for v in value]
        return "[\n%s\n%s]" % (",\n".join(items), end)
    if isinstance(value, (bool, np.bool_)) or value is None:
        return json.dumps(bool(value) if value is not None else None)
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        return format_number(float(value)) if math.isfinite(value) else "null"
    return json.dumps(str(value))


def dumps(doc, indent=2):
    """JSON text with sorted keys and every float at 17 significant digits."""
    return _encode(doc, indent, 0) + "\n"


def write_json(path, doc):
    with open(path, "w") as f:
        f.write(dumps(doc))
    return path


def write_rows(path, columns, rows):
    with open(path, "w", newline="") as f:
        writer = csv.writer(f, lineterminator="\n")
        writer.writerow(columns)
        for row in rows:
            writer.writerow([format_number(v) if isinstance(v, float) else v for v in row])
    return path


def _plot(name, path, *args, **kwargs):
    if not HAS_PYCAIRO:
        L.warning("pycairo is not available, skipping %s", path)
        return []
    return [getattr(plotting, name)(path, *args, **kwargs)]


def _grid_points(args, manifest):
    return args.grid_points or manifest["grid_points"]


def cmd_sweep(manifest, args):
    """Manipulated and baseline concurrence curves over the second damping strength."""
    cfg = manifests.protocol_config(manifest, args.grid_points)
    result = run_pipeline(cfg)
    summary = dict(result.summary(), alpha=cfg.state.alpha, p=cfg.p, z=cfg.z.to_json(),
                   pipeline_variant=cfg.pipeline_variant, baseline=cfg.baseline, grid_points=len(cfg.P_grid))
    paths = [os.path.join(args.out, "trajectory.csv"), os.path.join(args.out, "baseline.csv")]
    result.manipulated.to_csv(paths[0])
    result.baseline.to_csv(paths[1])
    paths.append(write_json(os.path.join(args.out, "summary.json"), summary))
    return paths + _plot("plot_trajectories", os.path.join(args.out, "sweep.svg"), [result.manipulated, result.baseline],
                         title="alpha=%.4g, p=%.4g" % (cfg.state.alpha, cfg.p))


def _characterization_outputs(args, trajectory, summary, name, x_label):
    path = os.path.join(args.out, "trajectory.csv")
    trajectory.to_csv(path)
    return [path, write_json(os.path.join(args.out, "summary.json"), summary)] + _plot(
        "plot_trajectories", os.path.join(args.out, "%s.svg" % name), [trajectory],
        title=name, x_label=x_label)


def cmd_characterize_first(manifest, args):
    """The post-selected first channel alone over p, with the separable purity check."""
    grid = uniform_grid(_grid_points(args, manifest))
    z = manifest.mismatch()
    trajectory = characterize_first_channel(manifest.state(), grid, z, manifest["embed_not"])
    purity = separable_purity_test(grid, z, manifest["embed_not"])
    summary = {
        "alpha": manifest["state"]["alpha"],
        "z": z.to_json(),
        "embed_not": manifest["embed_not"],
        "threshold": trajectory.threshold.to_json(),
        "concurrence": trajectory.concurrence,
        "trace_before_renorm": trajectory.trace_before_renorm,
        "separable_purity": {"p": purity.grid, "correlated": purity.correlated, "product": purity.product},
    }
    return _characterization_outputs(args, trajectory, summary, "characterize-first", "p")


def cmd_characterize_second(manifest, args):
    """The product damping channel alone over P."""
    grid = uniform_grid(_grid_points(args, manifest))
    trajectory = characterize_second_channel(manifest.state(), grid, manifest["apply_not"])
    summary = {
        "alpha": manifest["state"]["alpha"],
        "apply_not": manifest["apply_not"],
        "threshold": trajectory.threshold.to_json(),
        "initial_concurrence": trajectory.concurrence[0],
    }
    return _characterization_outputs(args, trajectory, summary, "characterize-second", "P")


def cmd_regimes(manifest, args):
    """Regime of the manipulation over p with analytic and refined boundaries."""
    rm = regime_map(manifest["alpha"], uniform_grid(_grid_points(args, manifest)), z=manifest.mismatch(),
                    pipeline_variant=manifest["pipeline_variant"], baseline=manifest["baseline"])
    doc = {
        "alpha": rm.alpha,
        "analytic_boundaries": rm.analytic_boundaries,
        "numeric_boundaries": rm.numeric_boundaries,
        "discrepancy_notes": rm.notes,
    }
    for note in rm.notes:
        L.warning("%s", note)
    return [
        write_rows(os.path.join(args.out, "regimes.csv"), ("p", "classification"),
                   [(p, regime.value) for p, regime in rm.entries]),
        write_json(os.path.join(args.out, "regimes.json"), doc),
    ]


def oracle_rows(grid, mismatches):
    """Deviation between the optics-derived and closed-form channels for each (p, z)."""
    rows = []
    for z in mismatches:
        for p in grid:
            derived = derive_kraus(displaced_sagnac(p), mismatch=z)
            expected = correlated_adc_kraus(p, z, embed_not=True)
            row = {"p": p, "z": z.to_json(), "deviation": match_kraus_sets(derived.operators, expected.operators)}
            if z.exploratory:
                row["note"] = EXPLORATORY_NOTE
            rows.append(row)
    return rows


def cmd_verify_oracle(manifest, args):
    """Compiles the interferometer and compares its Kraus sets with the closed forms."""
    grid = uniform_grid(_grid_points(args, manifest))
    rows = oracle_rows(grid, [manifests.mismatch(z) for z in manifest["z"]])
    single = []
    for p in grid:
        leg = derive_single_kraus(displaced_sagnac(p, not_plate=False, second_plate=False),
                                  groups=[("a", "a'"), ("b",)])
        single.append(match_kraus_sets(leg.operators, adc_pair(p)))
    checked = [r["deviation"] for r in rows if "note" not in r] + single
    worst = max(checked) if checked else 0.0
    tolerance = manifest["tolerance"]
    report = {
        "tolerance": tolerance,
        "rows": rows,
        "single_photon_deviation": single,
        "max_deviation": worst,
        "passed": worst <= tolerance,
    }
    path = write_json(os.path.join(args.out, "oracle.json"), report)
    if worst > tolerance:
        raise ToleranceError("oracle deviation %.3e exceeds tolerance %.3e" % (worst, tolerance))
    return [path]


def cmd_error_report(manifest, args):
    """First-order and Monte Carlo concurrence shifts of an error budget."""
    budget = manifests.error_budget(manifest)
    point = manifests.operating_point(manifest)
    notes = []
    report = {
        "budget": json.loads(budget.to_json()),
        "alpha": point.state.alpha,
        "p": point.p,
        "P": point.P,
        "z": point.z.to_json(),
        "samples": manifest["samples"],
        "seed": manifest.seed,
    }
    try:
        first = delta_c_for_budget(budget, point, correlated=manifest["correlated"])
        report.update(first.to_json())
        report["state_parameter_spread"] = spread_over_state_parameter(budget, point)
    except DegeneracyError as e:
        L.warning("first-order shift unavailable: %s", e)
        notes.append(str(e))
        report["delta_c_first_order"] = None
    mc = monte_carlo_delta_c(point, budget, samples=manifest["samples"], seed=manifest.seed)
    report.update({
        "delta_c_mc_mean": mc.delta_C,
        "delta_c_mc_std": mc.std,
        "delta_c_mc_spread": mc.spread,
        "delta_c_mc_standard_error": mc.standard_error,
        "notes": notes,
    })
    rows = concurrence_vs_alpha(uniform_grid(_grid_points(args, manifest)), budget, point)
    columns = ("alpha", "ideal", "imperfect", "delta_c_first_order")
    return [
        write_json(os.path.join(args.out, "error_report.json"), report),
        write_rows(os.path.join(args.out, "concurrence_vs_alpha.csv"), columns,
                   [tuple(float(row[c]) for c in columns) for row in rows]),
    ] + _plot("plot_concurrence_vs_alpha", os.path.join(args.out, "concurrence_vs_alpha.svg"), rows)


def _tomography_state(manifest):
    d = manifest.document
    if d["p"] == 0 and d["P"] == 0 and not d["apply_not"]:
        return make_state(manifest.state())
    cfg = ProtocolConfig(state=manifest.state(), p=d["p"], z=manifest.mismatch(), apply_not=d["apply_not"],
                         P_grid=[d["P"]], tomography_comparison=True)
    return renormalize(evolve(cfg, d["P"]))


def cmd_tomo_sim(manifest, args):
    """Simulated coincidence counts of a pipeline state and its reconstruction."""
    rho = _tomography_state(manifest)
    pairs = manifest["pairs"]
    settings = standard_settings(manifest["settings"], pairs)
    counts_seed, repeat_seed = np.random.SeedSequence(manifest.seed).spawn(2)
    records = simulate_counts(rho, settings, pairs, counts_seed, manifest["noiseless"])
    estimate = reconstruct(records, manifest["method"], settings)
    repeated = repeated_qst(rho, settings, pairs, manifest["iterations"], repeat_seed, manifest["method"],
                            manifest["noiseless"])
    doc = dict(reconstruction_report(rho, estimate),
               method=manifest["method"], settings=len(settings), pairs_per_setting=settings[0].duration_counts,
               seed=manifest.seed, noiseless=manifest["noiseless"],
               estimate={"real": np.real(estimate.matrix).tolist(), "imag": np.imag(estimate.matrix).tolist()},
               repeated={"mean": repeated.mean, "std": repeated.std, "concurrences": repeated.concurrences,
                         "fidelities": repeated.fidelities})
    L.info("reconstructed concurrence %.6g (true %.6g)", doc["concurrence"], concurrence(rho))
    counts_path = os.path.join(args.out, "counts.csv")
    write_counts(counts_path, records)
    return [counts_path, write_json(os.path.join(args.out, "reconstruction.json"), doc)]


COMMANDS = {
    "sweep": cmd_sweep,
    "characterize-first": cmd_characterize_first,
    "characterize-second": cmd_characterize_second,
    "regimes": cmd_regimes,
    "verify-oracle": cmd_verify_oracle,
    "error-report": cmd_error_report,
    "tomo-sim": cmd_tomo_sim,
}


def seed_type(text):
    try:
        value = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError("seed must be an integer, got %r" % text)
    if not 0 <= value <= manifests.MAX_SEED:
        raise argparse.ArgumentTypeError("seed must be in [0, 2**64 - 1]")
    return value


def grid_points_type(text):
    try:
        value = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError("grid points must be an integer, got %r" % text)
    if value < 2:
        raise argparse.ArgumentTypeError("a grid needs at least 2 points")
    return value


def build_parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--manifest", help="JSON manifest configuring the run")
    common.add_argument("--out", default=".", help="output directory (default: current directory)")
    common.add_argument("--seed", type=seed_type, help="override the manifest seed")
    common.add_argument("--grid-points", type=grid_points_type, help="override the manifest grid size")
    common.add_argument("--log-level", type=str.upper, choices=LOG_LEVELS,
                        help="logging level (default: ESDLAB_LOG_LEVEL)")

    parser = argparse.ArgumentParser(prog="esdlab", description="Entanglement sudden death manipulation lab")
    subparsers = parser.add_subparsers(dest="command", metavar="command", required=True)
    for name, handler in COMMANDS.items():
        subparsers.add_parser(name, parents=[common], help=handler.__doc__.strip().splitlines()[0],
                              description=handler.__doc__.strip())
    return parser


def configure_logging(level):
    level = level or os.environ.get("ESDLAB_LOG_LEVEL", "WARNING").upper()
    logging.basicConfig(format="%(name)s %(levelname)s: %(message)s", stream=sys.stderr)
    logging.getLogger("esdlab").setLevel(level)


def run(args):
    """Runs one parsed command line and returns the written paths."""
    if args.manifest:
        manifest = manifests.load_manifest(args.manifest, args.command)
    else:
        manifest = manifests.default_manifest(args.command)
    if args.seed is not None:
        manifest.document["seed"] = args.seed
    os.makedirs(args.out, exist_ok=True)
    return COMMANDS[args.command](manifest, args)


def main(argv=None):
    args = build_parser().parse_args(argv)
    configure_logging(args.log_level)
    try:
        for path in run(args):
            print(path)
    except EsdlabError as e:
        L.error("%s failed: %s", args.command, e)
        print("error: %s" % e, file=sys.stderr)
        return 1
    return 0
