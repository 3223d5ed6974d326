"""Command-line driver: sequence design, PAPR evaluation, phase transitions,
AUD/CE simulation campaigns, and baseline set construction.

All outputs are deterministic given the flags (including --seed): re-running a
command rewrites byte-identical files. CSV numeric fields carry 17 significant
digits; descriptors and dense matrices are stored as version-tagged JSON.

Exit codes: 0 success, 2 usage error, 3 validation error.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import numpy as np

from . import __version__, baselines, cssim, ga, papr as papr_mod, seqcore

TOOL = f"gfseq {__version__}"

DESCRIPTOR_VERSION = 1
MATRIX_VERSION = 1

COST_FLAG_TO_VARIANT = {"avg": ga.WELCH_AVERAGE, "coh": ga.COHERENCE}


class ValidationError(Exception):
    """Input file or flag combination violates a documented invariant."""


def _fmt(x) -> str:
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    return format(float(x), ".17g")


def write_csv(path: Path, header: list[str], rows) -> None:
    with open(path, "w", newline="") as f:
        f.write(",".join(header) + "\n")
        for row in rows:
            f.write(",".join(_fmt(v) for v in row) + "\n")


def write_json(path: Path, payload: dict) -> None:
    with open(path, "w", newline="") as f:
        json.dump(payload, f, indent=2)
        f.write("\n")


# ---------------------------------------------------------------------------
# descriptor and matrix files

def descriptor_payload(kind: seqcore.UnitaryKind, result: ga.DesignResult,
                       cfg1: ga.GaConfig, cfg2: ga.GaConfig,
                       papr_cfg: papr_mod.PaprConfig) -> dict:
    desc = result.sequence_set.descriptor
    return {
        "version": DESCRIPTOR_VERSION,
        "tool": TOOL,
        "unitary": kind.kind,
        "n": kind.n,
        "m": len(desc.omega),
        "omega": list(desc.omega.indices),
        "mask": list(desc.mask.phases),
        "mask_q": desc.mask.q,
        "cost_variant": cfg1.cost_variant,
        "cost_f1": result.cost_f1,
        "delta": cfg2.delta,
        "oversample": papr_cfg.oversampling,
        "cost_f2": result.cost_f2,
        "stage1": _ga_echo(cfg1),
        "stage2": _ga_echo(cfg2),
    }


def _ga_echo(cfg: ga.GaConfig) -> dict:
    return {
        "population_size": cfg.population_size,
        "crossover_rate": cfg.crossover_rate,
        "mutation_count": cfg.mutation_count,
        "max_iterations": cfg.max_iterations,
        "seed": cfg.seed,
    }


def load_descriptor(path: Path) -> tuple[seqcore.SequenceSet, dict]:
    """Read a descriptor file, rebuild the set, and verify the recorded costs."""
    try:
        doc = json.loads(path.read_text())
    except (OSError, json.JSONDecodeError) as e:
        raise ValidationError(f"cannot read descriptor {path}: {e}") from e
    try:
        if doc.get("version") != DESCRIPTOR_VERSION:
            raise ValidationError(f"unsupported descriptor version {doc.get('version')!r}")
        kind = seqcore.UnitaryKind(doc["unitary"], int(doc["n"]))
        omega = seqcore.IndexSet(kind.n, tuple(doc["omega"]))
        mask = None
        if doc.get("mask") is not None:
            mask = seqcore.MaskSequence(int(doc["mask_q"]), tuple(doc["mask"]))
        partial = seqcore.subsample(seqcore.unitary_matrix(kind), omega, kind)
    except (KeyError, TypeError, ValueError) as e:
        raise ValidationError(f"corrupt descriptor {path}: {e}") from e
    if len(omega) != int(doc["m"]):
        raise ValidationError("corrupt descriptor: omega length does not match m")
    variant = doc.get("cost_variant", ga.WELCH_AVERAGE)
    if variant == ga.COHERENCE:
        f1 = seqcore.coherence(partial)
    else:
        f1 = seqcore.welch_cost_f1(partial)
    if abs(f1 - float(doc["cost_f1"])) > 1e-9:
        raise ValidationError(
            f"descriptor invariant violated: recomputed cost_f1 {f1!r} != recorded {doc['cost_f1']!r}")
    full = partial
    if mask is not None:
        full = seqcore.apply_mask(partial, mask)
        if doc.get("cost_f2") is not None:
            papr_cfg = papr_mod.PaprConfig(int(doc.get("oversample", 16)))
            f2 = papr_mod.cost_f2(full, float(doc.get("delta", 30.0)), papr_cfg)
            if abs(f2 - float(doc["cost_f2"])) > 1e-9:
                raise ValidationError(
                    f"descriptor invariant violated: recomputed cost_f2 {f2!r} != recorded {doc['cost_f2']!r}")
    return full, doc


def matrix_payload(kind: str, a: seqcore.SequenceSet, seed: int, trials: int) -> dict:
    entries = [[[float(z.real), float(z.imag)] for z in row] for row in a.matrix]
    return {
        "version": MATRIX_VERSION,
        "tool": TOOL,
        "kind": kind,
        "m": a.m,
        "n": a.n,
        "seed": seed,
        "trials": trials,
        "coherence": seqcore.coherence(a),
        "entries": entries,
    }


def load_matrix(path: Path) -> seqcore.SequenceSet:
    try:
        doc = json.loads(path.read_text())
    except (OSError, json.JSONDecodeError) as e:
        raise ValidationError(f"cannot read matrix {path}: {e}") from e
    try:
        if doc.get("version") != MATRIX_VERSION:
            raise ValidationError(f"unsupported matrix version {doc.get('version')!r}")
        entries = np.asarray(doc["entries"], dtype=np.float64)
        if entries.ndim != 3 or entries.shape[2] != 2:
            raise ValidationError("corrupt matrix: entries must be [re, im] pairs")
        mat = entries[..., 0] + 1j * entries[..., 1]
        if mat.shape != (int(doc["m"]), int(doc["n"])):
            raise ValidationError("corrupt matrix: shape does not match m x n")
        return seqcore.SequenceSet(mat, label=doc.get("kind", "matrix"))
    except (KeyError, TypeError, ValueError) as e:
        raise ValidationError(f"corrupt matrix {path}: {e}") from e


def load_set(args) -> seqcore.SequenceSet:
    if getattr(args, "descriptor", None):
        return load_descriptor(Path(args.descriptor))[0]
    if getattr(args, "matrix", None):
        return load_matrix(Path(args.matrix))
    raise ValidationError("one of --descriptor or --matrix is required")


# ---------------------------------------------------------------------------
# commands

def cmd_design(args) -> int:
    kind = seqcore.UnitaryKind(args.unitary, args.n)
    cfg1 = ga.GaConfig(args.pop, args.beta, args.mu, args.iters1, args.seed,
                       cost_variant=COST_FLAG_TO_VARIANT[args.cost])
    cfg2 = ga.GaConfig(args.pop, args.beta, args.mu, args.iters2, args.seed + 1,
                       delta=args.delta)
    papr_cfg = papr_mod.PaprConfig(args.oversample)
    result = ga.run_two_stage(kind, args.m, cfg1, cfg2, papr_cfg)
    write_json(Path(f"{args.out}.json"), descriptor_payload(kind, result, cfg1, cfg2, papr_cfg))
    for name, trace in (("stage1", result.stage1_trace), ("stage2", result.stage2_trace)):
        write_csv(Path(f"{args.out}.{name}_trace.csv"),
                  ["iteration", "best_cost"], enumerate(trace))
    return 0


def cmd_papr(args) -> int:
    a = load_set(args)
    papr_cfg = papr_mod.PaprConfig(args.oversample)
    curve = papr_mod.ccdf(a, papr_cfg)
    write_csv(Path(f"{args.out}.ccdf.csv"), ["papr_db", "prob_exceed"],
              zip(curve.thresholds_db, curve.probabilities))
    summary = {
        "tool": TOOL,
        "columns": a.n,
        "subcarriers": a.m,
        "oversample": args.oversample,
        "delta": args.delta,
        "max_papr_db": papr_mod.to_db(papr_mod.max_papr(a, papr_cfg)),
        "top_delta_avg_db": papr_mod.to_db(papr_mod.cost_f2(a, args.delta, papr_cfg)),
    }
    write_json(Path(f"{args.out}.summary.json"), summary)
    return 0


def cmd_phase_transition(args) -> int:
    kind = seqcore.UnitaryKind(args.unitary, args.n)
    u = seqcore.unitary_matrix(kind)
    variant = COST_FLAG_TO_VARIANT[args.cost]

    def builder(m: int) -> seqcore.SequenceSet:
        if args.method == "ga":
            cfg = ga.GaConfig(args.pop, args.beta, args.mu, args.iters,
                              args.seed, cost_variant=variant)
            omega, _ = ga.run_stage1(u, m, cfg)
        else:
            rng = np.random.default_rng([args.seed, m])
            omega, _ = ga.random_search_stage1(u, m, args.search_trials, variant, rng)
        return seqcore.subsample(u, omega, kind)

    curve = cssim.phase_transition(
        builder, args.n, args.trials, args.snr, args.antennas, args.seed,
        mn_step=_parse_ratio(args.mn_step), km_step=_parse_ratio(args.km_step),
        threads=args.threads)
    write_csv(Path(args.out), ["m_over_n", "k_over_m_transition"],
              zip(curve.m_over_n, curve.k_over_m))
    return 0


def cmd_simulate(args) -> int:
    if args.trials < 1:
        raise ValidationError("--trials must be at least 1")
    a = load_set(args)
    snrs = _parse_sweep(args.snr)
    antennas = _parse_sweep(args.antennas)
    if len(snrs) > 1 and len(antennas) > 1:
        raise ValidationError("sweep either --snr or --antennas, not both")
    if len(antennas) > 1:
        points = [
            cssim.aud_ce_point(a, args.pa, int(j), snrs[0], args.trials, [args.seed, i],
                               threads=args.threads)
            for i, j in enumerate(antennas)
        ]
        rows = [(p.antennas, p.aer, p.nmse, p.trials) for p in points]
        header = ["antennas", "aer", "nmse", "trials"]
    else:
        points = cssim.aud_ce_campaign(a, args.pa, int(antennas[0]), snrs,
                                       args.trials, args.seed, threads=args.threads)
        rows = [(p.snr_db, p.aer, p.nmse, p.trials) for p in points]
        header = ["snr_db", "aer", "nmse", "trials"]
    write_csv(Path(args.out), header, rows)
    return 0


def cmd_baseline(args) -> int:
    rng = np.random.default_rng(args.seed)
    if args.kind == baselines.GAUSSIAN:
        a = baselines.gaussian_set(args.m, args.n, args.trials, rng)
    elif args.kind == baselines.MUSA:
        a = baselines.musa_set(args.m, args.n, args.trials, rng)
    else:
        a = baselines.zc_prime_set(args.m, args.n, papr_mod.PaprConfig(args.oversample))
    write_json(Path(args.out), matrix_payload(args.kind, a, args.seed, args.trials))
    return 0


# ---------------------------------------------------------------------------
# flag parsing

def _parse_ratio(text: str) -> float:
    if "/" in text:
        num, den = text.split("/", 1)
        return float(num) / float(den)
    return float(text)


def _parse_sweep(text: str) -> list[float]:
    """Either a single value or an inclusive start:step:stop range."""
    parts = text.split(":")
    if len(parts) == 1:
        return [float(parts[0])]
    if len(parts) != 3:
        raise ValidationError(f"bad sweep {text!r}: use value or start:step:stop")
    start, step, stop = (float(p) for p in parts)
    if step <= 0 or stop < start:
        raise ValidationError(f"bad sweep {text!r}: need step > 0 and stop >= start")
    count = int(np.floor((stop - start) / step + 1e-9)) + 1
    return [start + i * step for i in range(count)]


def _add_common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--seed", type=int, default=0, help="master RNG seed")
    p.add_argument("--threads", type=int, default=1,
                   help="Monte Carlo worker threads (0 = auto)")
    p.add_argument("--out", required=True, help="output path (or prefix for multi-file commands)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="gfseq", description=__doc__.split("\n\n")[0])
    parser.add_argument("--version", action="version", version=TOOL)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("design", help="run the two-stage GA and store the descriptor")
    p.add_argument("--unitary", choices=[seqcore.FOURIER, seqcore.ZC], default=seqcore.FOURIER)
    p.add_argument("--n", type=int, required=True, help="number of sequences N")
    p.add_argument("--m", type=int, required=True, help="sequence length M")
    p.add_argument("--pop", type=int, default=20, help="population size per stage")
    p.add_argument("--beta", type=float, default=0.7, help="crossover rate in (0.5, 1)")
    p.add_argument("--mu", type=int, default=1, help="mutation count per chromosome")
    p.add_argument("--iters1", type=int, default=500, help="stage-1 iteration budget")
    p.add_argument("--iters2", type=int, default=2000, help="stage-2 iteration budget")
    p.add_argument("--cost", choices=["avg", "coh"], default="avg",
                   help="stage-1 cost: Welch-average distance or coherence")
    p.add_argument("--delta", type=float, default=30.0, help="top-percent width of the PAPR cost")
    p.add_argument("--oversample", type=int, default=16)
    _add_common(p)
    p.set_defaults(fn=cmd_design)

    p = sub.add_parser("papr", help="CCDF and max/top-percent PAPR of a stored set")
    p.add_argument("--descriptor", help="descriptor JSON from `design`")
    p.add_argument("--matrix", help="dense matrix JSON from `baseline`")
    p.add_argument("--oversample", type=int, default=16)
    p.add_argument("--delta", type=float, default=30.0)
    _add_common(p)
    p.set_defaults(fn=cmd_papr)

    p = sub.add_parser("phase-transition", help="K/M transition curve over M/N")
    p.add_argument("--unitary", choices=[seqcore.FOURIER, seqcore.ZC], default=seqcore.FOURIER)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--method", choices=["ga", "random"], default="ga",
                   help="subsampling by stage-1 GA or best-of-random search")
    p.add_argument("--cost", choices=["avg", "coh"], default="avg")
    p.add_argument("--iters", type=int, default=500, help="stage-1 budget (ga method)")
    p.add_argument("--pop", type=int, default=20)
    p.add_argument("--beta", type=float, default=0.7)
    p.add_argument("--mu", type=int, default=1)
    p.add_argument("--search-trials", type=int, default=500,
                   help="random draws (random method)")
    p.add_argument("--mn-step", default="1/32", help="M/N grid step (fraction or float)")
    p.add_argument("--km-step", default="0.01", help="K/M grid step")
    p.add_argument("--snr", type=float, default=20.0, help="SNR in dB")
    p.add_argument("--antennas", type=int, default=8)
    p.add_argument("--trials", type=int, default=10000, help="reconstructions per grid point")
    _add_common(p)
    p.set_defaults(fn=cmd_phase_transition)

    p = sub.add_parser("simulate", help="AER/NMSE campaign with blind SOMP")
    p.add_argument("--descriptor")
    p.add_argument("--matrix")
    p.add_argument("--pa", type=float, default=0.1, help="device activity probability")
    p.add_argument("--snr", default="0:3:12", help="received SNR per device, dB (value or start:step:stop)")
    p.add_argument("--antennas", default="16", help="BS antennas (value or start:step:stop)")
    p.add_argument("--trials", type=int, default=10000, help="access trials per point")
    _add_common(p)
    p.set_defaults(fn=cmd_simulate)

    p = sub.add_parser("baseline", help="construct a comparison sequence set")
    p.add_argument("--kind", choices=[baselines.GAUSSIAN, baselines.MUSA, baselines.ZC_PRIME],
                   required=True)
    p.add_argument("--m", type=int, required=True)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--trials", type=int, default=1000,
                   help="candidate draws for best-of-coherence selection")
    p.add_argument("--oversample", type=int, default=16, help="PAPR oversampling for root ranking")
    _add_common(p)
    p.set_defaults(fn=cmd_baseline)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.fn(args)
    except (ValidationError, ValueError) as e:
        print(f"error: {e}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
