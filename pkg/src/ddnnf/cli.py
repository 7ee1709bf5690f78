"""Command-line surface: each subcommand is a pure file-to-file transform.

Exit codes: 0 on success, 1 on domain errors (bad input data, oracle bounds,
budget), 2 on usage errors.
"""

from __future__ import annotations

import argparse
import sys
from dataclasses import replace
from pathlib import Path

from . import bench as bench_mod
from . import formula as fm
from .circuit import Circuit, check_decomposable, check_deterministic_oracle, stats_line, write_nnf
from .cnf import (
    CnfInstance,
    DimacsError,
    detect_tseitin_vars,
    format_tvars,
    parse_dimacs,
    parse_tvars,
    write_dimacs,
)
from .compiler import CompileConfig, NnfFormatError, compile, parse_nnf
from .counting import WeightMap, model_count, weighted_model_count
from .errors import OracleBoundError, ToolkitError
from .formula import ParseError
from .oracle import check_exists_equiv, enumerate_models, is_tautology_after_exists, oracle_bound
from .pruning import artifact_flags, exists_quantify, prune


def main(argv=None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except OSError as exc:
        print(f"file error: {exc}", file=sys.stderr)
    except (ParseError, DimacsError, NnfFormatError) as exc:
        print(f"parse error: {exc}", file=sys.stderr)
    except OracleBoundError as exc:
        print(f"oracle error: {exc}", file=sys.stderr)
    except (ToolkitError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
    return 1


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="ddnnf",
        description="Encode formulas to CNF, compile to d-DNNF, prune gate "
        "variables and their artifacts, and count models.",
    )
    sub = parser.add_subparsers(required=True, metavar="command")

    p = sub.add_parser("tseitin", help="encode a formula file as DIMACS CNF")
    p.add_argument("input", help="formula file (.bool)")
    p.add_argument("-o", "--output", help="CNF output path (default: <input>.cnf)")
    p.set_defaults(func=cmd_tseitin)

    p = sub.add_parser("detect", help="recover gate variables from a CNF")
    p.add_argument("input", help="DIMACS CNF file")
    p.add_argument("-o", "--output", help="tvars sidecar path (default: <input>.tvars)")
    p.set_defaults(func=cmd_detect)

    p = sub.add_parser("compile", help="compile a CNF to a d-DNNF circuit")
    p.add_argument("input", help="DIMACS CNF file")
    p.add_argument("-o", "--output", help="NNF output path (default: <input>.nnf)")
    _add_order_options(p)
    p.add_argument("--tvars", help="tvars sidecar to embed (default: <input>.tvars if present)")
    p.add_argument("--max-decisions", type=int, help="abort after this many branch decisions")
    p.set_defaults(func=cmd_compile)

    p = sub.add_parser("prune", help="quantify gate variables and remove artifacts")
    p.add_argument("input", help="NNF circuit file")
    p.add_argument("--tvars", help="tvars sidecar (default: embedded in the NNF)")
    p.add_argument("--mode", choices=("p", "t"), default="t",
                   help="p: quantify only; t: also remove artifacts (default)")
    p.add_argument("--format", choices=("c2d", "d4"), default="c2d")
    p.add_argument("-o", "--output", help="output path (default: <input>.pruned.nnf)")
    p.set_defaults(func=cmd_prune)

    p = sub.add_parser("count", help="exact model count of a circuit")
    p.add_argument("input", help="NNF circuit file")
    p.add_argument("--format", choices=("c2d", "d4"), default="c2d")
    p.set_defaults(func=cmd_count)

    p = sub.add_parser("wmc", help="weighted model count of a circuit")
    p.add_argument("input", help="NNF circuit file")
    p.add_argument("--weights", required=True, help="weights file (w <lit> <value> lines)")
    p.add_argument("--exact", action="store_true", help="exact rational arithmetic")
    p.add_argument("--format", choices=("c2d", "d4"), default="c2d")
    p.set_defaults(func=cmd_wmc)

    p = sub.add_parser("verify", help="run brute-force oracle checks on a file")
    p.add_argument("input", help="formula (.bool), CNF (.cnf), or circuit (.nnf)")
    _add_order_options(p)
    p.add_argument("--tvars", help="tvars sidecar for CNF/NNF inputs")
    p.add_argument("--format", choices=("c2d", "d4"), default="c2d")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("bench", help="size-reduction report over generated instances")
    p.add_argument("--family", required=True, choices=("overlap", "noisy_or", "mutex"))
    p.add_argument("--sizes", required=True, help="e.g. '2..10' or '2,4,8'")
    p.add_argument("--seed", type=int, default=0, help="instance seed (mutex family)")
    p.add_argument("--parents", type=int, default=2, help="parents per node (mutex family)")
    _add_order_options(p, default_heuristic="dyn", seed_flag="--order-seed")
    p.add_argument("--max-decisions", type=int)
    p.add_argument("--no-verify", action="store_true", help="skip oracle verification")
    p.add_argument("-o", "--output", help="CSV output path (default: stdout only)")
    p.set_defaults(func=cmd_bench)

    p = sub.add_parser("stats", help="print circuit size metrics")
    p.add_argument("input", help="NNF circuit file")
    p.add_argument("--format", choices=("c2d", "d4"), default="c2d")
    p.set_defaults(func=cmd_stats)

    return parser


def _add_order_options(
    p: argparse.ArgumentParser,
    default_heuristic: str = "input",
    seed_flag: str = "--seed",
) -> None:
    p.add_argument("--order", help="explicit branch order, comma-separated variables")
    p.add_argument("--heuristic", choices=("input", "dyn", "random"), default=default_heuristic)
    p.add_argument(seed_flag, type=int, default=None, dest="order_seed",
                   help="seeded-random branch order (implies --heuristic random)")


def _config_from_args(args) -> CompileConfig:
    if getattr(args, "order", None):
        order = tuple(int(t) for t in args.order.replace(",", " ").split())
        return CompileConfig(order=order, max_decisions=getattr(args, "max_decisions", None))
    heuristic = {"input": "input", "dyn": "dynamic", "random": "random"}[args.heuristic]
    seed = getattr(args, "order_seed", None)
    if seed is not None and heuristic == "input":
        heuristic = "random"
    return CompileConfig(
        order=heuristic,
        seed=seed if seed is not None else 0,
        max_decisions=getattr(args, "max_decisions", None),
    )


def _with_suffix(path: str, suffix: str) -> Path:
    p = Path(path)
    return p.with_name(p.stem + suffix)


def _load_circuit(args) -> Circuit:
    circuit = parse_nnf(Path(args.input).read_text(), format=getattr(args, "format", "c2d"))
    tvars_path = getattr(args, "tvars", None)
    if tvars_path:
        tvars = parse_tvars(Path(tvars_path).read_text())
        if not tvars <= circuit.universe:
            raise ValueError("tvars sidecar lists variables outside the circuit universe")
        circuit.tseitin_vars = frozenset(tvars)
    return circuit


def cmd_tseitin(args) -> int:
    f = fm.parse_formula(Path(args.input).read_text())
    out = fm.tseitin_transform(f)
    cnf_path = Path(args.output) if args.output else _with_suffix(args.input, ".cnf")
    cnf_path.write_text(write_dimacs(out.cnf))
    _with_suffix(str(cnf_path), ".tvars").write_text(format_tvars(out.tseitin_vars))
    _with_suffix(str(cnf_path), ".map").write_text(fm.format_var_map(out.var_map))
    print(f"wrote {cnf_path} ({out.cnf.num_vars} vars, {len(out.cnf.clauses)} clauses, "
          f"{len(out.tseitin_vars)} tseitin)")
    return 0


def cmd_detect(args) -> int:
    cnf = parse_dimacs(Path(args.input).read_text())
    tvars = detect_tseitin_vars(cnf)
    out_path = Path(args.output) if args.output else _with_suffix(args.input, ".tvars")
    out_path.write_text(format_tvars(tvars))
    print(f"wrote {out_path} ({len(tvars)} gate variables)")
    return 0


def cmd_compile(args) -> int:
    cnf = parse_dimacs(Path(args.input).read_text())
    tvars_path = Path(args.tvars) if args.tvars else _with_suffix(args.input, ".tvars")
    if tvars_path.exists():
        cnf = replace(cnf, tseitin_vars=parse_tvars(tvars_path.read_text()))
    circuit = compile(cnf, _config_from_args(args))
    out_path = Path(args.output) if args.output else _with_suffix(args.input, ".nnf")
    out_path.write_text(write_nnf(circuit))
    print(f"wrote {out_path} ({stats_line(circuit)})")
    return 0


def cmd_prune(args) -> int:
    circuit = _load_circuit(args)
    pruned, report = prune(circuit)
    result = exists_quantify(circuit, circuit.tseitin_vars) if args.mode == "p" else pruned
    out_path = Path(args.output) if args.output else _with_suffix(args.input, ".pruned.nnf")
    out_path.write_text(write_nnf(result))
    report_path = Path(str(out_path) + ".report")
    report_path.write_text(
        "".join(f"{k}={v}\n" for k, v in report.to_key_values().items())
    )
    print(report.summary())
    print(f"wrote {out_path} and {report_path}")
    return 0


def cmd_count(args) -> int:
    print(model_count(_load_circuit(args)))
    return 0


def cmd_wmc(args) -> int:
    circuit = _load_circuit(args)
    weights = WeightMap.from_text(Path(args.weights).read_text(), exact=args.exact)
    print(weighted_model_count(circuit, weights))
    return 0


def cmd_stats(args) -> int:
    print(stats_line(_load_circuit(args)))
    return 0


def cmd_bench(args) -> int:
    sizes = _parse_sizes(args.sizes)
    report = bench_mod.run_bench(
        args.family,
        sizes,
        config=_config_from_args(args),
        seed=args.seed,
        parents=args.parents,
        oracle_check=not args.no_verify,
    )
    text = report.to_csv()
    if args.output:
        Path(args.output).write_text(text)
        print(f"wrote {args.output}")
    print(text, end="")
    return 0


def _parse_sizes(spec: str) -> list[int]:
    if ".." in spec:
        lo, hi = spec.split("..", 1)
        return list(range(int(lo), int(hi) + 1))
    return [int(t) for t in spec.replace(",", " ").split()]


def cmd_verify(args) -> int:
    path = Path(args.input)
    suffix = path.suffix.lower()
    if suffix in (".bool", ".txt"):
        results = _verify_formula(fm.parse_formula(path.read_text()), _config_from_args(args))
    elif suffix == ".cnf":
        cnf = parse_dimacs(path.read_text())
        if args.tvars:
            cnf = replace(cnf, tseitin_vars=parse_tvars(Path(args.tvars).read_text()))
        else:
            cnf = replace(cnf, tseitin_vars=detect_tseitin_vars(cnf))
        results = _verify_cnf(cnf, _config_from_args(args))
    else:
        results = _verify_circuit(_load_circuit(args))
    failed = False
    for name, ok in results:
        print(f"{'ok' if ok else 'FAIL'} {name}")
        failed |= not ok
    return 1 if failed else 0


def _verify_formula(f: fm.Formula, cfg: CompileConfig) -> list[tuple[str, bool]]:
    encoded = fm.tseitin_transform(f)
    results = [
        ("model bijection (formula vs encoded CNF)",
         enumerate_models(f).count() == enumerate_models(encoded.cnf).count()),
        ("projection recovers the formula",
         check_exists_equiv(encoded, encoded.tseitin_vars, f)),
    ]
    results.extend(_verify_cnf(encoded.cnf, cfg, reference=f, names=encoded.names()))
    return results


def _verify_cnf(cnf: CnfInstance, cfg: CompileConfig, reference=None, names=None):
    circuit = compile(cnf, cfg)
    cnf_models = enumerate_models(cnf)
    circuit_models = enumerate_models(circuit)
    results = [
        ("compiled circuit matches CNF models", cnf_models.models == circuit_models.models),
    ]
    results.extend(_verify_circuit(circuit, reference=reference, names=names))
    return results


def _verify_circuit(circuit: Circuit, reference=None, names=None) -> list[tuple[str, bool]]:
    results = [("decomposable", check_decomposable(circuit)[0])]
    results.append(("deterministic (brute force)",
                    check_deterministic_oracle(circuit, max_vars=oracle_bound())))
    counts_ok = True
    flags = artifact_flags(circuit)
    for nid in circuit.reachable():
        if (nid in flags) != is_tautology_after_exists(circuit, circuit.tseitin_vars, nid):
            counts_ok = False
            break
    results.append(("artifact flags match tautology oracle", counts_ok))
    pruned, report = prune(circuit, verify=True)
    results.append(("count preserved by pruning", model_count(pruned) == model_count(circuit)))
    results.append(("pruned circuit decomposable", check_decomposable(pruned)[0]))
    results.append(("pruned circuit deterministic (brute force)",
                    check_deterministic_oracle(pruned, max_vars=oracle_bound())))
    results.append(("sizes monotone",
                    report.size_after_artifacts <= report.size_after_exists <= report.size_before))
    if reference is not None:
        results.append(("pruned circuit projects to the source formula",
                        check_exists_equiv(pruned, frozenset(), reference, names=names)))
    return results


if __name__ == "__main__":
    sys.exit(main())
