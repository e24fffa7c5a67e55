"""Command-line client for the solver service.

Subcommands mirror the service endpoints one-to-one.  By default requests are
executed in-process (no server needed); pass ``--server URL`` to send them to
a running service instead.  File handling stays on the client: instances are
read from and written to disk here, and bench results land in a local CSV.

Exit codes: 0 on success, 1 on usage or input errors, 2 when a single solve
finds no feasible solution.
"""

from __future__ import annotations

import argparse
import csv
import json
import sys
from pathlib import Path
from typing import NoReturn

import numpy as np
from pydantic import ValidationError

from .bench import InstanceRecord, write_records_csv
from .instance import InstanceFormatError, instance_from_dict, save_instance
from .qubo import CapacityError
from .service import main as _service
from .service.models import (
    BenchRequest,
    BenchResponse,
    ExactRequest,
    ExactResponse,
    FitRequest,
    FitResponse,
    GenerateRequest,
    InstanceModel,
    SolveRequest,
    SolveResponse,
)

_LOCAL = {
    "/generate": (_service.generate, InstanceModel),
    "/solve": (_service.solve, SolveResponse),
    "/exact": (_service.exact, ExactResponse),
    "/bench": (_service.bench, BenchResponse),
    "/fit": (_service.fit, FitResponse),
}


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        sys.exit(1)


def _fail(message: str) -> NoReturn:
    print(f"error: {message}", file=sys.stderr)
    sys.exit(1)


def _call(args, path, request):
    if args.server:
        import httpx

        resp = httpx.post(args.server.rstrip("/") + path,
                          json=request.model_dump(mode="json"), timeout=None)
        if resp.status_code != 200:
            try:
                detail = resp.json().get("detail", resp.text)
            except ValueError:
                detail = resp.text
            _fail(f"server returned {resp.status_code}: {detail}")
        return _LOCAL[path][1].model_validate(resp.json())
    return _LOCAL[path][0](request)


def _load_instance_model(path: str) -> InstanceModel:
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        _fail(f"cannot read instance file: {exc}")
    try:
        return InstanceModel.model_validate(json.loads(text))
    except (json.JSONDecodeError, ValidationError) as exc:
        _fail(f"{path}: {exc}")


def _cmd_generate(args) -> int:
    model = _call(args, "/generate", GenerateRequest(n=args.n, m=args.m, seed=args.seed))
    save_instance(instance_from_dict(model.model_dump()), args.out)
    return 0


def _cmd_solve(args) -> int:
    initial = None
    if args.initial:
        try:
            initial = json.loads(Path(args.initial).read_text(encoding="utf-8"))
        except (OSError, json.JSONDecodeError) as exc:
            _fail(f"cannot read initial solutions: {exc}")
    req = SolveRequest(
        instance=_load_instance_model(args.instance),
        pricing=args.pricing, alpha_f=args.alpha_f, alpha_l=args.alpha_l,
        max_flips=args.max_flips, seed=args.seed, sa_reads=args.sa_reads,
        sa_sweeps=args.sa_sweeps, sa_beta_initial=args.sa_beta_initial,
        sa_beta_final=args.sa_beta_final, rc_tolerance=args.rc_tolerance,
        max_iterations=args.max_iterations, initial=initial)
    resp = _call(args, "/solve", req)
    print(json.dumps(resp.model_dump()))
    return 0 if resp.feasible else 2


def _cmd_exact(args) -> int:
    resp = _call(args, "/exact", ExactRequest(instance=_load_instance_model(args.instance)))
    print(json.dumps(resp.model_dump()))
    return 0


def _cmd_bench(args) -> int:
    req = BenchRequest(
        n_list=args.n_list, ratio_list=args.ratio_list, instances=args.instances,
        seed=args.seed, methods=args.methods.split(","), alpha_f=args.alpha_f,
        alpha_l=args.alpha_l, max_flips=args.max_flips, sa_reads=args.sa_reads,
        sa_sweeps=args.sa_sweeps, sa_beta_initial=args.sa_beta_initial,
        sa_beta_final=args.sa_beta_final, rc_tolerance=args.rc_tolerance,
        max_iterations=args.max_iterations, jobs=args.jobs)
    resp = _call(args, "/bench", req)
    records = [InstanceRecord(**r.model_dump()) for r in resp.records]
    with open(args.csv, "w", encoding="utf-8") as fh:
        write_records_csv(records, fh)
    for line in _cell_summaries(records):
        print(line)
    return 0


def _cell_summaries(records) -> list[str]:
    cells: dict[tuple, list[InstanceRecord]] = {}
    for r in records:
        cells.setdefault((r.n, r.ratio, r.method), []).append(r)
    lines = []
    for (n, ratio, method), recs in sorted(cells.items()):
        feas = sum(r.feasible for r in recs)
        errs = [r.relative_error for r in recs if r.relative_error is not None]
        parts = [f"n={n}", f"m/n={ratio:g}", f"method={method}",
                 f"feasible={feas}/{len(recs)}"]
        if errs:
            mean = float(np.mean(errs))
            stderr = float(np.std(errs, ddof=1) / np.sqrt(len(errs))) if len(errs) > 1 else 0.0
            parts.append(f"rel_err={mean:.4g}+-{stderr:.2g}")
        iters = [r.cg_iterations for r in recs if r.cg_iterations is not None]
        if iters:
            parts.append(f"cg_iters={float(np.mean(iters)):.4g}")
        lines.append("  ".join(parts))
    return lines


def _cmd_fit(args) -> int:
    try:
        with open(args.csv, encoding="utf-8") as fh:
            rows = list(csv.DictReader(fh))
    except OSError as exc:
        _fail(f"cannot read CSV: {exc}")
    if not rows or args.x_col not in rows[0] or args.y_col not in rows[0]:
        _fail(f"CSV must contain columns {args.x_col!r} and {args.y_col!r}")
    points = [(float(r[args.x_col]), float(r[args.y_col]))
              for r in rows if r[args.x_col] and r[args.y_col]]
    try:
        resp = _call(args, "/fit", FitRequest(points=points))
    except ValueError as exc:
        _fail(str(exc))
    print(json.dumps({"a": resp.a, "b": resp.b}))
    return 0


def _cmd_serve(args) -> int:
    import uvicorn

    uvicorn.run(service_app.app, host=args.host, port=args.port)
    return 0


def _int_list(text: str) -> list[int]:
    try:
        return [int(v) for v in text.split(",") if v]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}")


def _float_list(text: str) -> list[float]:
    try:
        return [float(v) for v in text.split(",") if v]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}")


def _add_common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--server", default=None,
                   help="base URL of a running service; default runs in-process")


def _add_solver_options(p: argparse.ArgumentParser) -> None:
    p.add_argument("--alpha-f", type=float, default=0.1, help="efficiency weight, restoration phase")
    p.add_argument("--alpha-l", type=float, default=0.9, help="efficiency weight, local optimization")
    p.add_argument("--max-flips", type=int, default=1000, help="restoration flip cap T")
    p.add_argument("--seed", type=int, default=0, help="base seed for stochastic components")
    p.add_argument("--sa-reads", type=int, default=20, help="annealing reads per pricing call")
    p.add_argument("--sa-sweeps", type=int, default=1000, help="sweeps per annealing read")
    p.add_argument("--sa-beta-initial", type=float, default=0.1, help="initial inverse temperature")
    p.add_argument("--sa-beta-final", type=float, default=10.0, help="final inverse temperature")
    p.add_argument("--rc-tolerance", type=float, default=1e-9, help="reduced-cost convergence tolerance")
    p.add_argument("--max-iterations", type=int, default=200, help="column-generation iteration cap")


def _build_parser() -> _Parser:
    parser = _Parser(prog="cgqp", description=__doc__.splitlines()[0],
                     formatter_class=argparse.ArgumentDefaultsHelpFormatter)
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def add(name, func, help_text):
        p = sub.add_parser(name, help=help_text,
                           formatter_class=argparse.ArgumentDefaultsHelpFormatter)
        p.set_defaults(func=func)
        _add_common(p)
        return p

    p = add("generate", _cmd_generate, "write a random benchmark instance file")
    p.add_argument("--n", type=int, required=True, help="number of binary variables")
    p.add_argument("--m", type=int, required=True, help="number of constraints")
    p.add_argument("--seed", type=int, default=0, help="generator seed")
    p.add_argument("--out", required=True, help="output instance path")

    p = add("solve", _cmd_solve, "solve an instance (CG + postprocessing), print JSON")
    p.add_argument("--instance", required=True, help="instance file path")
    p.add_argument("--pricing", choices=["exact", "sa"], default="exact", help="pricing backend")
    p.add_argument("--initial", default=None,
                   help="JSON file with initial solutions (list of 0/1 lists); default (1,0,...,0)")
    _add_solver_options(p)

    p = add("exact", _cmd_exact, "enumerate the exact optimum, print JSON")
    p.add_argument("--instance", required=True, help="instance file path")

    p = add("bench", _cmd_bench, "run a benchmark sweep and write a CSV")
    p.add_argument("--n-list", type=_int_list, required=True, help="comma-separated sizes, e.g. 10,16")
    p.add_argument("--ratio-list", type=_float_list, required=True,
                   help="comma-separated m/n ratios, e.g. 0.2,0.4")
    p.add_argument("--instances", type=int, required=True, help="instances per (n, ratio) cell")
    p.add_argument("--methods", default="cg_exact_pp,random_pp",
                   help="comma-separated subset of cg_exact_pp,cg_sa_pp,random_pp")
    p.add_argument("--csv", required=True, help="output CSV path")
    p.add_argument("--jobs", type=int, default=1, help="parallel worker processes")
    _add_solver_options(p)

    p = add("fit", _cmd_fit, "fit y = exp(a*x + b) to two CSV columns, print a and b")
    p.add_argument("--csv", required=True, help="input CSV path")
    p.add_argument("--x-col", default="n", help="x column name")
    p.add_argument("--y-col", default="time_total_ms", help="y column name")

    p = add("serve", _cmd_serve, "run the HTTP service")
    p.add_argument("--host", default="127.0.0.1", help="bind address")
    p.add_argument("--port", type=int, default=8000, help="bind port")

    return parser


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (InstanceFormatError, CapacityError, ValidationError, ValueError) as exc:
        _fail(str(exc))


if __name__ == "__main__":
    sys.exit(main())
