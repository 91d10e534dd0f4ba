"""Batch command-line client of the evaluation service.

Every subcommand builds a JSON request, sends it through the service (an
in-process ASGI transport by default, or a remote instance via --server)
and renders the response as a human-readable report, optionally writing the
raw JSON document and a CSV breakdown next to it.

Exit codes: 0 success, 1 tolerance or validity failure, 2 configuration
error, 3 internal invariant violation.
"""

from __future__ import annotations

import argparse
import asyncio
import csv
import json
import sys
from typing import Optional, Tuple

import httpx

from . import config as cfgmod
from .errors import ConfigurationError

EXIT_OK = 0
EXIT_TOLERANCE = 1
EXIT_CONFIG = 2
EXIT_INTERNAL = 3


class ServiceClient:
    """Minimal POST-only client; in-process unless a server URL is given."""

    def __init__(self, server: Optional[str] = None):
        self.server = server

    def post(self, path: str, payload: dict) -> Tuple[int, dict]:
        if self.server:
            with httpx.Client(base_url=self.server, timeout=600.0) as client:
                response = client.post(path, json=payload)
            return response.status_code, response.json()

        async def run():
            from .service import create_app
            transport = httpx.ASGITransport(app=create_app())
            async with httpx.AsyncClient(transport=transport,
                                         base_url="http://torusgas") as client:
                response = await client.post(path, json=payload)
            return response.status_code, response.json()

        return asyncio.run(run())


def _fail_exit(status: int, body: dict) -> int:
    detail = body.get("detail", body)
    kind = body.get("kind", "")
    if status == 500 or kind == "consistency":
        print(f"internal error: {detail}", file=sys.stderr)
        return EXIT_INTERNAL
    print(f"config error: {detail}", file=sys.stderr)
    return EXIT_CONFIG


def _emit(args, human: str, document: dict, csv_rows=None) -> None:
    print(human)
    if args.out:
        with open(args.out + ".json", "w") as fh:
            json.dump(document, fh, indent=2, sort_keys=True)
            fh.write("\n")
        with open(args.out + ".txt", "w") as fh:
            fh.write(human + "\n")
        if csv_rows:
            with open(args.out + ".csv", "w", newline="") as fh:
                writer = csv.writer(fh)
                writer.writerows(csv_rows)


def _load_config(args) -> dict:
    if not args.config:
        raise ConfigurationError("config", "this command needs --config <path>")
    return cfgmod.parse_kv_file(args.config)


def cmd_evaluate(args, client: ServiceClient) -> int:
    cfg = _load_config(args)
    payload = {
        "system": cfgmod.system_payload(cfg),
        "potential": cfgmod.potential_payload(cfg),
        "policy": cfgmod.policy_payload(cfg),
        "threads": args.threads or cfgmod.threads_value(cfg),
    }
    status, body = client.post("/evaluate", payload)
    if status != 200:
        return _fail_exit(status, body)
    lines = [
        "Q                 = %.17g" % body["q"],
        "log Q             = %s" % (_fmt_opt(body["log_q"])),
        "free energy       = %s" % (_fmt_opt(body["free_energy"])),
        "terms evaluated   = %d" % body["term_count"],
        "invalid configs   = %d" % body["skipped_invalid_alpha"],
        "tail bound        = %.6g" % body["tail_bound"],
        "breakdown (p, alpha -> value):",
    ]
    csv_rows = [("p", "alpha", "value")]
    for row in body["breakdown"]:
        lines.append("    p=%d alpha=%d  %+.17g" % (row["p"], row["alpha"], row["value"]))
        csv_rows.append((row["p"], row["alpha"], repr(row["value"])))
    check = body.get("ideal_gas_check")
    if check is not None:
        verdict = "matches ideal-gas oracle" if check["passed"] else \
            "DEVIATES from ideal-gas oracle"
        lines.append("%s (rel diff %.3g)" % (verdict, check["rel_diff"]))
    _emit(args, "\n".join(lines), body, csv_rows)
    if check is not None and not check["passed"]:
        return EXIT_INTERNAL
    return EXIT_OK


def _fmt_opt(value) -> str:
    return "n/a (Q <= 0)" if value is None else "%.17g" % value


def cmd_oracle(args, client: ServiceClient) -> int:
    cfg = _load_config(args)
    which = args.which
    if which == "ideal-gas":
        payload = {"system": cfgmod.system_payload(cfg)}
        if args.tol:
            payload["tol"] = args.tol
        status, body = client.post("/oracle/ideal-gas", payload)
        if status != 200:
            return _fail_exit(status, body)
        human = ("ideal-gas oracle = %.17g\nseries (alpha=0)  = %.17g\n"
                 "relative diff    = %.3g (tol %.3g)\nresult: %s"
                 % (body["oracle_q"], body["series_q"], body["rel_diff"],
                    body["tol"], "PASS" if body["passed"] else "FAIL"))
        _emit(args, human, body)
        return EXIT_OK if body["passed"] else EXIT_TOLERANCE

    if which == "discrete2":
        payload = {
            "system": cfgmod.system_payload(cfg),
            "potential": cfgmod.potential_payload(cfg),
            "policy": cfgmod.policy_payload(cfg),
            "discrete": cfgmod.discrete_payload(cfg),
        }
        if args.tol:
            payload["tol"] = args.tol
        status, body = client.post("/oracle/discrete2", payload)
        if status != 200:
            return _fail_exit(status, body)
        lines = ["discrete-time vs continuous evaluation:"]
        csv_rows = [("m", "discrete", "continuous", "abs_diff")]
        for row in body["rows"]:
            lines.append("    m=%4d  discrete=%.12g  continuous=%.12g  |diff|=%.3e"
                         % (row["m"], row["discrete"], row["continuous"], row["abs_diff"]))
            csv_rows.append((row["m"], repr(row["discrete"]),
                             repr(row["continuous"]), repr(row["abs_diff"])))
        lines.append("differences shrink: %s" % body["differences_shrink"])
        lines.append("final gap within allowance: %s" % body["final_within_allowance"])
        lines.append("result: %s" % ("PASS" if body["passed"] else "FAIL"))
        _emit(args, "\n".join(lines), body, csv_rows)
        return EXIT_OK if body["passed"] else EXIT_TOLERANCE

    if which == "exactdiag":
        payload = {
            "system": cfgmod.system_payload(cfg),
            "potential": cfgmod.potential_payload(cfg),
            "policy": cfgmod.policy_payload(cfg),
        }
        cutoff = cfgmod.oracle_momentum_cutoff(cfg)
        if cutoff is not None:
            payload["momentum_cutoff"] = cutoff
        if args.tol:
            payload["tol"] = args.tol
        status, body = client.post("/oracle/exactdiag", payload)
        if status != 200:
            return _fail_exit(status, body)
        human = ("exact diagonalization = %.17g\nseries                = %.17g\n"
                 "relative diff         = %.3g (allowance %.3g)\n"
                 "cutoff Cauchy diff    = %.3g\ntail bound            = %.3g\n"
                 "result: %s"
                 % (body["exact_q2"], body["series_q"], body["rel_diff"],
                    body["tolerance_used"], body["cutoff_cauchy_diff"],
                    body["tail_bound"], "PASS" if body["passed"] else "FAIL"))
        _emit(args, human, body)
        return EXIT_OK if body["passed"] else EXIT_TOLERANCE

    # matrix-a
    m = cfgmod.oracle_matrix_m(cfg) or 12
    status, body = client.post("/oracle/matrix-a", {"m": m})
    if status != 200:
        return _fail_exit(status, body)
    human = ("matrix check at m=%d\n  inverse identity exact: %s\n"
             "  eigenpairs ok: %s (max residual %.3g)\n  degeneracy ok: %s\n"
             "result: %s"
             % (body["m"], body["inverse_identity_exact"], body["eigenpairs_ok"],
                body["max_eigen_residual"], body["degeneracy_ok"],
                "PASS" if body["passed"] else "FAIL"))
    _emit(args, human, body)
    return EXIT_OK if body["passed"] else EXIT_TOLERANCE


def cmd_graph_validate(args, client: ServiceClient) -> int:
    try:
        with open(args.edge_file) as fh:
            edges = []
            for lineno, raw in enumerate(fh, start=1):
                line = raw.split("#", 1)[0].strip()
                if not line:
                    continue
                parts = line.split()
                if len(parts) != 2:
                    raise ConfigurationError("edge-file",
                                             f"{args.edge_file}:{lineno}: expected 'l1 l2'")
                edges.append((int(parts[0]), int(parts[1])))
    except FileNotFoundError:
        raise ConfigurationError("edge-file", f"file not found: {args.edge_file}")
    except ValueError:
        raise ConfigurationError("edge-file", "vertices must be integers")
    if not edges:
        raise ConfigurationError("edge-file", "no edges found")
    status, body = client.post("/graph/validate", {"edges": edges})
    if status != 200:
        return _fail_exit(status, body)
    lines = [
        "vertices = %d, edges = %d" % (body["vertices"], body["edge_count"]),
        "valid coupling graph: %s" % body["valid"],
        "independent constraints K = %d, components m = %d" % (body["k"], body["m"]),
        "solution manifold dimension N_I = %d" % body["n_i"],
    ]
    if body["solution"] is not None:
        lines.append("all-nonzero solution (per edge): %s"
                     % " ".join(str(tuple(v)) for v in body["solution"]))
    _emit(args, "\n".join(lines), body)
    return EXIT_OK if body["valid"] else EXIT_TOLERANCE


def cmd_unity_check(args, client: ServiceClient) -> int:
    status, body = client.post("/unity-check", {"n": args.N})
    if status != 200:
        return _fail_exit(status, body)
    human = ("partition-form weight sum   = %s\ncomposition-form weight sum = %s\n"
             "exact unity: %s" % (body["partition_sum"], body["composition_sum"],
                                  body["exact"]))
    _emit(args, human, body)
    return EXIT_OK if body["exact"] else EXIT_TOLERANCE


def cmd_theta(args, client: ServiceClient) -> int:
    payload = {"c": args.c, "d": args.d}
    if args.tol:
        payload["tol"] = args.tol
    status, body = client.post("/theta", payload)
    if status != 200:
        return _fail_exit(status, body)
    human = "theta(c=%g, d=%d) = %.17g   (radius %d)" % (
        args.c, args.d, body["value"], body["truncation_radius"])
    _emit(args, human, body)
    return EXIT_OK


def cmd_serve(args, client: ServiceClient) -> int:
    import uvicorn
    uvicorn.run("torusgas.service:app", host=args.host, port=args.port)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="torusgas",
        description="Partition functions of interacting quantum gases on a torus.")
    parser.add_argument("--config", help="flat key=value run configuration")
    parser.add_argument("--out", help="report path prefix (.json/.txt/.csv)")
    parser.add_argument("--tol", type=float, help="comparison tolerance override")
    parser.add_argument("--threads", type=int, help="worker threads for the evaluator")
    parser.add_argument("--server", help="base URL of a running service "
                                         "(default: run in-process)")
    sub = parser.add_subparsers(dest="command", required=True)

    sub.add_parser("evaluate", help="evaluate the truncated series")
    oracle = sub.add_parser("oracle", help="run a verification oracle")
    oracle.add_argument("which", choices=["ideal-gas", "discrete2", "exactdiag",
                                          "matrix-a"])
    graph = sub.add_parser("graph-validate", help="check an edge-list coupling graph")
    graph.add_argument("edge_file")
    unity = sub.add_parser("unity-check", help="exact weight normalization check")
    unity.add_argument("N", type=int)
    theta = sub.add_parser("theta", help="print one centered theta sum")
    theta.add_argument("c", type=float)
    theta.add_argument("d", type=int)
    serve = sub.add_parser("serve", help="run the HTTP service")
    serve.add_argument("--host", default="127.0.0.1")
    serve.add_argument("--port", type=int, default=8000)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    client = ServiceClient(args.server)
    handlers = {
        "evaluate": cmd_evaluate,
        "oracle": cmd_oracle,
        "graph-validate": cmd_graph_validate,
        "unity-check": cmd_unity_check,
        "theta": cmd_theta,
        "serve": cmd_serve,
    }
    try:
        return handlers[args.command](args, client)
    except ConfigurationError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
