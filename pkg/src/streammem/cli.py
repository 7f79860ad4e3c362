"""Command-line interface: a thin client over the HTTP service.

Subcommands call service endpoints and handle local file I/O; engine math
never runs in this module.  By default the service is mounted in-process,
so no network or separate process is involved; --server points the same
commands at a remote instance.

Exit codes: 0 success, 1 verification failure, 2 usage or configuration
error, 3 I/O error.
"""

from __future__ import annotations

import argparse
import json
import sys
import warnings
from typing import Optional

import httpx
import yaml

from .errors import ConfigurationError

EXIT_OK = 0
EXIT_VERIFY_FAILED = 1
EXIT_CONFIG = 2
EXIT_IO = 3


def build_client(server: Optional[str]) -> httpx.Client:
    if server:
        return httpx.Client(base_url=server, timeout=60.0)
    # upstream test-client deprecation chatter has no place in CLI output
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        from fastapi.testclient import TestClient

    from .service.app import create_app

    return TestClient(create_app())


def load_config_mapping(path: Optional[str]) -> Optional[dict]:
    if path is None:
        return None
    try:
        with open(path, "r", encoding="utf-8") as fh:
            doc = yaml.safe_load(fh)
    except FileNotFoundError:
        raise ConfigurationError(f"config file not found: {path}", field="config")
    except OSError as exc:
        raise ConfigurationError(f"cannot read config file: {exc}", field="config")
    except yaml.YAMLError as exc:
        raise ConfigurationError(f"invalid YAML in {path}: {exc}", field="config")
    if doc is None:
        return {}
    if not isinstance(doc, dict):
        raise ConfigurationError("config file must hold a mapping", field="config")
    return doc


class ServiceError(Exception):
    def __init__(self, status: int, message: str):
        super().__init__(message)
        self.status = status


def post(client: httpx.Client, path: str, payload: dict) -> dict:
    resp = client.post(path, json=payload)
    if resp.status_code != 200:
        try:
            body = resp.json()
            message = body.get("message") or json.dumps(body)
        except ValueError:
            message = resp.text
        raise ServiceError(resp.status_code, message)
    return resp.json()


def write_file(path: str, text: str) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(text)


def cmd_simulate(args) -> int:
    from . import traceio

    config = load_config_mapping(args.config)
    payload = {
        "config": config,
        "include_rows": True,
        "include_stream": bool(args.export_stream),
        "fixed_window": args.fixed_window,
    }
    if args.seed is not None:
        payload["seed"] = args.seed
    if args.injection is not None:
        payload["injection"] = args.injection
    if args.separation is not None:
        payload["separation"] = args.separation
    with build_client(args.server) as client:
        body = post(client, "/simulate", payload)

    rows, report = body["rows"], body["report"]
    if args.out:
        lines = (
            traceio.trace_json_lines(rows)
            if args.format == "json"
            else traceio.trace_csv_lines(rows)
        )
        write_file(args.out, traceio.render(lines))
    if args.export_stream:
        write_file(
            args.export_stream,
            json.dumps(
                {"signatures": body["signatures"], "stream": body["stream"]},
                indent=None,
                separators=(",", ":"),
            )
            + "\n",
        )
    if args.summary_json:
        print(json.dumps(report, sort_keys=True))
    else:
        print(f"blocks: {report['blocks']}")
        print(f"mean read budget: {report['mean_read_budget']:.6g}")
        print(
            f"read budget range: [{report['min_read_budget']}, "
            f"{report['max_read_budget']}]"
        )
        print(f"mean window: {report['mean_window']:.6g}")
        if args.out:
            print(f"trace written to {args.out}")
    return EXIT_OK


def cmd_compare(args) -> int:
    config = load_config_mapping(args.config)
    payload = {"config": config}
    if args.seed is not None:
        payload["seed"] = args.seed
    with build_client(args.server) as client:
        body = post(client, "/simulate/compare", payload)
    if args.summary_json:
        print(json.dumps(body, sort_keys=True))
    else:
        print(f"adaptive mean budget: {body['adaptive_mean_budget']:.6g}")
        print(f"fixed mean budget: {body['fixed_mean_budget']:.6g}")
        print(f"savings ratio: {body['savings_ratio']:.6g}")
        print(f"boundary windows: {body['boundary_window_maxima']}")
    return EXIT_OK


def cmd_schedule(args) -> int:
    from . import traceio

    config = load_config_mapping(args.config)
    with build_client(args.server) as client:
        body = post(client, "/schedule", {"config": config})
    text = traceio.render(traceio.schedule_csv_lines(body["rows"]))
    if args.out:
        write_file(args.out, text)
        print(f"schedule written to {args.out}")
    else:
        sys.stdout.write(text)
    return EXIT_OK


def cmd_verify(args) -> int:
    if args.cases < 1:
        print("error: --cases must be >= 1", file=sys.stderr)
        return EXIT_CONFIG
    payload = {"cases": args.cases, "seed": args.seed, "dims": args.dims}
    with build_client(args.server) as client:
        body = post(client, "/verify", payload)
    width = max(len(c["name"]) for c in body["checks"])
    for check in body["checks"]:
        status = "pass" if check["passed"] else "FAIL"
        print(
            f"{check['name']:<{width}}  cases={check['cases']:<6} "
            f"max_error={check['max_error']:.3e}  {status}"
        )
        for case in check["failures"]:
            print(f"  failing case: {case}")
    if not body["passed"]:
        return EXIT_VERIFY_FAILED
    return EXIT_OK


def cmd_serve(args) -> int:
    import uvicorn

    from .service.app import create_app

    uvicorn.run(create_app(), host=args.host, port=args.port, log_level="warning")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="streammem",
        description="Structured attention-memory engine: simulate, verify, inspect.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def add_server(p):
        p.add_argument("--server", default=None, help="base URL of a running service")

    sim = sub.add_parser("simulate", help="run a synthetic rollout and emit a trace")
    sim.add_argument("config", nargs="?", default=None, help="YAML config file")
    sim.add_argument("--seed", type=int, default=None)
    sim.add_argument("--out", default=None, help="trace output path")
    sim.add_argument("--format", choices=("csv", "json"), default="csv")
    sim.add_argument(
        "--injection",
        choices=("one_shot", "constant", "decayed", "off"),
        default=None,
        help="override the bridge injection schedule",
    )
    sim.add_argument("--separation", type=float, default=None)
    sim.add_argument("--fixed-window", action="store_true")
    sim.add_argument(
        "--export-stream", default=None, help="write signature/value buffers as JSON"
    )
    sim.add_argument("--summary-json", action="store_true")
    add_server(sim)
    sim.set_defaults(func=cmd_simulate)

    comp = sub.add_parser("compare", help="adaptive vs fixed-window budget comparison")
    comp.add_argument("config", nargs="?", default=None)
    comp.add_argument("--seed", type=int, default=None)
    comp.add_argument("--summary-json", action="store_true")
    add_server(comp)
    comp.set_defaults(func=cmd_compare)

    sched = sub.add_parser("schedule", help="dump the per-frame window table")
    sched.add_argument("config", nargs="?", default=None)
    sched.add_argument("--out", default=None)
    add_server(sched)
    sched.set_defaults(func=cmd_schedule)

    ver = sub.add_parser("verify", help="run the projection verification suite")
    ver.add_argument("--cases", type=int, default=1000)
    ver.add_argument("--seed", type=int, default=0)
    ver.add_argument("--dims", type=int, nargs="+", default=[2, 3, 8, 32])
    add_server(ver)
    ver.set_defaults(func=cmd_verify)

    srv = sub.add_parser("serve", help="run the HTTP service")
    srv.add_argument("--host", default="127.0.0.1")
    srv.add_argument("--port", type=int, default=8000)
    srv.set_defaults(func=cmd_serve)

    return parser


def main(argv: Optional[list[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ConfigurationError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except ServiceError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG if exc.status in (400, 404, 422) else EXIT_IO
    except httpx.HTTPError as exc:
        print(f"error: cannot reach service: {exc}", file=sys.stderr)
        return EXIT_IO
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
