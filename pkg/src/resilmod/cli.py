"""Batch CLI, a thin client of the HTTP service.

By default requests are dispatched to an in-process instance of the service
app over httpx's ASGI transport, so no server needs to be running; pass
``--server URL`` to target a remote instance instead. Exit codes: 0 success,
1 validation/usage error, 2 runtime evaluation error.
"""

from __future__ import annotations

import argparse
import asyncio
import sys
from pathlib import Path

import httpx
import yaml

from . import __version__
from .reports import ReportDocument, render_csv, render_structured

EXIT_OK = 0
EXIT_VALIDATION = 1
EXIT_RUNTIME = 2


def _add_common(p: argparse.ArgumentParser, with_sim_flags: bool) -> None:
    p.add_argument("--config", required=True, help="path to the YAML config document")
    p.add_argument("--output", default=None, help="output file (default: stdout)")
    p.add_argument("--format", choices=["csv", "structured"], default="csv")
    p.add_argument(
        "--convention",
        choices=["literal", "survival"],
        default=None,
        help="override the config's reliability convention",
    )
    p.add_argument("--server", default=None, help="base URL of a running service (default: in-process)")
    if with_sim_flags:
        p.add_argument("--trials", type=int, default=10000)
        p.add_argument("--seed", type=int, default=42, help="master seed (unsigned 64-bit)")
        p.add_argument("--trace", default=None, help="write a JSONL per-trial event trace here")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="resilmod",
        description="Evaluate, simulate and compare resilience pattern solutions in batch.",
    )
    parser.add_argument("--version", action="version", version=f"resilmod {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)
    _add_common(sub.add_parser("eval", help="analytic evaluation of the system section"), False)
    _add_common(sub.add_parser("simulate", help="Monte Carlo run of the scenario section"), True)
    _add_common(
        sub.add_parser("sweep", help="eval or simulate with the sweep section required"), True
    )
    _add_common(sub.add_parser("compare", help="analytic vs simulated, side by side"), True)
    serve = sub.add_parser("serve", help="run the HTTP service")
    serve.add_argument("--host", default="127.0.0.1")
    serve.add_argument("--port", type=int, default=8000)
    return parser


def _load_document(path: str) -> dict:
    text = Path(path).read_text()
    raw = yaml.safe_load(text)
    if not isinstance(raw, dict):
        raise ValueError(f"expected a mapping at the top level, got {type(raw).__name__}")
    return raw


async def _post(server: str | None, endpoint: str, payload: dict) -> httpx.Response:
    if server is None:
        from .service import create_app

        transport = httpx.ASGITransport(app=create_app())
        async with httpx.AsyncClient(
            transport=transport, base_url="http://resilmod.internal", timeout=None
        ) as client:
            return await client.post(endpoint, json=payload)
    async with httpx.AsyncClient(base_url=server, timeout=None) as client:
        return await client.post(endpoint, json=payload)


def _print_errors(response: httpx.Response) -> None:
    try:
        body = response.json()
    except ValueError:
        print(response.text, file=sys.stderr)
        return
    detail = body.get("detail", body.get("errors", body))
    if isinstance(detail, list):
        for item in detail:
            if isinstance(item, dict) and "loc" in item:
                path = ".".join(str(p) for p in item["loc"] if p != "body")
                print(f"error: {path}: {item.get('msg')}", file=sys.stderr)
            else:
                print(f"error: {item}", file=sys.stderr)
    else:
        print(f"error: {detail}", file=sys.stderr)


def _write(text: str, output: str | None) -> None:
    if output is None:
        sys.stdout.write(text)
    else:
        Path(output).write_text(text)


def _run_request(args: argparse.Namespace, command: str, document: dict) -> int:
    payload: dict = {"config": document}
    endpoint = f"/{command}"
    if command in ("simulate", "compare"):
        payload["trials"] = args.trials
        payload["seed"] = args.seed
        payload["trace"] = args.trace is not None
    if command in ("eval", "simulate") and args.convention:
        payload["convention"] = args.convention

    try:
        response = asyncio.run(_post(args.server, endpoint, payload))
    except httpx.HTTPError as e:
        print(f"error: cannot reach service: {e}", file=sys.stderr)
        return EXIT_RUNTIME

    if response.status_code in (400, 422):
        _print_errors(response)
        return EXIT_VALIDATION
    if response.status_code != 200:
        _print_errors(response)
        return EXIT_RUNTIME

    report = ReportDocument.model_validate(response.json())
    if getattr(args, "trace", None) and report.trace is not None:
        Path(args.trace).write_text("".join(line + "\n" for line in report.trace))
    rendered = render_csv(report) if args.format == "csv" else render_structured(report)
    _write(rendered, args.output)
    return EXIT_OK


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)

    if args.command == "serve":
        import uvicorn

        uvicorn.run("resilmod.service:app", host=args.host, port=args.port)
        return EXIT_OK

    try:
        document = _load_document(args.config)
    except FileNotFoundError:
        print(f"error: config file not found: {args.config}", file=sys.stderr)
        return EXIT_VALIDATION
    except (yaml.YAMLError, ValueError) as e:
        print(f"error: {args.config}: {e}", file=sys.stderr)
        return EXIT_VALIDATION

    command = args.command
    if command == "sweep":
        if "sweep" not in document:
            print("error: the sweep subcommand requires a sweep section", file=sys.stderr)
            return EXIT_VALIDATION
        command = "eval" if "system" in document else "simulate"
        if command == "eval" and args.trace is not None:
            print("error: --trace applies to simulation sweeps only", file=sys.stderr)
            return EXIT_VALIDATION
    if command == "compare" and args.convention:
        print(
            "note: compare always reports both conventions; --convention ignored",
            file=sys.stderr,
        )

    return _run_request(args, command, document)


if __name__ == "__main__":
    sys.exit(main())
