"""Thin command-line client for the scenario service.

By default every command talks to the FastAPI app in-process through an ASGI
transport (no sockets, no running server needed); ``--server URL`` targets a
remote instance instead.  The client writes the file bodies returned by the
service verbatim, so outputs are identical either way.

Exit codes: 0 success, 2 config/validation error, 3 numeric failure,
4 I/O error.
"""

from __future__ import annotations

import argparse
import asyncio
import csv
import json
import os
import sys

import httpx

from . import __version__
from .config import parse_override_value

DEFAULT_OUT_ENV = "SUPERATOM_OUT_DIR"
SCENARIO_COMMANDS = ("rabi", "area-scan", "chirp-summary", "detuning-scan", "adiabaticity")

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_NUMERIC = 3
EXIT_IO = 4


class CliFailure(Exception):
    def __init__(self, code: int, message: str):
        super().__init__(message)
        self.code = code


def _request(server: str | None, method: str, path: str, payload=None) -> httpx.Response:
    try:
        if server:
            with httpx.Client(base_url=server, timeout=600.0) as client:
                return client.request(method, path, json=payload)

        from .service import app  # imported lazily; pulls in the physics stack

        async def go() -> httpx.Response:
            transport = httpx.ASGITransport(app=app)
            async with httpx.AsyncClient(
                transport=transport, base_url="http://superatom.internal", timeout=None
            ) as client:
                return await client.request(method, path, json=payload)

        return asyncio.run(go())
    except httpx.HTTPError as exc:
        raise CliFailure(EXIT_IO, f"service unreachable: {exc}") from exc


def _fail_from_response(resp: httpx.Response) -> CliFailure:
    try:
        detail = resp.json().get("detail")
    except ValueError:
        detail = None
    if isinstance(detail, dict):
        kind = detail.get("kind")
        message = detail.get("message", "request failed")
        if kind == "config":
            return CliFailure(EXIT_CONFIG, message)
        if kind == "numeric":
            return CliFailure(EXIT_NUMERIC, message)
    if resp.status_code in (400, 404, 422):
        return CliFailure(EXIT_CONFIG, f"request rejected: {detail or resp.text}")
    return CliFailure(EXIT_NUMERIC, f"service error {resp.status_code}: {detail or resp.text}")


def _load_config_file(path: str | None) -> dict | None:
    if path is None:
        return None
    try:
        with open(path, "r", encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise CliFailure(EXIT_IO, f"cannot read config {path}: {exc}") from exc
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise CliFailure(EXIT_CONFIG, f"config {path} is not valid JSON: {exc}") from exc


def _parse_overrides(pairs: list[str]) -> dict:
    overrides = {}
    for pair in pairs:
        if "=" not in pair:
            raise CliFailure(EXIT_CONFIG, f"override {pair!r} must be key=value")
        key, _, value = pair.partition("=")
        key = key.strip()
        if not key:
            raise CliFailure(EXIT_CONFIG, f"override {pair!r} has an empty key")
        overrides[key] = parse_override_value(value)
    return overrides


def _out_dir(args) -> str:
    return args.out or os.environ.get(DEFAULT_OUT_ENV) or "out"


def _write_files(files: dict[str, str], directory: str) -> list[str]:
    try:
        os.makedirs(directory, exist_ok=True)
        paths = []
        for name in sorted(files):
            path = os.path.join(directory, name)
            with open(path, "w", encoding="utf-8") as fh:
                fh.write(files[name])
            paths.append(path)
        return paths
    except OSError as exc:
        raise CliFailure(EXIT_IO, f"cannot write outputs to {directory}: {exc}") from exc


def _run_scenario(args) -> int:
    payload = {
        "config": _load_config_file(args.config),
        "overrides": _parse_overrides(args.set or []),
    }
    if args.seed is not None:
        payload["seed"] = args.seed
    if args.workers is not None:
        payload["workers"] = args.workers
    resp = _request(args.server, "POST", f"/run/{args.scenario}", payload)
    if resp.status_code != 200:
        raise _fail_from_response(resp)
    body = resp.json()
    paths = _write_files(body["files"], _out_dir(args))
    print(f"{args.scenario}: wrote {len(paths)} files to {_out_dir(args)}")
    for path in paths:
        print(f"  {path}")
    return EXIT_OK


def _read_curve_csv(path: str) -> dict:
    try:
        with open(path, "r", encoding="utf-8", newline="") as fh:
            rows = [row for row in csv.reader(fh)
                    if row and not row[0].lstrip().startswith("#")]
    except OSError as exc:
        raise CliFailure(EXIT_IO, f"cannot read {path}: {exc}") from exc
    if not rows:
        raise CliFailure(EXIT_CONFIG, f"{path} contains no data rows")

    header = None
    first = rows[0]
    try:
        float(first[0])
    except ValueError:
        header = [cell.strip().lower() for cell in first]
        rows = rows[1:]

    def column(idx: int) -> list[float]:
        try:
            return [float(row[idx]) for row in rows]
        except (ValueError, IndexError) as exc:
            raise CliFailure(EXIT_CONFIG, f"{path}: bad numeric data: {exc}") from exc

    if header:
        def find(*names):
            for name in names:
                if name in header:
                    return header.index(name)
            return None
        ix = find("x", "area_pi", "delta1_mhz", "duration_ns")
        iy = find("y", "click_sum")
        if ix is None or iy is None:
            raise CliFailure(
                EXIT_CONFIG,
                f"{path}: need columns named x/y (or a known scan header)",
            )
        isig = find("sigma", "click_sem", "yerr")
        data = {"x": column(ix), "y": column(iy)}
        if isig is not None and any(v > 0 for v in column(isig)):
            data["sigma"] = column(isig)
        return data
    data = {"x": column(0), "y": column(1)}
    if len(rows[0]) > 2:
        sig = column(2)
        if any(v > 0 for v in sig):
            data["sigma"] = sig
    return data


def _run_fit(args) -> int:
    data = _read_curve_csv(args.input)
    payload = {"model": args.model, **data}
    resp = _request(args.server, "POST", "/fit", payload)
    if resp.status_code != 200:
        raise _fail_from_response(resp)
    body = resp.json()
    fit = body["fit"]
    print(f"model: {fit['model']}")
    for name, value in fit["params"].items():
        print(f"{name} = {value!r}")
    print(f"converged: {fit['converged']}  iterations: {fit['iterations']}  "
          f"residual_norm: {fit['residual_norm']!r}")
    peak = body.get("peak")
    if peak is not None:
        print(f"peak_position = {peak['position']!r}")
        print(f"peak_value = {peak['value']!r}")
        print(f"width80 = {peak['width80']!r}")
    if args.out:
        _write_files({"fit.summary.json": json.dumps(body, indent=2, sort_keys=True) + "\n"},
                     args.out)
    return EXIT_OK


def _run_serve(args) -> int:
    try:
        import uvicorn
    except ImportError as exc:  # pragma: no cover - depends on optional extra
        raise CliFailure(EXIT_CONFIG,
                         "uvicorn is required for 'serve' (pip install superatom[serve])") from exc
    from .service import app

    uvicorn.run(app, host=args.host, port=args.port)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="superatom",
        description="Chirped Rydberg-excitation scan scenarios (thin service client)",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    for name in SCENARIO_COMMANDS:
        p = sub.add_parser(name, help=f"run the {name} scenario")
        p.add_argument("--config", help="JSON config file (defaults ship with the package)")
        p.add_argument("--out", help=f"output directory (default ${DEFAULT_OUT_ENV} or ./out)")
        p.add_argument("--set", action="append", metavar="KEY=VALUE",
                       help="dotted-path config override, repeatable")
        p.add_argument("--seed", type=int, help="override the config seed")
        p.add_argument("--workers", type=int, help="parallel sweep workers")
        p.add_argument("--server", help="remote service URL (default: in-process)")
        p.set_defaults(func=_run_scenario, scenario=name)

    p = sub.add_parser("fit", help="fit a scan curve from a CSV file")
    p.add_argument("--input", required=True, help="CSV with x,y[,sigma] columns")
    p.add_argument("--model", choices=("damped-rabi", "asym-gaussian"),
                   default="damped-rabi")
    p.add_argument("--out", help="optional directory for fit.summary.json")
    p.add_argument("--server", help="remote service URL (default: in-process)")
    p.set_defaults(func=_run_fit)

    p = sub.add_parser("version", help="print the package version")
    p.set_defaults(func=lambda args: (print(__version__), EXIT_OK)[1])

    p = sub.add_parser("serve", help="run the HTTP service with uvicorn")
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--port", type=int, default=8000)
    p.set_defaults(func=_run_serve)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except CliFailure as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.code


if __name__ == "__main__":
    sys.exit(main())
