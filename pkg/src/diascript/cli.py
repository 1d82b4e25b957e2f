"""Command line: batch render, diagnostics check, and the session server.

Exit codes: 0 success, 1 diagnostics with error severity, 2 I/O or usage
problems.
"""

from __future__ import annotations

import argparse
import asyncio
import sys
from pathlib import Path

from .diagnostics import has_errors
from .pipeline import run_pipeline


def _read(path: str) -> str:
    try:
        return Path(path).read_text(encoding="utf-8")
    except OSError as err:
        print(f"error: {err}", file=sys.stderr)
        raise SystemExit(2)


def _print_diagnostics(uri: str, diagnostics) -> None:
    for d in diagnostics:
        print(d.format(uri), file=sys.stderr)


def cmd_render(args) -> int:
    if args.format != "svg":
        print(f"error: unsupported format: {args.format}", file=sys.stderr)
        return 2
    text = _read(args.file)
    result = run_pipeline(text, uri=args.file)
    _print_diagnostics(args.file, result.diagnostics)
    if result.svg is None or has_errors(result.diagnostics):
        return 1
    try:
        Path(args.output).write_text(result.svg, encoding="utf-8")
    except OSError as err:
        print(f"error: {err}", file=sys.stderr)
        return 2
    return 0


def cmd_check(args) -> int:
    text = _read(args.file)
    result = run_pipeline(text, uri=args.file)
    _print_diagnostics(args.file, result.diagnostics)
    return 1 if has_errors(result.diagnostics) else 0


def cmd_serve(args) -> int:
    if args.stdio:
        from .transports import serve_stdio

        return serve_stdio()
    from .transports import serve_websocket

    try:
        asyncio.run(serve_websocket(args.host, args.port, announce=True))
    except KeyboardInterrupt:
        pass
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="diascript", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    render = sub.add_parser("render", help="render a diagram source file to SVG")
    render.add_argument("file")
    render.add_argument("-o", "--output", required=True)
    render.add_argument("--format", default="svg", help="output format (svg; pdf is reserved)")
    render.set_defaults(fn=cmd_render)

    check = sub.add_parser("check", help="print diagnostics; exit 1 when errors exist")
    check.add_argument("file")
    check.set_defaults(fn=cmd_check)

    serve = sub.add_parser("serve", help="run the live session server")
    serve.add_argument("--port", type=int, default=8787)
    serve.add_argument("--host", default="127.0.0.1")
    serve.add_argument("--stdio", action="store_true", help="speak ndjson on stdin/stdout")
    serve.set_defaults(fn=cmd_serve)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    return args.fn(args)


if __name__ == "__main__":
    raise SystemExit(main())
