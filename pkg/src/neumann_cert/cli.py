"""Command-line front door: certification, spectra, constructions, constants,
and verification suites over JSON documents.

The CLI is a thin client of the HTTP service: by default it mounts the
service in-process; with --server it talks to a running instance instead.
Exit codes for `certify`: 0 = UniqueTrivial, 1 = Inconclusive,
2 = ResonantWitness, 3 = input error.  `verify` exits 0 iff the suite
passed.  All failures, including unexpected ones, convert to exit 3 with a
diagnostic on stderr.  Identical inputs produce byte-identical output files.
"""

from __future__ import annotations

import argparse
import asyncio
import json
import os
import sys

import httpx

from . import __version__, serialize

EXIT_UNIQUE_TRIVIAL = 0
EXIT_INCONCLUSIVE = 1
EXIT_RESONANT_WITNESS = 2
EXIT_INPUT_ERROR = 3

_VERDICT_EXIT = {
    "UniqueTrivial": EXIT_UNIQUE_TRIVIAL,
    "Inconclusive": EXIT_INCONCLUSIVE,
    "ResonantWitness": EXIT_RESONANT_WITNESS,
}


class CliError(Exception):
    """Input or transport problem; reported on stderr with exit code 3."""


def _request(server: str | None, method: str, path: str,
             payload=None, params=None) -> dict:
    """One service call: remote when --server is given, in-process otherwise."""
    if server:
        with httpx.Client(base_url=server, timeout=600.0) as client:
            response = client.request(method, path, json=payload, params=params)
            return _check_response(response)

    async def _go() -> dict:
        from .service.app import app
        transport = httpx.ASGITransport(app=app)
        async with httpx.AsyncClient(transport=transport,
                                     base_url="http://service") as client:
            response = await client.request(method, path, json=payload,
                                            params=params)
            return _check_response(response)

    return asyncio.run(_go())


def _check_response(response: httpx.Response) -> dict:
    if response.status_code != 200:
        try:
            detail = response.json().get("detail", response.text)
        except ValueError:
            detail = response.text
        raise CliError(f"service rejected the request "
                       f"(HTTP {response.status_code}): {detail}")
    return response.json()


def _load_document(source: str) -> dict:
    """Parse inline JSON (starts with '{') or read a JSON file."""
    text = source
    if not source.lstrip().startswith("{"):
        with open(source, "r", encoding="utf-8") as fh:
            text = fh.read()
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise CliError(f"malformed JSON in {source!r}: {exc}") from exc
    if not isinstance(doc, dict):
        raise CliError(f"expected a JSON object in {source!r}")
    return doc


def _emit(doc: dict, output: str | None) -> None:
    text = serialize.dumps(doc)
    if output is None:
        sys.stdout.write(text)
        return
    with open(output, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(text)


def _default_seed() -> int:
    raw = os.environ.get("NEUMANN_CERT_SEED", "0")
    try:
        return int(raw)
    except ValueError as exc:
        raise CliError(f"NEUMANN_CERT_SEED must be an integer, got {raw!r}") from exc


# ------------------------------------------------------------- subcommands

def _cmd_certify(args: argparse.Namespace) -> int:
    payload = {
        "potential": _load_document(args.potential),
        "n": args.n,
        "method": args.method,
    }
    if args.partition is not None:
        payload["partition"] = _load_document(args.partition)
    if args.eps is not None:
        payload["eps"] = args.eps
    doc = _request(args.server, "POST", "/certify", payload=payload)
    _emit(doc, args.output)
    return _VERDICT_EXIT.get(doc.get("verdict"), EXIT_INPUT_ERROR)


def _cmd_spectrum(args: argparse.Namespace) -> int:
    payload = {
        "potential": _load_document(args.potential),
        "fd_grid": args.fd_grid,
        "bc": args.bc,
        "include_trajectory": not args.no_trajectory,
    }
    doc = _request(args.server, "POST", "/spectrum", payload=payload)
    _emit(doc, args.output)
    return 0


def _cmd_construct(args: argparse.Namespace) -> int:
    payload = {"family": args.family, "n": args.n, "L": args.L}
    if args.eps is not None:
        payload["eps"] = args.eps
    if args.q is not None:
        payload["q"] = args.q
    if args.partition is not None:
        payload["partition"] = _load_document(args.partition)
    doc = _request(args.server, "POST", "/construct", payload=payload)
    if args.potential_out is not None:
        _emit(doc["potential"], args.potential_out)
    if args.solution_out is not None:
        if doc.get("solution") is None:
            raise CliError(
                f"the {args.family} family has no closed-form solution document")
        _emit(doc["solution"], args.solution_out)
    if args.output is not None or (args.potential_out is None
                                   and args.solution_out is None):
        _emit(doc, args.output)
    return 0


def _cmd_constants(args: argparse.Namespace) -> int:
    doc = _request(args.server, "GET", "/constants",
                   params={"n": args.n, "L": args.L})
    _emit(doc, args.output)
    return 0


def _cmd_verify(args: argparse.Namespace) -> int:
    seed = args.seed if args.seed is not None else _default_seed()
    doc = _request(args.server, "POST", "/verify",
                   payload={"suite": args.suite, "seed": seed})
    _emit(doc, args.output)
    return 0 if doc.get("passed") else 1


def _cmd_serve(args: argparse.Namespace) -> int:
    import uvicorn

    from .service.app import app
    uvicorn.run(app, host=args.host, port=args.port, log_level="info")
    return 0


# ------------------------------------------------------------------ parser

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="neumann-cert",
        description="Certify uniqueness of the trivial solution of "
                    "u'' + a(x) u = 0 under Neumann boundary conditions, "
                    "construct extremal potentials, and cross-validate the "
                    "toolkit. All I/O is JSON.")
    parser.add_argument("--version", action="version",
                        version=f"%(prog)s {__version__}")
    parser.add_argument("--server", default=None, metavar="URL",
                        help="base URL of a running service; default mounts "
                             "the service in-process")
    sub = parser.add_subparsers(dest="subcommand", required=True)

    p = sub.add_parser("certify", help="run a certification method")
    p.add_argument("--potential", required=True,
                   help="potential JSON file or inline JSON")
    p.add_argument("--n", type=int, default=1, help="eigenvalue level")
    p.add_argument("--method", default="auto",
                   choices=["auto", "classical", "dolph", "l1",
                            "linf-partition", "l1-partition", "greedy"])
    p.add_argument("--partition", default=None,
                   help="partition JSON file or inline JSON "
                        "(fixed-partition methods)")
    p.add_argument("--eps", type=float, default=None,
                   help="greedy excess-rate offset override")
    p.add_argument("--output", default=None, help="certificate file path")
    p.set_defaults(func=_cmd_certify)

    p = sub.add_parser("spectrum", help="shooting residual and "
                                        "finite-difference spectrum")
    p.add_argument("--potential", required=True)
    p.add_argument("--fd-grid", type=int, default=800)
    p.add_argument("--bc", default="neumann",
                   choices=["neumann", "mixed_dn", "mixed_nd"])
    p.add_argument("--no-trajectory", action="store_true",
                   help="omit the trajectory records")
    p.add_argument("--output", default=None)
    p.set_defaults(func=_cmd_spectrum)

    p = sub.add_parser("construct", help="generate an extremal or resonant "
                                         "potential family")
    p.add_argument("--family", required=True,
                   choices=["minimizing", "step", "constant", "counterexample"])
    p.add_argument("--n", type=int, default=1)
    p.add_argument("--L", type=float, default=1.0)
    p.add_argument("--eps", type=float, default=None)
    p.add_argument("--q", type=int, default=None,
                   help="half-wave count (constant family)")
    p.add_argument("--partition", default=None,
                   help="partition JSON file or inline JSON")
    p.add_argument("--output", default=None,
                   help="full document (potential + solution + diagnostics)")
    p.add_argument("--potential-out", default=None,
                   help="write just the potential JSON")
    p.add_argument("--solution-out", default=None,
                   help="write just the solution JSON")
    p.set_defaults(func=_cmd_construct)

    p = sub.add_parser("constants", help="print the sharp constants at "
                                         "level n")
    p.add_argument("--n", type=int, default=1)
    p.add_argument("--L", type=float, default=1.0)
    p.add_argument("--output", default=None)
    p.set_defaults(func=_cmd_constants)

    p = sub.add_parser("verify", help="run a verification suite")
    p.add_argument("--suite", required=True,
                   help="one of: constants, j, f, spectrum, zeros, "
                        "partition, implication, soundness")
    p.add_argument("--seed", type=int, default=None,
                   help="RNG seed; default NEUMANN_CERT_SEED or 0")
    p.add_argument("--output", default=None)
    p.set_defaults(func=_cmd_verify)

    p = sub.add_parser("serve", help="run the HTTP service")
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--port", type=int, default=8000)
    p.set_defaults(func=_cmd_serve)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        # argparse exits with code 2 on usage errors; that slot belongs to
        # ResonantWitness, so remap anything nonzero to the input-error code
        try:
            args = parser.parse_args(argv)
        except SystemExit as exc:
            return 0 if exc.code == 0 else EXIT_INPUT_ERROR
        return args.func(args)
    except CliError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT_ERROR
    except (OSError, ValueError, KeyError, httpx.HTTPError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT_ERROR
    except KeyboardInterrupt:
        print("interrupted", file=sys.stderr)
        return EXIT_INPUT_ERROR
    except Exception as exc:  # convert panics to a diagnostic, never a trace
        print(f"internal error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_INPUT_ERROR


if __name__ == "__main__":
    sys.exit(main())
