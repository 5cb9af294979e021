"""Command-line thin client of the encoding service.

Every data command goes through the HTTP API: against a remote server when
--server is given, otherwise against an in-process instance of the same
ASGI app. Exit codes: 2 bad flags, 3 file errors, 4 domain errors
(invalid order, bad image payload), 5 verification failure, 6 server
unreachable.
"""
from __future__ import annotations

import base64
import json
import sys
from pathlib import Path

import click
import httpx

from .reports import STRATEGIES

EXIT_FILE = 3
EXIT_DOMAIN = 4
EXIT_VERIFY = 5
EXIT_SERVER = 6


class _InProcessTransport:
    """Serve requests straight through the ASGI app, no socket."""

    def __init__(self):
        from .service.app import create_app

        self._app = create_app()

    def post(self, path: str, json: dict) -> httpx.Response:
        import asyncio

        async def _go() -> httpx.Response:
            transport = httpx.ASGITransport(app=self._app)
            async with httpx.AsyncClient(transport=transport,
                                         base_url="http://faqpie.internal") as client:
                return await client.post(path, json=json)

        return asyncio.run(_go())


class ApiClient:
    """Thin wrapper over httpx: remote base URL or in-process ASGI app."""

    def __init__(self, server: str | None):
        if server:
            self._client = httpx.Client(base_url=server.rstrip("/"), timeout=600.0)
        else:
            self._client = _InProcessTransport()

    def post(self, path: str, payload: dict) -> dict:
        try:
            resp = self._client.post(path, json=payload)
        except httpx.HTTPError as exc:
            click.echo(f"error: service unreachable: {exc}", err=True)
            sys.exit(EXIT_SERVER)
        if resp.status_code == 400:
            detail = resp.json().get("detail", {})
            kind = detail.get("kind", "domain") if isinstance(detail, dict) else "domain"
            message = detail.get("message", str(detail)) if isinstance(detail, dict) else str(detail)
            click.echo(f"error: {message}", err=True)
            sys.exit(EXIT_FILE if kind == "image" else EXIT_DOMAIN)
        if resp.status_code == 422:
            click.echo(f"error: invalid request: {resp.text}", err=True)
            sys.exit(EXIT_DOMAIN)
        if resp.status_code != 200:
            click.echo(f"error: service returned {resp.status_code}: {resp.text}", err=True)
            sys.exit(EXIT_SERVER)
        return resp.json()


def _read_image_b64(path: str) -> str:
    try:
        raw = Path(path).read_bytes()
    except OSError as exc:
        click.echo(f"error: cannot read {path}: {exc}", err=True)
        sys.exit(EXIT_FILE)
    return base64.b64encode(raw).decode("ascii")


def _write_bytes(path: str, data: bytes) -> None:
    try:
        Path(path).write_bytes(data)
    except OSError as exc:
        click.echo(f"error: cannot write {path}: {exc}", err=True)
        sys.exit(EXIT_FILE)


def _parse_partition(_ctx, _param, value: str | None) -> int | None:
    if value is None:
        return None
    spec = value.split("=", 1)[1] if value.startswith("n0=") else value
    try:
        return int(spec)
    except ValueError:
        raise click.BadParameter(f"expected n0=<int>, got {value!r}")


def _options_payload(m, mode, partition_n0, m0, prune_fraction, prune_abs,
                     no_parity_cancel, strategy, exclude_zero_blocks) -> dict:
    return {
        "strategy": strategy,
        "m": m,
        "mode": mode,
        "partition_n0": partition_n0,
        "m0": m0,
        "prune_fraction": prune_fraction,
        "prune_abs": prune_abs,
        "parity_cancel": not no_parity_cancel,
        "exclude_zero_blocks": exclude_zero_blocks,
    }


def _image_format_for(path: str | None) -> str:
    return "png" if path and path.lower().endswith(".png") else "ppm"


_shared_options = [
    click.option("--m", "m", type=int, default=None,
                 help="truncation order (default: min(6, n-2))"),
    click.option("--mode", type=click.Choice(["centered", "nonneg"]), default="centered"),
    click.option("--partition", "partition_n0", callback=_parse_partition, default=None,
                 metavar="n0=<int>", help="encode 2^n0 tiles as separate circuits"),
    click.option("--m0", type=int, default=None,
                 help="per-tile truncation order (default m-1)"),
    click.option("--prune-fraction", type=float, default=None,
                 help="fraction of smallest rotations to discard"),
    click.option("--prune-abs", type=float, default=None,
                 help="absolute angle threshold for pruning"),
    click.option("--no-parity-cancel", is_flag=True,
                 help="skip the CNOT parity-cancellation step"),
    click.option("--exclude-zero-blocks", is_flag=True,
                 help="drop all-zero tiles from the averaged fidelity"),
    click.option("--server", default=None, metavar="URL",
                 help="remote service URL (default: in-process)"),
]


def _apply(options):
    def wrap(fn):
        for opt in reversed(options):
            fn = opt(fn)
        return fn
    return wrap


@click.group()
@click.version_option()
def main() -> None:
    """Encode raster images as approximate quantum amplitude states."""


@main.command()
@click.option("--in", "in_path", required=True, type=click.Path(), help="input image (PPM/PNG)")
@click.option("--out-image", default=None, type=click.Path(), help="reconstructed image path")
@click.option("--out-report", default=None, type=click.Path(), help="JSON report path")
@click.option("--strategy", type=click.Choice(STRATEGIES), default=None,
              help="force a strategy (default: derived from flags)")
@click.option("--dump-circuits", "dump_dir", default=None, type=click.Path(file_okay=False),
              help="write per-circuit gate listings to this directory")
@_apply(_shared_options)
def encode(in_path, out_image, out_report, strategy, dump_dir, m, mode, partition_n0,
           m0, prune_fraction, prune_abs, no_parity_cancel, exclude_zero_blocks, server):
    """Encode one image and write its report and reconstruction."""
    client = ApiClient(server)
    payload = {
        "image_b64": _read_image_b64(in_path),
        "options": _options_payload(m, mode, partition_n0, m0, prune_fraction,
                                    prune_abs, no_parity_cancel, strategy,
                                    exclude_zero_blocks),
        "include_image": out_image is not None,
        "image_format": _image_format_for(out_image),
        "dump_circuits": dump_dir is not None,
    }
    data = client.post("/encode", payload)
    report = data["report"]
    if out_report:
        _write_bytes(out_report, (json.dumps(report, indent=2, sort_keys=True) + "\n").encode())
    if out_image:
        _write_bytes(out_image, base64.b64decode(data["image_b64"]))
    if dump_dir:
        dump_root = Path(dump_dir)
        dump_root.mkdir(parents=True, exist_ok=True)
        for name, text in (data.get("circuit_dumps") or {}).items():
            _write_bytes(str(dump_root / name), text.encode())
    fid = report["fidelity"]
    click.echo(
        f"strategy={report['strategy']} qubits={report['qubits']} "
        f"circuits={report['circuit_count']} m={report['m']} "
        f"fidelity r/g/b={fid['r']:.4f}/{fid['g']:.4f}/{fid['b']:.4f} "
        f"rotations_max={report['rotations_max']} cnots_max={report['cnots_max']}"
    )


@main.command()
@click.option("--in", "in_path", required=True, type=click.Path())
@click.option("--strategy", "strategies", multiple=True, type=click.Choice(STRATEGIES),
              help="strategy to include (repeat; at least two)")
@click.option("--out-report", default=None, type=click.Path(), help="JSON rows path")
@click.option("--out-csv", default=None, type=click.Path(), help="CSV table path")
@_apply(_shared_options)
def compare(in_path, strategies, out_report, out_csv, m, mode, partition_n0, m0,
            prune_fraction, prune_abs, no_parity_cancel, exclude_zero_blocks, server):
    """Run several strategies on one image and print a side-by-side table."""
    if not strategies:
        strategies = STRATEGIES[:4]
    client = ApiClient(server)
    payload = {
        "image_b64": _read_image_b64(in_path),
        "strategies": list(strategies),
        "options": _options_payload(m, mode, partition_n0, m0, prune_fraction,
                                    prune_abs, no_parity_cancel, None,
                                    exclude_zero_blocks),
    }
    data = client.post("/compare", payload)
    click.echo(data["table"], nl=False)
    if out_report:
        _write_bytes(out_report,
                     (json.dumps({"rows": data["rows"]}, indent=2, sort_keys=True) + "\n").encode())
    if out_csv:
        _write_bytes(out_csv, data["csv"].encode())


@main.command()
@click.option("--in", "in_path", required=True, type=click.Path())
@click.option("--m", "m", type=int, required=True, help="truncation order to verify")
@click.option("--tolerance", type=float, default=1e-9, show_default=True)
@click.option("--corrupt-angle", type=float, default=0.0, hidden=True)
@click.option("--server", default=None, metavar="URL")
def verify(in_path, m, tolerance, corrupt_angle, server):
    """Check circuit statevectors against the classical reconstruction."""
    client = ApiClient(server)
    payload = {
        "image_b64": _read_image_b64(in_path),
        "m": m,
        "tolerance": tolerance,
        "corrupt_angle": corrupt_angle,
    }
    data = client.post("/verify", payload)
    status = "PASS" if data["passed"] else "FAIL"
    click.echo(f"{status} max deviation {data['max_deviation']:.3e} "
               f"(tolerance {data['tolerance']:.1e})")
    if not data["passed"]:
        sys.exit(EXIT_VERIFY)


@main.command("gen-image")
@click.option("--out", "out_path", required=True, type=click.Path())
@click.option("--width", type=int, default=64, show_default=True)
@click.option("--height", type=int, default=64, show_default=True)
@click.option("--seed", type=int, default=0, show_default=True)
@click.option("--smooth", is_flag=True, help="low-pass the noise for high-fidelity demos")
@click.option("--server", default=None, metavar="URL")
def gen_image(out_path, width, height, seed, smooth, server):
    """Write a deterministic random test image."""
    client = ApiClient(server)
    payload = {
        "width": width,
        "height": height,
        "seed": seed,
        "smooth": smooth,
        "image_format": _image_format_for(out_path),
    }
    data = client.post("/generate", payload)
    _write_bytes(out_path, base64.b64decode(data["image_b64"]))
    click.echo(f"wrote {data['width']}x{data['height']} image to {out_path}")


@main.command()
@click.option("--host", default="127.0.0.1", show_default=True)
@click.option("--port", type=int, default=8000, show_default=True)
def serve(host, port):
    """Run the encoding service."""
    import uvicorn

    uvicorn.run("faqpie.service.app:app", host=host, port=port)


if __name__ == "__main__":
    main()
