"""Batch CLI: a thin client of the HTTP service.

Every command builds a request model, routes it through the FastAPI app (in
process via ASGI by default, or to a remote server with --server), prints the
JSON response, and maps the verdict to the exit code contract:

    0 accepted / valid      1 refuted / invalid     2 unknown
    64 usage errors         65 structural / format errors

Identical invocations produce identical JSON except the elapsed_ms field.
The PSDLAB_SEED environment variable supplies the default seed.
"""

from __future__ import annotations

import asyncio
import json
import os
import sys
from typing import Any, Optional

import click
import httpx

EXIT_ACCEPTED = 0
EXIT_REFUTED = 1
EXIT_UNKNOWN = 2
EXIT_USAGE = 64
EXIT_STRUCTURAL = 65


class ServiceError(Exception):
    def __init__(self, status_code: int, detail: Any):
        self.status_code = status_code
        self.detail = detail
        super().__init__(f"HTTP {status_code}: {detail}")


def call_service(path: str, payload: dict, server: Optional[str] = None) -> dict:
    """POST to the service: remote when a server URL is given, in-process ASGI otherwise."""

    async def _call() -> httpx.Response:
        if server:
            async with httpx.AsyncClient(base_url=server, timeout=600.0) as client:
                return await client.post(path, json=payload)
        from .service import app

        transport = httpx.ASGITransport(app=app)
        async with httpx.AsyncClient(transport=transport, base_url="http://psdlab", timeout=600.0) as client:
            return await client.post(path, json=payload)

    response = asyncio.run(_call())
    if response.status_code != 200:
        try:
            detail = response.json().get("detail", response.text)
        except Exception:
            detail = response.text
        raise ServiceError(response.status_code, detail)
    return response.json()


def emit(data: dict, json_out: Optional[str]) -> None:
    text = json.dumps(data, indent=2, sort_keys=True)
    if json_out:
        with open(json_out, "w") as fh:
            fh.write(text + "\n")
    click.echo(text)


def default_seed() -> int:
    return int(os.environ.get("PSDLAB_SEED", "0"))


def _load_json_file(path: str, what: str) -> dict:
    try:
        with open(path) as fh:
            return json.load(fh)
    except FileNotFoundError:
        raise click.UsageError(f"{what} file not found: {path}")
    except json.JSONDecodeError as exc:
        raise StructuralError(f"{what} file is not valid JSON: {exc}")


class StructuralError(Exception):
    pass


server_option = click.option("--server", default=None, help="Remote service URL (default: in-process).")
json_out_option = click.option("--json-out", default=None, help="Also write the JSON response to this file.")
order_option = click.option("--order", type=click.Choice(["lex", "example34"]), default="lex",
                            show_default=True, help="Monomial order.")


@click.group()
def cli() -> None:
    """Exact Gram filtrations and certificate-checked cone membership."""


@cli.command()
@click.option("-n", type=int, required=True)
@click.option("-d", type=int, required=True)
@order_option
@server_option
@json_out_option
def basis(n: int, d: int, order: str, server: Optional[str], json_out: Optional[str]) -> None:
    """Ordered degree-d monomial basis in n+1 variables."""
    emit(call_service("/basis", {"n": n, "d": d, "order": order}, server), json_out)


@cli.command()
@click.option("-n", type=int, required=True)
@click.option("-d", type=int, required=True)
@order_option
@server_option
@json_out_option
def filtration(n: int, d: int, order: str, server: Optional[str], json_out: Optional[str]) -> None:
    """Raw steps, quadrics, dedup and separation data of the cone chain."""
    emit(call_service("/filtration", {"n": n, "d": d, "order": order}, server), json_out)


@cli.command()
@click.argument("form_file", type=click.Path())
@order_option
@server_option
@json_out_option
def gram(form_file: str, order: str, server: Optional[str], json_out: Optional[str]) -> None:
    """Canonical Gram matrix and fiber dimensions of a form."""
    form = _load_json_file(form_file, "form")
    emit(call_service("/gram", {"form": form, "order": order}, server), json_out)


@cli.command()
@click.option("-n", type=int, required=True)
@click.option("-d", type=int, required=True)
@order_option
@click.option("--elements/--no-elements", default=True, show_default=True)
@server_option
@json_out_option
def kernel(n: int, d: int, order: str, elements: bool, server: Optional[str], json_out: Optional[str]) -> None:
    """Sparse basis of the Gram-map kernel."""
    emit(call_service("/kernel", {"n": n, "d": d, "order": order, "include_elements": elements}, server),
         json_out)


@cli.command()
@click.argument("form_file", type=click.Path())
@click.option("--mode", type=click.Choice(["sos", "psd", "ci", "interior", "boundary"]),
              default="sos", show_default=True)
@click.option("--level", type=int, default=0, show_default=True)
@click.option("--lift", type=int, default=1, show_default=True)
@order_option
@click.option("--seed", type=int, default=None, help="Default: PSDLAB_SEED or 0.")
@click.option("--margin", default=None, help="Interior mode margin as a rational, default 1.")
@click.option("--max-iter", type=int, default=None)
@click.option("--pool", type=int, default=None)
@server_option
@json_out_option
def test(form_file: str, mode: str, level: int, lift: int, order: str, seed: Optional[int],
         margin: Optional[str], max_iter: Optional[int], pool: Optional[int],
         server: Optional[str], json_out: Optional[str]) -> None:
    """Certificate-producing membership test; exit code carries the verdict."""
    form = _load_json_file(form_file, "form")
    payload = {"form": form, "mode": mode, "level": level, "lift": lift, "order": order,
               "seed": seed if seed is not None else default_seed()}
    if margin is not None:
        payload["margin"] = margin
    if max_iter is not None:
        payload["max_iter"] = max_iter
    if pool is not None:
        payload["pool"] = pool
    data = call_service("/test", payload, server)
    emit(data, json_out)
    sys.exit({"accepted": EXIT_ACCEPTED, "refuted": EXIT_REFUTED}.get(data["verdict"], EXIT_UNKNOWN))


@cli.command()
@click.argument("certificate_file", type=click.Path())
@click.argument("form_file", type=click.Path())
@server_option
@json_out_option
def verify(certificate_file: str, form_file: str, server: Optional[str], json_out: Optional[str]) -> None:
    """Independent exact re-check of a certificate against a form."""
    cert = _load_json_file(certificate_file, "certificate")
    form = _load_json_file(form_file, "form")
    data = call_service("/verify", {"certificate": cert, "form": form}, server)
    emit(data, json_out)
    if data["valid"]:
        sys.exit(EXIT_ACCEPTED)
    sys.exit(EXIT_STRUCTURAL if data.get("structural") else EXIT_REFUTED)


@cli.command()
@click.option("-n", type=int, required=True)
@click.option("-d", type=int, required=True)
@server_option
@json_out_option
def report(n: int, d: int, server: Optional[str], json_out: Optional[str]) -> None:
    """Human-readable summary: pattern, dimensions, kernel size, index sets."""
    data = call_service("/report", {"n": n, "d": d}, server)
    if json_out:
        emit(data, json_out)
    else:
        click.echo(data["text"])


@cli.command()
@click.argument("name", type=click.Choice(["motzkin", "quartic_psd_not_sos", "basis_sos", "zero"]))
@click.option("-n", type=int, default=None)
@click.option("-d", type=int, default=None)
@server_option
@json_out_option
def corpus(name: str, n: Optional[int], d: Optional[int], server: Optional[str], json_out: Optional[str]) -> None:
    """Named fixture forms as JSON."""
    payload: dict = {"name": name}
    if n is not None:
        payload["n"] = n
    if d is not None:
        payload["d"] = d
    emit(call_service("/corpus", payload, server), json_out)


@cli.command()
@click.option("-n", type=int, required=True)
@click.option("-d", type=int, required=True)
@order_option
@click.option("--level", type=int, default=0, show_default=True)
@click.option("--seed", type=int, default=None)
@click.option("--count", type=int, default=10, show_default=True)
@server_option
@json_out_option
def sample(n: int, d: int, order: str, level: int, seed: Optional[int], count: int,
           server: Optional[str], json_out: Optional[str]) -> None:
    """Rational points of the level-i parametrized set, with witnesses."""
    payload = {"n": n, "d": d, "order": order, "level": level,
               "seed": seed if seed is not None else default_seed(), "count": count}
    emit(call_service("/sample", payload, server), json_out)


@cli.command()
@click.option("--host", default="127.0.0.1", show_default=True)
@click.option("--port", type=int, default=8787, show_default=True)
def serve(host: str, port: int) -> None:
    """Run the HTTP service."""
    import uvicorn

    uvicorn.run("psdlab.service:app", host=host, port=port)


def main(argv: Optional[list[str]] = None) -> int:
    try:
        cli.main(args=argv, standalone_mode=False)
        return EXIT_ACCEPTED
    except SystemExit as exc:
        return int(exc.code or 0)
    except click.UsageError as exc:
        click.echo(f"usage error: {exc.format_message()}", err=True)
        return EXIT_USAGE
    except click.ClickException as exc:
        exc.show()
        return EXIT_USAGE
    except StructuralError as exc:
        click.echo(f"error: {exc}", err=True)
        return EXIT_STRUCTURAL
    except ServiceError as exc:
        click.echo(f"error: {exc.detail}", err=True)
        return EXIT_STRUCTURAL if exc.status_code in (400, 422) else EXIT_UNKNOWN


if __name__ == "__main__":
    sys.exit(main())
