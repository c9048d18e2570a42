"""Stable on-disk formats: digit files and certificate files.

Digit files are UTF-8 text, one positive decimal integer per line, with
``#`` comment lines allowed anywhere; the digit index is the 1-based
order of non-comment lines. Certificate files are JSON with every
arbitrary-precision integer carried as a decimal string, so nothing is
rounded or truncated. Both begin with a run header that echoes enough
configuration to reproduce the run bit-exactly (set SOURCE_DATE_EPOCH
to pin the timestamp for byte-identical reruns).
"""

from __future__ import annotations

import json
import os
import sys
from contextlib import contextmanager
from datetime import datetime, timezone
from typing import Sequence

from .construction import BlockCertificate
from .errors import InputFormatError
from .seed import parse_digit_file

FORMAT_VERSION = "1"
TOOL_NAME = "abnormal-forge"
TOOL_VERSION = "0.1.0"


@contextmanager
def unlimited_int_strings():
    """Temporarily lift the int<->str digit limit for huge certificate values."""
    get = getattr(sys, "get_int_max_str_digits", None)
    if get is None:
        yield
        return
    old = get()
    sys.set_int_max_str_digits(0)
    try:
        yield
    finally:
        sys.set_int_max_str_digits(old)


def _timestamp() -> str:
    pinned = os.environ.get("SOURCE_DATE_EPOCH")
    if pinned is not None:
        moment = datetime.fromtimestamp(int(pinned), tz=timezone.utc)
    else:
        moment = datetime.now(tz=timezone.utc)
    return moment.replace(microsecond=0).isoformat()


def run_header(config_echo: dict, seed_descriptor: dict,
               partial: bool = False) -> dict:
    return {"tool": TOOL_NAME, "version": TOOL_VERSION,
            "format_version": FORMAT_VERSION, "timestamp": _timestamp(),
            "config": config_echo, "seed": seed_descriptor,
            "partial": partial}


def write_digit_file(path, digits: Sequence[int], header: dict | None = None) -> None:
    with unlimited_int_strings(), open(path, "w", encoding="utf-8") as fh:
        fh.write(f"# {TOOL_NAME} digit file v{FORMAT_VERSION}\n")
        if header is not None:
            fh.write(f"# header: {json.dumps(header, sort_keys=True)}\n")
        for d in digits:
            fh.write(f"{d}\n")


def read_digit_file(path) -> tuple[list[int], dict | None]:
    """Digits plus the parsed header comment, if one is present."""
    header = None
    with unlimited_int_strings(), open(path, "r", encoding="utf-8") as fh:
        lines = fh.readlines()
    for raw in lines:
        line = raw.strip()
        if line.startswith("# header:"):
            try:
                header = json.loads(line[len("# header:"):])
            except json.JSONDecodeError:
                raise InputFormatError("malformed header comment") from None
            break
    with unlimited_int_strings():
        digits = parse_digit_file(iter(lines))
    return digits, header


def _cert_to_json(cert: BlockCertificate) -> dict:
    return {
        "index": cert.index,
        "base": str(cert.base),
        "block_end": cert.block_end,
        "inserted": [str(v) for v in cert.inserted],
        "denoms_before": [str(v) for v in cert.denoms_before],
        "denoms_after": [str(v) for v in cert.denoms_after],
        "prime": str(cert.prime),
        "exponent": str(cert.exponent),
        "digit_bound": str(cert.digit_bound),
        "mode": cert.mode,
    }


def _cert_from_json(record: dict) -> BlockCertificate:
    try:
        inserted = tuple(int(v) for v in record["inserted"])
        before = tuple(int(v) for v in record["denoms_before"])
        after = tuple(int(v) for v in record["denoms_after"])
        if len(inserted) != 4 or len(before) != 2 or len(after) != 3:
            raise InputFormatError("certificate arrays have the wrong arity")
        return BlockCertificate(
            index=int(record["index"]), base=int(record["base"]),
            block_end=int(record["block_end"]), inserted=inserted,
            denoms_before=before, denoms_after=after,
            prime=int(record["prime"]), exponent=int(record["exponent"]),
            digit_bound=int(record["digit_bound"]), mode=record["mode"])
    except (KeyError, ValueError, TypeError) as exc:
        raise InputFormatError(f"bad certificate record: {exc}") from None


def write_certificate_file(path, certificates: Sequence[BlockCertificate],
                           header: dict) -> None:
    with unlimited_int_strings():
        payload = {"format": f"{TOOL_NAME}-certificates",
                   "format_version": FORMAT_VERSION,
                   "header": header,
                   "blocks": [_cert_to_json(c) for c in certificates]}
        with open(path, "w", encoding="utf-8") as fh:
            json.dump(payload, fh, indent=2, sort_keys=True)
            fh.write("\n")


def read_certificate_file(path) -> tuple[list[BlockCertificate], dict]:
    with unlimited_int_strings(), open(path, "r", encoding="utf-8") as fh:
        try:
            payload = json.load(fh)
        except json.JSONDecodeError as exc:
            raise InputFormatError(f"not valid JSON: {exc}") from None
    if not isinstance(payload, dict) or "blocks" not in payload:
        raise InputFormatError("missing certificate block list")
    if payload.get("format") != f"{TOOL_NAME}-certificates":
        raise InputFormatError("not a certificate file")
    with unlimited_int_strings():
        certs = [_cert_from_json(rec) for rec in payload["blocks"]]
    return certs, payload.get("header", {})
