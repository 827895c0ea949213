"""Lossless JSON serialisation of moment sets.

Coefficient values are stored as C99 hex-float strings (exact 64-bit
round trip) with a human-readable decimal mirror alongside.
"""

from __future__ import annotations

import json

from .engine import MomentSet
from .errors import DataError
from .geometry import Scheme
from .methods import MethodSpec, OrderIndex, order_set

FORMAT_VERSION = 1


def moments_to_dict(ms: MomentSet) -> dict:
    records = []
    for n, m in order_set(ms.method, ms.K).indices:
        v = complex(ms.coefficients[OrderIndex(n, m)])
        records.append([n, m, v.real.hex(), v.imag.hex(), v.real, v.imag])
    return {
        "format_version": FORMAT_VERSION,
        "method": ms.method.to_dict(),
        "K": ms.K,
        "scheme": ms.scheme.to_dict(),
        "image_sha256": ms.image_sha256,
        "records": records,
    }


def moments_from_dict(d: dict) -> MomentSet:
    try:
        if d["format_version"] != FORMAT_VERSION:
            raise DataError(f"unsupported moment-file version "
                            f"{d['format_version']}")
        method = MethodSpec.from_dict(d["method"])
        K = int(d["K"])
        scheme = Scheme.from_dict(d["scheme"])
        coeffs = {}
        for rec in d["records"]:
            n, m, re_hex, im_hex = rec[0], rec[1], rec[2], rec[3]
            coeffs[OrderIndex(int(n), int(m))] = complex(
                float.fromhex(re_hex), float.fromhex(im_hex))
    except (KeyError, IndexError, TypeError, ValueError) as exc:
        raise DataError(f"malformed moment file: {exc}") from exc
    expected = set(order_set(method, K).indices)
    if set(coeffs) != expected:
        raise DataError("moment-file records do not cover S(K) exactly")
    return MomentSet(method, K, scheme, coeffs,
                     d.get("image_sha256", ""), d["scheme"].get("fft_size"))


def write_moments(ms: MomentSet, path) -> None:
    with open(path, "w", encoding="ascii") as fh:
        json.dump(moments_to_dict(ms), fh, indent=1)
        fh.write("\n")


def read_moments(path) -> MomentSet:
    try:
        with open(path, "r", encoding="ascii") as fh:
            d = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise DataError(f"cannot parse moment file {path}: {exc}") from exc
    return moments_from_dict(d)
