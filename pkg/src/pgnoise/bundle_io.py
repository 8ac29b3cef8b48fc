"""Parameter-bundle serialization.

Bundles are stored as canonical JSON: sorted keys, two-space indent, a
trailing newline, and floats written with Python's shortest round-trip
representation, so numbers survive a round trip exactly and equal bundles
always produce identical bytes. The layout is

    {
      "channels": {
        "blue":  {"a": {"edges": [...], "mass": [...]},
                  "intercept": {...}, "slope": {...}},
        "green": {...},
        "red":   {...}
      },
      "format_version": 1,
      "metadata": {"key": "value", ...}
    }

Parsing is strict: unknown keys, wrong types, non-finite numbers, histogram
invariant violations and unsupported versions are all structured errors
naming the offending field; no input crashes the parser or yields a partial
bundle.
"""

import hashlib
import json
import math

from .errors import (
    BundleParseError,
    BundleValidationError,
    BundleVersionError,
    InvalidInputError,
)
from .generator import ChannelHistograms, ParamBundle
from .histogram import Histogram
from .model import CHANNEL_NAMES

FORMAT_VERSION = 1

_HIST_FIELDS = ("slope", "intercept", "a")


def serialize_bundle(bundle):
    """Canonical JSON bytes for a bundle; equal bundles give equal bytes."""
    if not isinstance(bundle, ParamBundle):
        raise InvalidInputError("bundle must be a ParamBundle")
    doc = {
        "format_version": FORMAT_VERSION,
        "channels": {
            name: {
                field: {
                    "edges": [float(v) for v in getattr(bundle.channel(name), field).edges],
                    "mass": [float(v) for v in getattr(bundle.channel(name), field).mass],
                }
                for field in _HIST_FIELDS
            }
            for name in CHANNEL_NAMES
        },
        "metadata": dict(bundle.metadata),
    }
    text = json.dumps(doc, sort_keys=True, indent=2, allow_nan=False)
    return (text + "\n").encode("utf-8")


def _reject_constant(token):
    raise ValueError(f"non-finite number token {token!r}")


def _object(node, path):
    if not isinstance(node, dict):
        raise BundleValidationError(
            f"expected an object, got {type(node).__name__}", path=path
        )
    return node


def _exact_keys(node, expected, path):
    extra = sorted(set(node) - set(expected))
    if extra:
        raise BundleValidationError(f"unknown keys {extra}", path=path)
    for key in expected:
        if key not in node:
            raise BundleValidationError("missing", path=f"{path}.{key}" if path else key)


def _number_list(node, path):
    if not isinstance(node, list):
        raise BundleValidationError(
            f"expected an array, got {type(node).__name__}", path=path
        )
    out = []
    for i, v in enumerate(node):
        if isinstance(v, bool) or not isinstance(v, (int, float)):
            raise BundleValidationError(
                f"expected a number, got {type(v).__name__}", path=f"{path}[{i}]"
            )
        v = float(v)
        if not math.isfinite(v):
            raise BundleValidationError("number is not finite", path=f"{path}[{i}]")
        out.append(v)
    return out


def parse_bundle(data):
    """Parse and validate bundle bytes (or text).

    Raises
    ------
    BundleParseError
        Input is not UTF-8 JSON.
    BundleVersionError
        Unsupported format_version.
    BundleValidationError
        Structurally valid JSON that is not a valid bundle; the error's
        `path` names the offending field (e.g. "channels.red.a.edges[3]").
    """
    if isinstance(data, bytes):
        try:
            text = data.decode("utf-8")
        except UnicodeDecodeError as e:
            raise BundleParseError(f"bundle is not UTF-8: {e}") from e
    elif isinstance(data, str):
        text = data
    else:
        raise InvalidInputError(f"expected bytes or str, got {type(data).__name__}")
    try:
        doc = json.loads(text, parse_constant=_reject_constant)
    except (json.JSONDecodeError, ValueError, RecursionError) as e:
        raise BundleParseError(f"bundle is not valid JSON: {e}") from e

    _object(doc, "")
    _exact_keys(doc, ("channels", "format_version", "metadata"), "")

    version = doc["format_version"]
    if isinstance(version, bool) or not isinstance(version, int):
        raise BundleValidationError("must be an integer", path="format_version")
    if version != FORMAT_VERSION:
        raise BundleVersionError(
            f"format_version {version} is not supported (this reader handles {FORMAT_VERSION})"
        )

    channels_doc = _object(doc["channels"], "channels")
    _exact_keys(channels_doc, CHANNEL_NAMES, "channels")
    channels = {}
    for name in CHANNEL_NAMES:
        ch_doc = _object(channels_doc[name], f"channels.{name}")
        _exact_keys(ch_doc, _HIST_FIELDS, f"channels.{name}")
        hists = {}
        for field in _HIST_FIELDS:
            path = f"channels.{name}.{field}"
            h_doc = _object(ch_doc[field], path)
            _exact_keys(h_doc, ("edges", "mass"), path)
            edges = _number_list(h_doc["edges"], f"{path}.edges")
            mass = _number_list(h_doc["mass"], f"{path}.mass")
            try:
                hists[field] = Histogram(edges, mass)
            except InvalidInputError as e:
                raise BundleValidationError(str(e), path=path) from e
        try:
            channels[name] = ChannelHistograms(**hists)
        except InvalidInputError as e:
            raise BundleValidationError(str(e), path=f"channels.{name}.a") from e

    meta_doc = _object(doc["metadata"], "metadata")
    for key, value in meta_doc.items():
        if isinstance(value, bool):
            continue
        if isinstance(value, float) and not math.isfinite(value):
            raise BundleValidationError("number is not finite", path=f"metadata.{key}")
        if not isinstance(value, (str, int, float)):
            raise BundleValidationError(
                f"expected a scalar, got {type(value).__name__}", path=f"metadata.{key}"
            )

    try:
        return ParamBundle(metadata=meta_doc, **channels)
    except InvalidInputError as e:
        raise BundleValidationError(str(e)) from e


def save_bundle(bundle, path):
    """Write the canonical serialization of `bundle` to `path`."""
    data = serialize_bundle(bundle)
    with open(path, "wb") as fh:
        fh.write(data)


def load_bundle(path):
    """Read and parse a bundle file."""
    with open(path, "rb") as fh:
        return parse_bundle(fh.read())


def bundle_digest(bundle):
    """SHA-256 hex digest of the canonical serialization (bundle identity)."""
    return hashlib.sha256(serialize_bundle(bundle)).hexdigest()
