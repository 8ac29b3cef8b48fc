"""Bundle serialization tests: canonical bytes, strict parsing, round trips."""

import json
import os

import numpy as np
import pytest

from pgnoise.bundle_io import (
    FORMAT_VERSION,
    bundle_digest,
    load_bundle,
    parse_bundle,
    save_bundle,
    serialize_bundle,
)
from pgnoise.errors import (
    BundleError,
    BundleParseError,
    BundleValidationError,
    BundleVersionError,
    InvalidInputError,
)
from pgnoise.fixtures import make_example_bundle, random_bundle

_DATA_PATH = os.path.join(os.path.dirname(__file__), os.pardir, "src",
                          "pgnoise", "data", "example_bundle.json")


def _doc(bundle=None):
    return json.loads(serialize_bundle(bundle or random_bundle(1)))


def _parse_doc(doc):
    return parse_bundle(json.dumps(doc).encode())


class TestSerialize:
    def test_canonical_bytes_are_stable(self):
        bundle = random_bundle(3)
        assert serialize_bundle(bundle) == serialize_bundle(bundle)

    def test_shipped_bundle_matches_recipe(self):
        with open(_DATA_PATH, "rb") as fh:
            shipped = fh.read()
        assert serialize_bundle(make_example_bundle()) == shipped

    def test_layout(self):
        doc = _doc()
        assert set(doc) == {"channels", "format_version", "metadata"}
        assert doc["format_version"] == FORMAT_VERSION == 1
        assert set(doc["channels"]) == {"red", "green", "blue"}
        for ch in doc["channels"].values():
            assert set(ch) == {"slope", "intercept", "a"}
            for hist in ch.values():
                assert set(hist) == {"edges", "mass"}
                assert len(hist["edges"]) == len(hist["mass"]) + 1

    def test_trailing_newline_and_sorted_keys(self):
        data = serialize_bundle(random_bundle(2))
        assert data.endswith(b"\n")
        text = data.decode()
        assert text.index('"channels"') < text.index('"format_version"') \
            < text.index('"metadata"')

    def test_rejects_non_bundle(self):
        with pytest.raises(InvalidInputError):
            serialize_bundle({"channels": {}})


class TestRoundTrip:
    @pytest.mark.parametrize("seed", range(5))
    def test_parse_serialize_identity(self, seed):
        data = serialize_bundle(random_bundle(seed))
        assert serialize_bundle(parse_bundle(data)) == data

    def test_values_survive_exactly(self):
        bundle = random_bundle(17)
        parsed = parse_bundle(serialize_bundle(bundle))
        for name in ("red", "green", "blue"):
            for field in ("slope", "intercept", "a"):
                original = getattr(bundle.channel(name), field)
                loaded = getattr(parsed.channel(name), field)
                assert np.array_equal(original.edges, loaded.edges)
                assert np.array_equal(original.mass, loaded.mass)

    def test_representative_edges_survive(self):
        doc = _doc()
        doc["channels"]["red"]["a"]["edges"] = [1e-5, 1e-3]
        doc["channels"]["red"]["a"]["mass"] = [4.0]
        parsed = _parse_doc(doc)
        assert parsed.channel("red").a.edges[0] == 1e-5
        assert parsed.channel("red").a.edges[1] == 1e-3

    def test_save_load(self, tmp_path):
        bundle = random_bundle(8)
        path = tmp_path / "bundle.json"
        save_bundle(bundle, path)
        loaded = load_bundle(path)
        assert serialize_bundle(loaded) == serialize_bundle(bundle)

    def test_text_input_accepted(self):
        data = serialize_bundle(random_bundle(4))
        assert serialize_bundle(parse_bundle(data.decode())) == data

    def test_digest_tracks_content(self):
        one = bundle_digest(random_bundle(5))
        two = bundle_digest(random_bundle(5))
        other = bundle_digest(random_bundle(6))
        assert one == two
        assert one != other
        assert len(one) == 64 and set(one) <= set("0123456789abcdef")


class TestParseErrors:
    def test_not_json(self):
        with pytest.raises(BundleParseError):
            parse_bundle(b"not json {")

    def test_not_utf8(self):
        with pytest.raises(BundleParseError):
            parse_bundle(b"\xff\xfe{}")

    def test_nan_and_infinity_tokens(self):
        doc_text = serialize_bundle(random_bundle(1)).decode()
        for token in ("NaN", "Infinity", "-Infinity"):
            mutated = doc_text.replace('"format_version": 1',
                                       f'"format_version": 1, "extra": {token}', 1)
            with pytest.raises(BundleParseError):
                parse_bundle(mutated)

    def test_overflowing_literal_rejected(self):
        doc = _doc()
        text = json.dumps(doc).replace(
            json.dumps(doc["channels"]["red"]["a"]["edges"][0]), "1e999", 1)
        with pytest.raises(BundleValidationError, match="finite"):
            parse_bundle(text)

    def test_top_level_must_be_object(self):
        with pytest.raises(BundleValidationError):
            parse_bundle(b"[1, 2]")

    def test_wrong_version(self):
        doc = _doc()
        doc["format_version"] = 2
        with pytest.raises(BundleVersionError):
            _parse_doc(doc)

    def test_boolean_version_rejected(self):
        doc = _doc()
        doc["format_version"] = True
        with pytest.raises(BundleValidationError, match="format_version"):
            _parse_doc(doc)

    def test_unknown_top_level_key(self):
        doc = _doc()
        doc["comment"] = "hi"
        with pytest.raises(BundleValidationError, match="comment"):
            _parse_doc(doc)

    def test_missing_channel(self):
        doc = _doc()
        del doc["channels"]["green"]
        with pytest.raises(BundleValidationError, match="channels.green"):
            _parse_doc(doc)

    def test_unknown_histogram_key(self):
        doc = _doc()
        doc["channels"]["red"]["a"]["note"] = 1
        with pytest.raises(BundleValidationError, match="channels.red.a"):
            _parse_doc(doc)

    def test_boolean_in_mass(self):
        doc = _doc()
        doc["channels"]["blue"]["slope"]["mass"][0] = True
        with pytest.raises(BundleValidationError,
                           match=r"channels\.blue\.slope\.mass\[0\]"):
            _parse_doc(doc)

    def test_string_in_edges(self):
        doc = _doc()
        doc["channels"]["red"]["intercept"]["edges"][2] = "0.5"
        with pytest.raises(BundleValidationError,
                           match=r"channels\.red\.intercept\.edges\[2\]"):
            _parse_doc(doc)

    def test_non_increasing_edges(self):
        doc = _doc()
        edges = doc["channels"]["green"]["a"]["edges"]
        edges[1] = edges[0]
        with pytest.raises(BundleValidationError, match="channels.green.a"):
            _parse_doc(doc)

    def test_negative_mass(self):
        doc = _doc()
        doc["channels"]["red"]["slope"]["mass"][0] = -1.0
        with pytest.raises(BundleValidationError, match="channels.red.slope"):
            _parse_doc(doc)

    def test_non_positive_gain_support(self):
        doc = _doc()
        hist = doc["channels"]["green"]["a"]
        width = hist["edges"][-1] - hist["edges"][0]
        hist["edges"] = [e - hist["edges"][0] - width for e in hist["edges"]]
        with pytest.raises(BundleValidationError, match="channels.green.a"):
            _parse_doc(doc)

    def test_metadata_must_hold_scalars(self):
        doc = _doc()
        doc["metadata"]["nested"] = {"x": 1}
        with pytest.raises(BundleValidationError, match="metadata.nested"):
            _parse_doc(doc)

    def test_deeply_nested_json_is_a_structured_error(self):
        nested = "[" * 100_000 + "]" * 100_000
        with pytest.raises(BundleError):
            parse_bundle(nested.encode())

    def test_errors_expose_paths(self):
        doc = _doc()
        doc["channels"]["red"]["a"]["edges"][3] = None
        with pytest.raises(BundleValidationError) as excinfo:
            _parse_doc(doc)
        assert excinfo.value.path == "channels.red.a.edges[3]"
        assert "channels.red.a.edges[3]" in str(excinfo.value)
