import copy
import json

import pytest

from bscat import certificates as cert
from bscat.berstein import (
    bs_equal,
    decompose_certificate,
    order_certificate,
    power_certificate,
    vanish_bruteforce,
    vanish_structured,
)
from bscat.lensarith import (
    LensSpec,
    bezout_certificate,
    bounds_certificate,
    bounds_report,
    cup_length_lower,
    emss_certificate,
    essential_certificate,
    olum_certificate,
)
from bscat.replay import recheck


@pytest.fixture(scope="module")
def samples(cache_dir):
    return {
        "order-p": order_certificate(3),
        "bs-equal": bs_equal(5),
        "bs-power": power_certificate(3, 3),
        "decompose": decompose_certificate(2, 3),
        "ber-nul structured": vanish_structured(3, 2, 3, cache_dir=cache_dir),
        "ber-nul bruteforce": vanish_bruteforce(1, 2, 3, cache_dir=cache_dir),
        "cup-length": cup_length_lower(3, 2, 3, cache_dir=cache_dir)[1],
        "cup-length cokernel": cup_length_lower(3, 3, 5, budget=5, cache_dir=cache_dir)[1],
        "bounds": bounds_certificate(bounds_report(3, 2, 3, cache_dir=cache_dir)),
        "essential": essential_certificate(3, 5),
        "essential product": essential_certificate(3, 2, 3),
        "bezout": bezout_certificate(3, 5),
        "olum yes": olum_certificate(LensSpec(7, (1, 1)), LensSpec(7, (1, 2))),
        "olum no": olum_certificate(LensSpec(5, (1, 1)), LensSpec(5, (1, 2))),
        "emss": emss_certificate(LensSpec(5, (1, 1, 1))),
    }


def roundtrip(c):
    return json.loads(c.to_json())


def int_leaves(obj, path=()):
    """Paths to every decimal-string integer inside a witness."""
    if isinstance(obj, dict):
        for k, v in obj.items():
            yield from int_leaves(v, path + (k,))
    elif isinstance(obj, list):
        for i, v in enumerate(obj):
            yield from int_leaves(v, path + (i,))
    elif isinstance(obj, str) and obj.lstrip("-").isdigit():
        yield path


def flip(doc, path, rehash):
    bad = copy.deepcopy(doc)
    node = bad["witness"]
    for k in path[:-1]:
        node = node[k]
    node[path[-1]] = str(int(node[path[-1]]) ^ 1)
    if rehash:
        bad["digest"] = cert.digest(bad["witness"])
    return bad


def test_all_samples_verify_and_recheck(samples):
    for name, c in samples.items():
        assert c.status == cert.VERIFIED, name
        status, results = recheck(roundtrip(c))
        assert status == cert.VERIFIED, (name, [d for d, ok in results if not ok])


def test_any_single_bit_flip_is_caught(samples):
    for name, c in samples.items():
        doc = roundtrip(c)
        leaves = list(int_leaves(doc["witness"]))
        step = max(1, len(leaves) // 40)
        for path in leaves[::step]:
            assert recheck(flip(doc, path, rehash=False))[0] == cert.MISMATCH, (name, path)


# witness entries every replay re-derives from scratch, so a flip fails even with a fresh digest
SEMANTIC = {
    "order-p": ["beta", "m_minus_norm"],
    "bs-equal": ["w", "delta", "cayley"],
    "bs-power": ["cocycle"],
    "decompose": ["theta", "theta_bar", "pair", "w"],
    "ber-nul structured": ["x", "eta", "w_A", "v"],
    "ber-nul bruteforce": ["x"],
    "cup-length": ["product"],
    "cup-length cokernel": ["product"],
    "essential": ["image"],
    "essential product": ["image"],
    "bezout": ["k", "l"],
    "olum yes": ["a0"],
}


def test_semantic_corruption_is_caught(samples):
    for name, keys in SEMANTIC.items():
        doc = roundtrip(samples[name])
        for key in keys:
            leaves = list(int_leaves(doc["witness"][key], (key,)))
            assert leaves, (name, key)
            for path in leaves[:: max(1, len(leaves) // 10)]:
                status, results = recheck(flip(doc, path, rehash=True))
                assert status == cert.MISMATCH, (name, path)
                assert results[0] == ("witness digest matches", True)


def test_status_other_than_verified_is_not_rechecked(samples):
    doc = roundtrip(samples["bezout"])
    doc["status"] = cert.REFUTED
    assert recheck(doc)[0] == cert.MISMATCH


def test_malformed_witness_is_a_mismatch(samples):
    doc = roundtrip(samples["bs-power"])
    del doc["witness"]["functional"]
    doc["digest"] = cert.digest(doc["witness"])
    status, results = recheck(doc)
    assert status == cert.MISMATCH
    assert any("well formed" in d for d, _ in results)


def test_encode_and_digest():
    enc = cert.encode({"a": 2**80, "b": [1, -2], "c": True, "d": "x"})
    assert enc == {"a": str(2**80), "b": ["1", "-2"], "c": True, "d": "x"}
    assert cert.decode_ints(enc["b"]) == [1, -2]
    assert cert.digest({"b": 1, "a": 2}) == cert.digest({"a": 2, "b": 1})


def test_schema_validation(tmp_path, samples):
    c = samples["bezout"]
    path = tmp_path / "c.json"
    c.save(str(path))
    doc = cert.load(str(path))
    assert doc["statement_id"] == "bezout"
    assert doc["versions"]["schema"] == cert.SCHEMA
    assert cert.load(c.to_json())["digest"] == doc["digest"]
    for broken in ["[]", "{}", "not json", json.dumps(dict(doc, schema="other/9")),
                   json.dumps(dict(doc, status="MAYBE"))]:
        with pytest.raises(cert.SchemaError):
            cert.load(broken)
    with pytest.raises(cert.SchemaError):
        recheck(dict(doc, statement_id="nonsense"))
