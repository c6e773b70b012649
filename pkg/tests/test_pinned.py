import pytest

from ternbound import pinned as pn
from ternbound.interval import I


def test_every_constant_has_citation_and_valid_interval():
    table = pn.load()
    assert len(table) > 10
    for k, v in table.items():
        assert v.citation.strip(), k
        assert v.value.lo <= v.value.hi


def test_decimal_endpoints_enclosed_outward():
    v = pn.pinned("eta_plus.l1")
    assert v.hi >= 1.062319 and I("1.062319").hi <= v.hi


def test_unknown_key_and_version(tmp_path):
    with pytest.raises(KeyError):
        pn.pinned("no.such.key")
    p = tmp_path / "c.txt"
    p.write_text("#!version 99\na 0 1 cite\n")
    with pytest.raises(ValueError):
        pn.load(str(p))
    p.write_text("#!version 1\na 0.5 1.5 some citation\n")
    assert pn.pinned("a", path=str(p)).contains(1.0)
    assert pn.pinned("a", citation=True, path=str(p)) == "some citation"
