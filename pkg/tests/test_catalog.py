"""Catalog loading, builtin pairs, and hypothesis validation."""

import json

import pytest

from octqft.catalog import (CatalogError, GroupPresentation, PairDatum,
                            builtin_pair, builtin_pairs, load_catalog,
                            validate_pair)
from octqft.field import PrimeField


@pytest.fixture(scope="module")
def builtins():
    return {p.name: p for p in builtin_pairs()}


EXPECTED_NAMES = {
    "U2_T2", "U3_T3", "U4_T4", "U3_U1xU2", "U4_U1xU3", "U4_U2xU2",
    "SP1_T1", "SP2_T2", "SO3_SO2", "SO5_SO4",
    "U2_U2", "U3_U3", "U4_U4", "SP1_SP1", "SP2_SP2", "SO3_SO3", "SO5_SO5",
}


class TestBuiltins:
    def test_shipped_pairs_present(self, builtins):
        assert EXPECTED_NAMES <= set(builtins)

    def test_u2_t2_restriction(self, builtins):
        pair = builtins["U2_T2"]
        x1 = pair.x_ring.variable("x1")
        x2 = pair.x_ring.variable("x2")
        assert str(pair.restriction[x1]) == "u1 + u2"
        assert str(pair.restriction[x2]) == "u1*u2"

    def test_identity_pair_restriction(self, builtins):
        pair = builtins["U2_U2"]
        for xv in pair.x_ring.variables:
            assert str(pair.restriction[xv]) == xv.name

    def test_whitney_restriction(self, builtins):
        pair = builtins["U3_U1xU2"]
        x2 = pair.x_ring.variable("x2")
        assert str(pair.restriction[x2]) == "a*b1 + b2"

    def test_every_builtin_validates_over_q(self, builtins):
        for pair in builtins.values():
            report = validate_pair(pair)
            assert report.ok, f"{pair.name}: {report.summary()}"

    @pytest.mark.parametrize("name,expected", [
        ("U2_T2", 2), ("U3_T3", 6), ("U3_U1xU2", 3), ("SP2_T2", 8),
        ("U4_T4", 24), ("U4_U1xU3", 4), ("U4_U2xU2", 6),
    ])
    def test_weyl_quotient_dimensions(self, builtins, name, expected):
        pair = builtins[name]
        assert pair.restriction_quotient().total_dimension() == expected
        assert expected == pair.group.weyl_order // pair.subgroup.weyl_order

    def test_restriction_degree_preserving(self, builtins):
        for pair in builtins.values():
            for xv, img in pair.restriction.items():
                assert img.is_homogeneous() and img.degree() == xv.degree


class TestSchema:
    def test_builtin_data_matches_shipped_schema(self):
        from importlib import resources
        from pathlib import Path
        import jsonschema
        data = json.loads(resources.files("octqft")
                          .joinpath("data/builtin_pairs.json").read_text())
        schema_path = Path(__file__).resolve().parent.parent / "docs" / \
            "catalog.schema.json"
        jsonschema.validate(data, json.loads(schema_path.read_text()))


class TestLoading:
    def test_load_roundtrip(self, tmp_path, builtins):
        path = tmp_path / "cat.json"
        payload = {"pairs": [{
            "name": "CUSTOM",
            "field": "Q",
            "group": {"name": "U2", "generators": [
                {"name": "x1", "degree": 2}, {"name": "x2", "degree": 4}]},
            "subgroup": {"name": "T2", "generators": [
                {"name": "u1", "degree": 2}, {"name": "u2", "degree": 2}]},
            "restriction": {"x1": "u1 + u2", "x2": "u1*u2"},
            "torsion_free_asserted": True,
        }]}
        path.write_text(json.dumps(payload))
        pairs = load_catalog(path)
        assert len(pairs) == 1 and pairs[0].name == "CUSTOM"
        assert validate_pair(pairs[0]).ok

    def test_empty_catalog(self, tmp_path):
        path = tmp_path / "empty.json"
        path.write_text('{"pairs": []}')
        assert load_catalog(path) == []

    def test_odd_degree_rejected_with_name(self):
        with pytest.raises(CatalogError) as err:
            GroupPresentation("BAD", (("x1", 3),))
        assert "x1" in str(err.value)

    def test_missing_restriction_named(self):
        group = GroupPresentation("U2", (("x1", 2), ("x2", 4)))
        sub = GroupPresentation("T2", (("u1", 2), ("u2", 2)))
        with pytest.raises(CatalogError) as err:
            PairDatum("P", group, sub, {"x1": "u1 + u2"})
        assert "x2" in str(err.value)

    def test_malformed_json_diagnostics(self, tmp_path):
        path = tmp_path / "bad.json"
        path.write_text('{"pairs": [{"name": "X"}]}')
        with pytest.raises(CatalogError):
            load_catalog(path)

    def test_fp_field_entry(self, tmp_path):
        path = tmp_path / "fp.json"
        payload = {"pairs": [{
            "name": "FP5",
            "field": {"Fp": 5},
            "group": {"name": "U2", "generators": [
                {"name": "x1", "degree": 2}, {"name": "x2", "degree": 4}]},
            "subgroup": {"name": "T2", "generators": [
                {"name": "u1", "degree": 2}, {"name": "u2", "degree": 2}]},
            "restriction": {"x1": "u1 + u2", "x2": "u1*u2"},
            "torsion_free_asserted": True,
        }]}
        path.write_text(json.dumps(payload))
        (pair,) = load_catalog(path)
        assert isinstance(pair.field, PrimeField) and pair.field.p == 5


class TestValidation:
    def test_broken_pair_unbounded_quotient(self):
        # x1 -> u1, x2 -> u1^2 never bounds u2
        group = GroupPresentation("U2", (("x1", 2), ("x2", 4)))
        sub = GroupPresentation("T2", (("u1", 2), ("u2", 2)))
        pair = PairDatum("BROKEN", group, sub, {"x1": "u1", "x2": "u1^2"})
        report = validate_pair(pair)
        assert not report.ok
        assert not report.get("finite_quotient").passed

    def test_rank_mismatch_reported(self):
        group = GroupPresentation("U2", (("x1", 2), ("x2", 4)))
        sub = GroupPresentation("T1", (("u1", 2),))
        pair = PairDatum("RANK", group, sub, {"x1": "u1", "x2": "u1^2"})
        report = validate_pair(pair)
        assert not report.ok and not report.get("rank").passed

    def test_degree_violation_reported(self):
        group = GroupPresentation("U2", (("x1", 2), ("x2", 4)))
        sub = GroupPresentation("T2", (("u1", 2), ("u2", 2)))
        pair = PairDatum("DEG", group, sub, {"x1": "u1^2", "x2": "u1*u2"})
        report = validate_pair(pair)
        assert not report.get("degrees").passed

    def test_f2_coprimality_flagged(self):
        pair = builtin_pair("U2_T2", field=PrimeField(2, allow_even=True))
        report = validate_pair(pair)
        assert report.ok  # mandatory checks hold over F_2
        assert not report.get("fp_coprimality").passed
        assert not report.coprimality_ok

    def test_f5_coprimality_holds(self):
        pair = builtin_pair("U2_T2", field=PrimeField(5))
        report = validate_pair(pair)
        assert report.ok and report.get("fp_coprimality").passed

    def test_weyl_check_present(self):
        pair = builtin_pair("U3_T3")
        report = validate_pair(pair)
        weyl = report.get("weyl_dimension")
        assert weyl is not None and weyl.passed
