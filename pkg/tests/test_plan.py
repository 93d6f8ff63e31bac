import pytest

from ocelforge.catalog import KeyFilter
from ocelforge.classify import classify_all
from ocelforge.errors import (
    EmptyFilterValues,
    FilterFieldNotKey,
    MissingSemanticRules,
    PlanError,
    UncoveredTable,
)
from ocelforge.plan import (
    DEFAULT_OBJECT_BLACKLIST,
    DEFAULT_TIMESTAMP_PRIORITY,
    SemanticChangeRule,
    default_plan,
    filters_for_table,
    key_field_union,
    load_plan,
    plan_from_doc,
    plan_to_doc,
    save_plan,
    validate_plan,
)
from ocelforge.relations import build_gor

from .oracles import key_field_union_oracle


@pytest.fixture()
def plain_plan(plain_catalog):
    gor = build_gor(plain_catalog, "EKKO")
    categories, links = classify_all(plain_catalog, gor)
    return default_plan(plain_catalog, gor, categories, links)


def test_key_field_union_matches_metadata(plain_snapshot, plain_catalog):
    out, _ = plain_snapshot
    gor = build_gor(plain_catalog, "EKKO")
    union = key_field_union(plain_catalog, gor)
    assert dict(union) == key_field_union_oracle(out, gor.nodes)
    fields = [field for field, _ in union]
    assert fields == sorted(fields)


def test_key_field_union_merges_by_field_name(plain_catalog):
    gor = build_gor(plain_catalog, "EKKO")
    union = dict(key_field_union(plain_catalog, gor))
    # BELNR keys both invoice tables and accounting tables; the union is
    # name-based, so they share one entry.
    assert union["BELNR"] == ["BKPF", "BSEG", "RBKP", "RSEG"]
    assert union["EBELN"] == ["EKBE", "EKET", "EKKO", "EKPA", "EKPO"]


def test_default_plan_covers_every_node(plain_plan):
    assert set(plain_plan.categories) == set(plain_plan.gor.nodes)
    assert plain_plan.change_strategy == "tcode"
    assert plain_plan.timestamp_priority == DEFAULT_TIMESTAMP_PRIORITY
    assert plain_plan.object_blacklist == DEFAULT_OBJECT_BLACKLIST


def test_missing_category_fails_validation(plain_catalog, plain_plan):
    import dataclasses

    categories = dict(plain_plan.categories)
    categories.pop("EKPO")
    broken = dataclasses.replace(plain_plan, categories=categories)
    with pytest.raises(UncoveredTable):
        validate_plan(broken, plain_catalog)


def test_unknown_change_strategy_rejected(plain_catalog, plain_plan):
    import dataclasses

    broken = dataclasses.replace(plain_plan, change_strategy="guess")
    with pytest.raises(PlanError):
        validate_plan(broken, plain_catalog)


def test_semantic_strategy_needs_rules(plain_catalog, plain_plan):
    import dataclasses

    broken = dataclasses.replace(plain_plan, change_strategy="semantic")
    with pytest.raises(MissingSemanticRules):
        validate_plan(broken, plain_catalog)
    rule = SemanticChangeRule("EKET", "EINDT", "increased", "Postpone Delivery")
    fine = dataclasses.replace(
        plain_plan, change_strategy="semantic", semantic_rules=(rule,)
    )
    validate_plan(fine, plain_catalog)


def test_filter_must_name_a_key_field(plain_catalog, plain_plan):
    import dataclasses

    broken = dataclasses.replace(
        plain_plan, filters=(KeyFilter("MATNR", {"MAT00001"}),)
    )
    with pytest.raises(FilterFieldNotKey):
        validate_plan(broken, plain_catalog)


def test_empty_filter_values_rejected(plain_catalog, plain_plan):
    import dataclasses

    broken = dataclasses.replace(plain_plan, filters=(KeyFilter("GJAHR", ()),))
    with pytest.raises(EmptyFilterValues):
        validate_plan(broken, plain_catalog)


def test_filters_restrict_only_tables_keyed_on_the_field(plain_catalog, plain_plan):
    gjahr = KeyFilter("GJAHR", {"2021"})
    assert filters_for_table(plain_catalog, (gjahr,), "RBKP") == (gjahr,)
    assert filters_for_table(plain_catalog, (gjahr,), "BKPF") == (gjahr,)
    # EKKO carries no GJAHR anywhere, EKBE carries none in its key: the
    # year filter deliberately leaks past both.
    assert filters_for_table(plain_catalog, (gjahr,), "EKKO") == ()
    assert filters_for_table(plain_catalog, (gjahr,), "EKBE") == ()


def test_semantic_rule_validates_its_parts():
    with pytest.raises(PlanError):
        SemanticChangeRule("EKET", "EINDT", "grew", "Postpone Delivery")
    with pytest.raises(PlanError):
        SemanticChangeRule("EKET", "EINDT", "increased", "")


def test_plan_doc_round_trip(plain_catalog, plain_plan):
    import dataclasses

    plan = dataclasses.replace(
        plain_plan,
        filters=(KeyFilter("GJAHR", {"2021", "2022"}),),
        change_strategy="semantic",
        semantic_rules=(
            SemanticChangeRule("EKET", "EINDT", "increased", "Postpone Delivery"),
        ),
        transitive_links=True,
    )
    doc = plan_to_doc(plan)
    back = plan_from_doc(doc)
    assert back.gor.nodes == plan.gor.nodes
    assert back.filters == plan.filters
    assert back.semantic_rules == plan.semantic_rules
    assert back.change_strategy == plan.change_strategy
    assert back.transitive_links is True
    assert {t: c.value for t, c in back.categories.items()} == {
        t: c.value for t, c in plan.categories.items()
    }
    assert back.detail_links == plan.detail_links


def test_plan_file_round_trip(tmp_path, plain_catalog, plain_plan):
    path = tmp_path / "plan.json"
    save_plan(plain_plan, path)
    loaded = load_plan(path, plain_catalog)
    assert loaded.gor.nodes == plain_plan.gor.nodes
    assert loaded.detail_links == plain_plan.detail_links


def test_malformed_plan_doc_raises(tmp_path):
    with pytest.raises(PlanError):
        plan_from_doc({"gor": []})
    path = tmp_path / "plan.json"
    path.write_text("{\"nonsense\": true}")
    with pytest.raises(PlanError):
        load_plan(path)


def test_default_timestamp_priority_shape():
    assert DEFAULT_TIMESTAMP_PRIORITY[0] == ("UDATE", "UTIME")
    assert ("BUDAT",) in DEFAULT_TIMESTAMP_PRIORITY
    assert all(isinstance(entry, tuple) for entry in DEFAULT_TIMESTAMP_PRIORITY)
