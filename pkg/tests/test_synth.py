import filecmp
import json

import pytest

from ocelforge.catalog import load_catalog
from ocelforge.synth import DOCTYPE_TEXTS, GenSpec, P2P_TABLES, TCODE_TEXTS, generate

from .oracles import count_data_rows, read_csv


def test_default_snapshot_emits_the_twelve_base_tables(plain_snapshot):
    out, manifest = plain_snapshot
    assert sorted(manifest["tables"]) == sorted(P2P_TABLES)
    for table in P2P_TABLES:
        assert (out / f"{table}.csv").is_file()
    assert not (out / "CDHDR.csv").exists()
    assert not (out / "VBFA.csv").exists()
    assert (out / "tstct.csv").is_file()
    assert not (out / "doctypes.csv").exists()
    assert (out / "dd_fields.csv").is_file()
    assert (out / "dd_domains.csv").is_file()


def test_change_and_flow_tables_appear_on_demand(rich_snapshot):
    out, manifest = rich_snapshot
    for table in ("CDHDR", "CDPOS", "VBFA"):
        assert table in manifest["tables"]
        assert (out / f"{table}.csv").is_file()
    assert (out / "doctypes.csv").is_file()


def test_manifest_row_counts_match_the_files(rich_snapshot):
    out, manifest = rich_snapshot
    for table, expected in manifest["tables"].items():
        assert count_data_rows(out / f"{table}.csv") == expected


def test_row_count_arithmetic(plain_snapshot):
    _, manifest = plain_snapshot
    orders = manifest["orders"]
    n = len(orders)
    items = sum(len(o["items"]) for o in orders)
    invoices = sum(len(o["invoices"]) for o in orders)
    tables = manifest["tables"]
    assert n == manifest["spec"]["n_orders"]
    assert tables["EKKO"] == n
    assert tables["EKPA"] == n
    assert tables["RKPF"] == n
    assert tables["EKPO"] == items
    assert tables["EKET"] == items
    assert tables["RESB"] == items
    assert tables["RSEG"] == items
    assert tables["BSEG"] == items
    assert tables["EKBE"] == items
    assert tables["RBKP"] == invoices
    assert tables["BKPF"] == invoices
    requisitioned_items = sum(
        len(o["items"]) for o in orders if o["requisitioned"]
    )
    assert tables["EBAN"] == requisitioned_items


def test_every_fourth_order_is_requisitioned(plain_snapshot):
    _, manifest = plain_snapshot
    flags = [o["requisitioned"] for o in manifest["orders"]]
    assert flags == [i % 4 == 0 for i in range(len(flags))]


def test_every_fifth_multi_item_order_splits_its_invoice(plain_snapshot):
    _, manifest = plain_snapshot
    for i, order in enumerate(manifest["orders"]):
        k = len(order["items"])
        if i % 5 == 0 and k >= 2:
            assert len(order["invoices"]) == 2
            assert len(order["invoices"][0]["items"]) == 1
        else:
            assert len(order["invoices"]) == 1
        covered = [e for inv in order["invoices"] for e in inv["items"]]
        assert covered == [item["ebelp"] for item in order["items"]]


def test_multi_item_counter_matches_orders(plain_snapshot):
    _, manifest = plain_snapshot
    by_hand = sum(1 for o in manifest["orders"] if len(o["items"]) >= 2)
    assert manifest["orders_with_multiple_items"] == by_hand


def test_same_spec_regenerates_byte_identical_files(tmp_path):
    spec = GenSpec(seed=7, n_orders=12, change_rate=0.5, flow_chains=2)
    first = tmp_path / "a"
    second = tmp_path / "b"
    m1 = generate(spec, first)
    m2 = generate(spec, second)
    assert m1 == m2
    names = sorted(p.name for p in first.iterdir())
    assert names == sorted(p.name for p in second.iterdir())
    match, mismatch, errors = filecmp.cmpfiles(first, second, names, shallow=False)
    assert mismatch == [] and errors == []


def test_different_seed_changes_the_data(tmp_path):
    a = generate(GenSpec(seed=1, n_orders=10), tmp_path / "a")
    b = generate(GenSpec(seed=2, n_orders=10), tmp_path / "b")
    assert a["orders"] != b["orders"]


def test_full_change_rate_touches_every_item(tmp_path):
    out = tmp_path / "snap"
    manifest = generate(GenSpec(seed=3, n_orders=10, change_rate=1.0), out)
    items = sum(len(o["items"]) for o in manifest["orders"])
    assert manifest["tables"]["CDHDR"] == items
    assert items <= manifest["tables"]["CDPOS"] <= 2 * items
    for order in manifest["orders"]:
        assert all(item["changed"] for item in order["items"])
        assert len(order["change_numbers"]) == len(order["items"])
    header, rows = read_csv(out / "CDPOS.csv")
    assert set(header) == {
        "MANDT",
        "OBJECTCLAS",
        "OBJECTID",
        "CHANGENR",
        "TABNAME",
        "FNAME",
        "VALUE_OLD",
        "VALUE_NEW",
    }
    fname = header.index("FNAME")
    assert {row[fname] for row in rows} <= {"EINDT", "NETPR"}


def test_flow_chains_write_three_rows_each(tmp_path):
    out = tmp_path / "snap"
    manifest = generate(GenSpec(seed=4, n_orders=2, flow_chains=3), out)
    assert manifest["tables"]["VBFA"] == 9
    assert len(manifest["flows"]) == 3
    header, rows = read_csv(out / "VBFA.csv")
    n_col = header.index("VBTYP_N")
    v_col = header.index("VBELV")
    assert [row[n_col] for row in rows] == ["C", "J", "M"] * 3
    # the head of each chain has no predecessor
    assert [row[v_col] for row in rows[::3]] == ["", "", ""]


def test_snapshot_loads_as_a_catalog(rich_snapshot):
    out, manifest = rich_snapshot
    catalog = load_catalog(out)
    assert set(manifest["tables"]) <= set(catalog.tables)
    for table, expected in manifest["tables"].items():
        assert catalog.table(table).row_count == expected


def test_lookup_files_have_fixed_contents(plain_snapshot, tmp_path):
    out, _ = plain_snapshot
    header, rows = read_csv(out / "tstct.csv")
    assert header == ["TCODE", "TTEXT"]
    assert [tuple(r) for r in rows] == list(TCODE_TEXTS)
    flows = tmp_path / "flows"
    generate(GenSpec(seed=5, n_orders=1, flow_chains=1), flows)
    header, rows = read_csv(flows / "doctypes.csv")
    assert header == ["CODE", "TEXT"]
    assert [tuple(r) for r in rows] == list(DOCTYPE_TEXTS)


def test_lookups_never_enter_the_table_metadata(rich_snapshot):
    out, _ = rich_snapshot
    catalog = load_catalog(out)
    assert "TSTCT" not in catalog.tables
    assert "tstct" not in catalog.tables
    assert "DOCTYPES" not in catalog.tables


def test_clients_and_years_flow_into_the_rows(tmp_path):
    out = tmp_path / "snap"
    generate(
        GenSpec(seed=6, n_orders=30, fiscal_years=frozenset({2020, 2021}), clients=frozenset({"800", "900"})),
        out,
    )
    header, rows = read_csv(out / "RBKP.csv")
    clients = {row[header.index("MANDT")] for row in rows}
    years = {row[header.index("GJAHR")] for row in rows}
    assert clients == {"800", "900"}
    assert years == {"2020", "2021"}


@pytest.mark.parametrize(
    "kwargs",
    [
        {"n_orders": 0},
        {"items_min": 0},
        {"items_min": 3, "items_max": 2},
        {"change_rate": 1.5},
        {"change_rate": -0.1},
        {"flow_chains": -1},
        {"fiscal_years": frozenset()},
        {"clients": frozenset()},
    ],
)
def test_spec_validation_rejects_bad_values(kwargs):
    with pytest.raises(ValueError):
        GenSpec(**kwargs)


def test_spec_doc_is_json_friendly():
    spec = GenSpec(seed=9, fiscal_years=frozenset({2021, 2019}), clients=frozenset({"900", "800"}))
    doc = spec.to_doc()
    assert doc["fiscal_years"] == [2019, 2021]
    assert doc["clients"] == ["800", "900"]
    json.dumps(doc)
