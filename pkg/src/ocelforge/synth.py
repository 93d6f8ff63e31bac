"""Seeded generator for a desk-scale purchase-to-pay snapshot.

Every order runs requisition (every fourth order) -> order with 1..k items
-> goods receipt -> invoice (split in two when the order index is divisible
by five and it has at least two items) -> payment, plus one material
reservation. Change documents appear at ``change_rate`` per item; a
document-flow fixture is emitted when ``flow_chains`` > 0.

Identical (seed, spec) produce byte-identical directories; the manifest
records the ground truth each test asserts against. Item numbers are
globally unique on purpose: a shared "00010" item value would weld all
orders together once items become objects.
"""

from __future__ import annotations

import csv
import json
import random
from dataclasses import dataclass
from datetime import date, timedelta
from pathlib import Path

DEFAULT_CLIENT = "800"
DEFAULT_YEAR = 2021

_DOMAINS: tuple[tuple[str, str, str], ...] = (
    ("AWKEY", "CODE", "reference key of the originating document"),
    ("BANFN", "CODE", "purchase requisition number"),
    ("BDMNG", "NUM", "requirement quantity"),
    ("BELNR_D", "CODE", "accounting document number"),
    ("BUZEI", "NUM", "document line number"),
    ("BWART", "CODE", "movement type"),
    ("CHANGENR", "CODE", "change document number"),
    ("DATUM", "DATE", "calendar day"),
    ("EBELN", "CODE", "purchasing document number"),
    ("EBELP", "CODE", "purchasing document item"),
    ("ETENR", "NUM", "schedule line number"),
    ("FNAME", "TEXT", "changed field name"),
    ("GJAHR", "NUM", "fiscal year"),
    ("INFNR", "CODE", "purchasing info record"),
    ("LIFNR", "CODE", "vendor account number"),
    ("MANDT", "CODE", "client"),
    ("MATNR", "CODE", "material number"),
    ("MENGE", "NUM", "quantity"),
    ("NETPR", "NUM", "net price"),
    ("NETWR", "NUM", "net order value"),
    ("OBJECTCLAS", "CODE", "change object class"),
    ("OBJECTID", "CODE", "changed object id"),
    ("PARVW", "CODE", "partner function"),
    ("RE_BELNR", "CODE", "invoice document number"),
    ("RSNUM", "CODE", "reservation number"),
    ("RSPOS", "NUM", "reservation item"),
    ("TABNAME", "TEXT", "changed table name"),
    ("TCODE", "CODE", "transaction code"),
    ("TEXT40", "TEXT", "forty-character text"),
    ("USNAM", "TEXT", "user name"),
    ("UZEIT", "TIME", "time of day"),
    ("VBELN", "CODE", "sales and distribution document number"),
    ("VBTYP", "CODE", "sales document category"),
    ("WRBTR", "NUM", "amount in document currency"),
)

# (field, domain, is key) per table, in column order.
_TABLES: dict[str, tuple[tuple[str, str, bool], ...]] = {
    "EBAN": (
        ("MANDT", "MANDT", True),
        ("BANFN", "BANFN", True),
        ("MATNR", "MATNR", False),
        ("MENGE", "MENGE", False),
        ("BADAT", "DATUM", False),
        ("ERNAM", "USNAM", False),
    ),
    "EKKO": (
        ("MANDT", "MANDT", True),
        ("EBELN", "EBELN", True),
        ("LIFNR", "LIFNR", False),
        ("AEDAT", "DATUM", False),
        ("NETWR", "NETWR", False),
        ("ERNAM", "USNAM", False),
    ),
    "EKPO": (
        ("MANDT", "MANDT", True),
        ("EBELN", "EBELN", True),
        ("EBELP", "EBELP", True),
        ("MATNR", "MATNR", False),
        ("BANFN", "BANFN", False),
        ("INFNR", "INFNR", False),
        ("MENGE", "MENGE", False),
        ("NETPR", "NETPR", False),
        ("AEDAT", "DATUM", False),
    ),
    "EKPA": (
        ("MANDT", "MANDT", True),
        ("EBELN", "EBELN", True),
        ("PARVW", "PARVW", True),
        ("ERNAM", "USNAM", False),
    ),
    "EKET": (
        ("MANDT", "MANDT", True),
        ("EBELN", "EBELN", True),
        ("EBELP", "EBELP", True),
        ("ETENR", "ETENR", True),
        ("EINDT", "DATUM", False),
        ("MENGE", "MENGE", False),
    ),
    "EKBE": (
        ("MANDT", "MANDT", True),
        ("EBELN", "EBELN", True),
        ("EBELP", "EBELP", True),
        ("ZEKKN", "BUZEI", True),
        ("BUDAT", "DATUM", False),
        ("MENGE", "MENGE", False),
        ("BELNR", "RE_BELNR", False),
        ("GJAHR", "GJAHR", False),
        ("CPUDT", "DATUM", False),
    ),
    "RBKP": (
        ("MANDT", "MANDT", True),
        ("BELNR", "RE_BELNR", True),
        ("GJAHR", "GJAHR", True),
        ("BLDAT", "DATUM", False),
        ("BUDAT", "DATUM", False),
        ("CPUDT", "DATUM", False),
        ("CPUTM", "UZEIT", False),
        ("TCODE", "TCODE", False),
        ("LIFNR", "LIFNR", False),
    ),
    "RSEG": (
        ("MANDT", "MANDT", True),
        ("BELNR", "RE_BELNR", True),
        ("GJAHR", "GJAHR", True),
        ("BUZEI", "BUZEI", True),
        ("EBELN", "EBELN", False),
        ("EBELP", "EBELP", False),
        ("WRBTR", "WRBTR", False),
    ),
    "BKPF": (
        ("MANDT", "MANDT", True),
        ("BELNR", "BELNR_D", True),
        ("GJAHR", "GJAHR", True),
        ("BUDAT", "DATUM", False),
        ("CPUDT", "DATUM", False),
        ("CPUTM", "UZEIT", False),
        ("TCODE", "TCODE", False),
        ("AWKEY", "AWKEY", False),
    ),
    "BSEG": (
        ("MANDT", "MANDT", True),
        ("BELNR", "BELNR_D", True),
        ("GJAHR", "GJAHR", True),
        ("BUZEI", "BUZEI", True),
        ("EBELN", "EBELN", False),
        ("EBELP", "EBELP", False),
        ("WRBTR", "WRBTR", False),
    ),
    "RKPF": (
        ("MANDT", "MANDT", True),
        ("RSNUM", "RSNUM", True),
        ("BWART", "BWART", False),
        ("RSDAT", "DATUM", False),
        ("USNAM", "USNAM", False),
    ),
    "RESB": (
        ("MANDT", "MANDT", True),
        ("RSNUM", "RSNUM", True),
        ("RSPOS", "RSPOS", True),
        ("MATNR", "MATNR", False),
        ("EBELN", "EBELN", False),
        ("BDTER", "DATUM", False),
        ("BDMNG", "BDMNG", False),
    ),
    "CDHDR": (
        ("MANDT", "MANDT", True),
        ("OBJECTCLAS", "OBJECTCLAS", True),
        ("OBJECTID", "OBJECTID", True),
        ("CHANGENR", "CHANGENR", True),
        ("USERNAME", "USNAM", False),
        ("UDATE", "DATUM", False),
        ("UTIME", "UZEIT", False),
        ("TCODE", "TCODE", False),
    ),
    "CDPOS": (
        ("MANDT", "MANDT", True),
        ("OBJECTCLAS", "OBJECTCLAS", True),
        ("OBJECTID", "OBJECTID", True),
        ("CHANGENR", "CHANGENR", True),
        ("TABNAME", "TABNAME", True),
        ("FNAME", "FNAME", True),
        ("VALUE_OLD", "TEXT40", False),
        ("VALUE_NEW", "TEXT40", False),
    ),
    "VBFA": (
        ("MANDT", "MANDT", True),
        ("VBELV", "VBELN", True),
        ("VBELN", "VBELN", True),
        ("VBTYP_N", "VBTYP", False),
        ("VBTYP_V", "VBTYP", False),
        ("ERDAT", "DATUM", False),
    ),
}

P2P_TABLES = (
    "BKPF",
    "BSEG",
    "EBAN",
    "EKBE",
    "EKET",
    "EKKO",
    "EKPA",
    "EKPO",
    "RBKP",
    "RESB",
    "RKPF",
    "RSEG",
)

TCODE_TEXTS = (
    ("F-28", "Enter incoming payment"),
    ("F-53", "Enter outgoing payment"),
    ("ME21N", "Create Purchase Order"),
    ("ME22N", "Change Purchase Order"),
    ("MIRO", "Enter incoming invoice"),
)

DOCTYPE_TEXTS = (("C", "Order"), ("J", "Delivery"), ("M", "Invoice"))


@dataclass(frozen=True)
class GenSpec:
    seed: int = 42
    n_orders: int = 50
    items_min: int = 1
    items_max: int = 3
    change_rate: float = 0.0
    flow_chains: int = 0
    fiscal_years: frozenset[int] = frozenset({DEFAULT_YEAR})
    clients: frozenset[str] = frozenset({DEFAULT_CLIENT})

    def __post_init__(self) -> None:
        if self.n_orders < 1:
            raise ValueError("n_orders must be positive")
        if not 1 <= self.items_min <= self.items_max:
            raise ValueError("need 1 <= items_min <= items_max")
        if not 0.0 <= self.change_rate <= 1.0:
            raise ValueError("change_rate must be within [0, 1]")
        if self.flow_chains < 0:
            raise ValueError("flow_chains must not be negative")
        if not self.fiscal_years or not self.clients:
            raise ValueError("fiscal_years and clients must be non-empty")
        object.__setattr__(self, "fiscal_years", frozenset(self.fiscal_years))
        object.__setattr__(self, "clients", frozenset(self.clients))

    def to_doc(self) -> dict:
        return {
            "seed": self.seed,
            "n_orders": self.n_orders,
            "items_min": self.items_min,
            "items_max": self.items_max,
            "change_rate": self.change_rate,
            "flow_chains": self.flow_chains,
            "fiscal_years": sorted(self.fiscal_years),
            "clients": sorted(self.clients),
        }


def _fmt(day: date) -> str:
    return day.strftime("%Y%m%d")


def _write_csv(path: Path, header: tuple[str, ...], rows: list[list[str]]) -> None:
    with path.open("w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(header)
        writer.writerows(rows)


def _emitted_tables(spec: GenSpec) -> tuple[str, ...]:
    names = list(P2P_TABLES)
    if spec.change_rate > 0:
        names += ["CDHDR", "CDPOS"]
    if spec.flow_chains > 0:
        names.append("VBFA")
    return tuple(sorted(names))


def _write_metadata(out: Path, tables: tuple[str, ...]) -> None:
    domain_rows = [[name, kind, text] for name, kind, text in _DOMAINS]
    _write_csv(out / "dd_domains.csv", ("DOMNAME", "KIND", "DESCRIPTION"), domain_rows)
    field_rows = []
    for table in tables:
        for position, (field, domain, is_key) in enumerate(_TABLES[table], start=1):
            field_rows.append(
                [table, field, domain, "X" if is_key else "", str(position)]
            )
    _write_csv(
        out / "dd_fields.csv",
        ("TABNAME", "FIELDNAME", "DOMNAME", "KEYFLAG", "POSITION"),
        field_rows,
    )


def _clock(rng: random.Random) -> str:
    return f"{rng.randrange(6, 20):02d}{rng.randrange(60):02d}{rng.randrange(60):02d}"


def generate(spec: GenSpec, out_dir: str | Path) -> dict:
    """Write the snapshot into ``out_dir`` and return its manifest."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    rng = random.Random(spec.seed)
    emitted = _emitted_tables(spec)
    rows: dict[str, list[list[str]]] = {name: [] for name in emitted}

    vendors = [f"V{k:04d}" for k in range(1, max(2, spec.n_orders // 10) + 1)]
    materials = [f"MAT{k:05d}" for k in range(1, max(3, spec.n_orders // 3) + 1)]
    users = [f"USER{k:02d}" for k in range(1, 6)]
    years = sorted(spec.fiscal_years)
    clients = sorted(spec.clients)
    banfn_seq = ebelp_seq = invoice_seq = payment_seq = change_seq = 0
    orders_manifest = []
    multi_item_orders = 0

    for i in range(spec.n_orders):
        client = rng.choice(clients)
        year = rng.choice(years)
        order_day = date(year, 1, 2) + timedelta(days=rng.randrange(0, 300))
        vendor = rng.choice(vendors)
        user = rng.choice(users)
        k_items = rng.randint(spec.items_min, spec.items_max)
        if k_items >= 2:
            multi_item_orders += 1
        ebeln = f"45{i + 1:08d}"
        aedat = _fmt(order_day)
        requisitioned = i % 4 == 0

        items = []
        total_cents = 0
        for j in range(k_items):
            ebelp_seq += 1
            ebelp = f"70{ebelp_seq:08d}"
            material_index = rng.randrange(len(materials))
            matnr = materials[material_index]
            infnr = f"53{material_index + 1:08d}"
            menge = rng.randint(1, 99)
            netpr_cents = rng.randint(100, 99999)
            amount_cents = menge * netpr_cents
            total_cents += amount_cents
            banfn = ""
            if requisitioned:
                banfn_seq += 1
                banfn = f"10{banfn_seq:08d}"
                badat = order_day - timedelta(days=rng.randint(1, 5))
                rows["EBAN"].append(
                    [client, banfn, matnr, str(menge), _fmt(badat), user]
                )
            eindt = order_day + timedelta(days=rng.randint(7, 30))
            rows["EKPO"].append(
                [
                    client,
                    ebeln,
                    ebelp,
                    matnr,
                    banfn,
                    infnr,
                    str(menge),
                    f"{netpr_cents / 100:.2f}",
                    aedat,
                ]
            )
            rows["EKET"].append(
                [client, ebeln, ebelp, "1", _fmt(eindt), str(menge)]
            )
            items.append(
                {
                    "ebelp": ebelp,
                    "matnr": matnr,
                    "banfn": banfn,
                    "menge": str(menge),
                    "netpr": f"{netpr_cents / 100:.2f}",
                    "amount": f"{amount_cents / 100:.2f}",
                    "eindt": eindt,
                    "netpr_cents": netpr_cents,
                    "changed": False,
                }
            )

        rows["EKKO"].append(
            [client, ebeln, vendor, aedat, f"{total_cents / 100:.2f}", user]
        )
        rows["EKPA"].append([client, ebeln, "VN", user])

        change_numbers = []
        if spec.change_rate > 0:
            for item in items:
                if rng.random() >= spec.change_rate:
                    continue
                item["changed"] = True
                change_seq += 1
                changenr = f"{change_seq:010d}"
                change_numbers.append(changenr)
                udate = order_day + timedelta(days=rng.randint(1, 4))
                rows["CDHDR"].append(
                    [
                        client,
                        "EINKBELEG",
                        ebeln,
                        changenr,
                        rng.choice(users),
                        _fmt(udate),
                        _clock(rng),
                        "ME22N",
                    ]
                )
                old_eindt = item["eindt"]
                new_eindt = old_eindt + timedelta(days=rng.randint(3, 10))
                rows["CDPOS"].append(
                    [
                        client,
                        "EINKBELEG",
                        ebeln,
                        changenr,
                        "EKET",
                        "EINDT",
                        _fmt(old_eindt),
                        _fmt(new_eindt),
                    ]
                )
                if rng.random() < 0.5:
                    new_cents = item["netpr_cents"] + rng.randint(50, 500)
                    rows["CDPOS"].append(
                        [
                            client,
                            "EINKBELEG",
                            ebeln,
                            changenr,
                            "EKPO",
                            "NETPR",
                            item["netpr"],
                            f"{new_cents / 100:.2f}",
                        ]
                    )

        receipt_day = order_day + timedelta(days=rng.randint(5, 20))
        split = i % 5 == 0 and k_items >= 2
        groups = [items[:1], items[1:]] if split else [items]
        invoices_manifest = []
        for group in groups:
            invoice_seq += 1
            invoice = f"51{invoice_seq:08d}"
            bldat = receipt_day + timedelta(days=rng.randint(1, 5))
            cpudt = bldat + timedelta(days=rng.randint(0, 2))
            rows["RBKP"].append(
                [
                    client,
                    invoice,
                    str(year),
                    _fmt(bldat),
                    _fmt(bldat),
                    _fmt(cpudt),
                    _clock(rng),
                    "MIRO",
                    vendor,
                ]
            )
            for buzei, item in enumerate(group, start=1):
                rows["RSEG"].append(
                    [
                        client,
                        invoice,
                        str(year),
                        str(buzei),
                        ebeln,
                        item["ebelp"],
                        item["amount"],
                    ]
                )
            for item in group:
                rows["EKBE"].append(
                    [
                        client,
                        ebeln,
                        item["ebelp"],
                        "1",
                        _fmt(receipt_day),
                        item["menge"],
                        invoice,
                        str(year),
                        _fmt(receipt_day),
                    ]
                )
            payment_seq += 1
            payment = f"14{payment_seq:08d}"
            pay_day = bldat + timedelta(days=rng.randint(5, 30))
            tcode = "F-28" if rng.random() < 0.15 else "F-53"
            rows["BKPF"].append(
                [
                    client,
                    payment,
                    str(year),
                    _fmt(pay_day),
                    _fmt(pay_day),
                    _clock(rng),
                    tcode,
                    f"{invoice}{year}",
                ]
            )
            for buzei, item in enumerate(group, start=1):
                rows["BSEG"].append(
                    [
                        client,
                        payment,
                        str(year),
                        str(buzei),
                        ebeln,
                        item["ebelp"],
                        item["amount"],
                    ]
                )
            invoices_manifest.append(
                {
                    "belnr": invoice,
                    "items": [item["ebelp"] for item in group],
                    "payment": payment,
                }
            )

        rsnum = f"90{i + 1:08d}"
        rows["RKPF"].append(
            [client, rsnum, "201", _fmt(order_day + timedelta(days=rng.randint(0, 3))), rng.choice(users)]
        )
        for pos, item in enumerate(items, start=1):
            rows["RESB"].append(
                [
                    client,
                    rsnum,
                    str(pos),
                    item["matnr"],
                    ebeln,
                    _fmt(order_day + timedelta(days=rng.randint(5, 15))),
                    item["menge"],
                ]
            )

        orders_manifest.append(
            {
                "ebeln": ebeln,
                "client": client,
                "fiscal_year": year,
                "order_date": order_day.isoformat(),
                "vendor": vendor,
                "requisitioned": requisitioned,
                "items": [
                    {
                        "ebelp": item["ebelp"],
                        "matnr": item["matnr"],
                        "banfn": item["banfn"],
                        "menge": item["menge"],
                        "netpr": item["netpr"],
                        "changed": item["changed"],
                    }
                    for item in items
                ],
                "invoices": invoices_manifest,
                "reservation": rsnum,
                "change_numbers": change_numbers,
            }
        )

    flows_manifest = []
    for c in range(spec.flow_chains):
        start_day = date(years[0], 1, 2) + timedelta(days=rng.randrange(0, 300))
        sales_order = f"30{c + 1:08d}"
        delivery = f"80{c + 1:08d}"
        invoice = f"91{c + 1:08d}"
        client = rng.choice(clients)
        rows["VBFA"].append(
            [client, "", sales_order, "C", "", _fmt(start_day)]
        )
        rows["VBFA"].append(
            [client, sales_order, delivery, "J", "C", _fmt(start_day + timedelta(days=2))]
        )
        rows["VBFA"].append(
            [client, delivery, invoice, "M", "J", _fmt(start_day + timedelta(days=4))]
        )
        flows_manifest.append(
            {"sales_order": sales_order, "delivery": delivery, "invoice": invoice}
        )

    _write_metadata(out, emitted)
    for table in emitted:
        header = tuple(field for field, _, _ in _TABLES[table])
        _write_csv(out / f"{table}.csv", header, rows[table])
    _write_csv(out / "tstct.csv", ("TCODE", "TTEXT"), [list(r) for r in TCODE_TEXTS])
    if spec.flow_chains > 0:
        _write_csv(
            out / "doctypes.csv", ("CODE", "TEXT"), [list(r) for r in DOCTYPE_TEXTS]
        )

    manifest = {
        "spec": spec.to_doc(),
        "tables": {name: len(rows[name]) for name in emitted},
        "orders": orders_manifest,
        "orders_with_multiple_items": multi_item_orders,
        "flows": flows_manifest,
    }
    (out / "manifest.json").write_text(
        json.dumps(manifest, indent=2, sort_keys=True) + "\n", encoding="utf-8"
    )
    return manifest
