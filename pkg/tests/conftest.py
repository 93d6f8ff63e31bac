import json

import pytest

from ocelforge.catalog import load_catalog
from ocelforge.synth import GenSpec, generate


@pytest.fixture(scope="session")
def plain_snapshot(tmp_path_factory):
    """Default generator output: the 12 purchase-to-pay tables, no changes,
    no flow chains."""
    out = tmp_path_factory.mktemp("plain")
    manifest = generate(GenSpec(), out)
    return out, manifest


@pytest.fixture(scope="session")
def rich_snapshot(tmp_path_factory):
    """Snapshot with change documents and flow chains on top of the base
    process, for the change/flow extractors."""
    out = tmp_path_factory.mktemp("rich")
    manifest = generate(GenSpec(seed=42, change_rate=0.3, flow_chains=4), out)
    return out, manifest


@pytest.fixture(scope="session")
def tiny_snapshot(tmp_path_factory):
    """One order, one item: every document table holds exactly one row."""
    out = tmp_path_factory.mktemp("tiny")
    manifest = generate(GenSpec(n_orders=1, items_min=1, items_max=1), out)
    return out, manifest


@pytest.fixture(scope="session")
def plain_catalog(plain_snapshot):
    return load_catalog(plain_snapshot[0])


@pytest.fixture(scope="session")
def rich_catalog(rich_snapshot):
    return load_catalog(rich_snapshot[0])


@pytest.fixture(scope="session")
def tiny_catalog(tiny_snapshot):
    return load_catalog(tiny_snapshot[0])


def load_manifest(snapshot_dir):
    return json.loads((snapshot_dir / "manifest.json").read_text())
