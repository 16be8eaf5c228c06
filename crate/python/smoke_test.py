#!/usr/bin/env python3
"""Smoke test for the xwalk_py extension module.

Builds the cdylib with cargo, loads it, and exercises the main entry
points end to end. Run from anywhere:

    python3 python/smoke_test.py
"""

import json
import shutil
import subprocess
import sys
import tempfile
from pathlib import Path

REPO = Path(__file__).resolve().parent.parent


def build_module(workdir: Path) -> None:
    subprocess.run(
        ["cargo", "build", "-p", "xwalk-py"], cwd=REPO, check=True
    )
    built = REPO / "target" / "debug" / "libxwalk_py.so"
    if not built.exists():  # macOS
        built = REPO / "target" / "debug" / "libxwalk_py.dylib"
    shutil.copy(built, workdir / "xwalk_py.so")
    sys.path.insert(0, str(workdir))


def main() -> None:
    with tempfile.TemporaryDirectory() as tmp:
        build_module(Path(tmp))
        import xwalk_py

        # schema registry
        schemas = xwalk_py.list_schemas()
        ids = [s[0] for s in schemas]
        assert len(schemas) == 5, schemas
        assert "archaeo-core" in ids and "dc" in ids, ids
        assert "Artefact Title" in xwalk_py.list_elements("archaeo-core")

        # element-level crosswalk
        assert xwalk_py.map_element("archaeo-core", "Artefact Title") == [
            ("title", None)
        ]
        assert xwalk_py.reverse_map("title", None, "lido") == [
            "titleSet/appellationValue"
        ]

        # record transform through the DC pivot
        record = (
            xwalk_py.Record("archaeo-core")
            .add_value("Artefact Title", "Bead necklace")
            .add_value("Artefact Creator", "Unknown artisan")
            .add_value("Artefact Techniques", "knotting")
        )
        out, loss_json, prov_json = xwalk_py.transform(record, "lido")
        loss = json.loads(loss_json)
        assert out.schema == "lido"
        assert out.get_values("titleSet/appellationValue") == ["Bead necklace"]
        assert loss["unmapped"][0]["path"] == ["Artefact Techniques"]
        assert 0 < loss["fidelity"] < 1
        assert len(json.loads(prov_json)) == 2

        # canonical JSON round trip
        assert xwalk_py.Record.from_json(out.to_json()).to_json() == out.to_json()

        # coverage report
        report = json.loads(xwalk_py.coverage_report())
        assert len(report["shared"]) == 6, report["shared"]
        assert "coverage.spatial" in report["shared"]
        assert "Artefact Techniques" in xwalk_py.unique_elements("archaeo-core")
        assert xwalk_py.shared_terms(["archaeo-core", "carare", "lido"]) == sorted(
            report["shared"]
        )

        # LPAP build + validate
        dc = (
            xwalk_py.Record("dc")
            .add_value("identifier", "lang:sora")
            .add_value("description", "languageName: Sora")
            .add_value("description", "linguisticFamily: Austroasiatic, Munda")
        )
        lpap = json.loads(xwalk_py.lpap_from_dc(dc))
        assert lpap["languageName"] == "Sora"
        assert lpap["linguisticFamily"] == ["Austroasiatic", "Munda"]

        lpap["rights"] = "CC-BY"
        lpap["source"] = ["field survey"]
        fair = json.loads(xwalk_py.lpap_validate(json.dumps(lpap)))
        assert fair["overall"] is True, fair

        back = xwalk_py.lpap_to_dc(json.dumps(lpap))
        assert back.schema == "dc"
        assert back.get_values("identifier") == ["lang:sora"]
        assert "<dc:identifier>lang:sora</dc:identifier>" in back.to_oai_dc()

        # directory ingestion
        records = Path(tmp) / "records"
        records.mkdir()
        (records / "one.json").write_text(out.to_json())
        (records / "two.txt").write_text("not a record")
        outcomes = xwalk_py.ingest_dir(str(records), "lido")
        assert [(n, s) for n, s, _ in outcomes] == [
            ("one.json", "record"),
            ("two.txt", "skipped"),
        ], outcomes

    print("smoke test passed")


if __name__ == "__main__":
    main()
