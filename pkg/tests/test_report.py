import csv

from triplex import catalog, report


def _rows(path):
    with open(path) as fh:
        return list(csv.reader(fh, delimiter="\t"))


def test_spectrum_report(tmp_path):
    tsv, png = report.spectrum_report(tmp_path, 4, {0: "realized:flower_only", 8: "realized:identity_max",
                                                    2: "failed:necessary"})
    rows = _rows(tsv)
    assert rows[0][:3] == ["r", "k", "in_I3F"]
    assert [r[1] for r in rows[1:]] == ["0", "2", "8"]
    assert png.stat().st_size > 0


def test_paper_check_report(tmp_path):
    tsv, png = report.paper_check_report(tmp_path, catalog.reproduce_paper_checks())
    rows = _rows(tsv)
    assert len(rows) == 12
    assert png.exists()


def test_latin_report(tmp_path):
    tsv, png = report.latin_report(tmp_path, 3, {0, 9}, {0, 9})
    rows = _rows(tsv)
    assert len(rows) == 11 and rows[1] == ["3", "0", "1", "1"]
    assert png.exists()
