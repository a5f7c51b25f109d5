"""TSV tables and matplotlib figures for the CLI's --out directory."""

from __future__ import annotations

import csv
from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402

from . import catalog, spectra  # noqa: E402


def write_tsv(path, header, rows):
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", newline="") as fh:
        w = csv.writer(fh, delimiter="\t", lineterminator="\n")
        w.writerow(header)
        for row in rows:
            w.writerow(row)
    return path


def _strip(ax, y, values, color, label):
    xs = sorted(values)
    ax.scatter(xs, [y] * len(xs), s=14, marker="s", color=color, label=label)


def spectrum_report(out_dir, r: int, outcomes: dict):
    """``outcomes`` maps k to a status string ("realized:<route>",
    "unavailable:<component>", "failed:<reason>"). Writes
    spectrum_r<r>.tsv and spectrum_r<r>.png; returns both paths."""
    out = Path(out_dir)
    pub = catalog.published_spectrum(r)
    full = spectra.i3f(r)
    rows = []
    for k in sorted(full | set(outcomes)):
        status = outcomes.get(k, "")
        rows.append([r, k, int(k in full), int(k in pub.lower), int(k in pub.upper), status])
    tsv = write_tsv(out / f"spectrum_r{r}.tsv",
                    ["r", "k", "in_I3F", "published_lower", "published_upper", "outcome"], rows)
    fig, ax = plt.subplots(figsize=(max(6, len(full) / 8), 2.6))
    _strip(ax, 3, full, "0.7", "I^3_F(r)")
    _strip(ax, 2, pub.upper, "tab:blue", "published upper")
    _strip(ax, 1, pub.lower, "tab:green", "published lower")
    _strip(ax, 0, [k for k, s in outcomes.items() if s.startswith("realized")], "tab:red", "realized here")
    ax.set_yticks([0, 1, 2, 3], ["realized", "lower", "upper", "I3F"])
    ax.set_xlabel("k")
    ax.set_title(f"flower intersection numbers, r={r} (v={2 * r + 1})")
    ax.set_ylim(-0.7, 3.7)
    fig.tight_layout()
    png = out / f"spectrum_r{r}.png"
    fig.savefig(png, dpi=120)
    plt.close(fig)
    return tsv, png


def paper_check_report(out_dir, rows):
    out = Path(out_dir)
    data = []
    for row in rows:
        c = row.claim
        data.append([c.row, c.first, c.source, c.claimed_k, "" if row.computed is None else row.computed,
                     int(row.match), "/".join(map(str, row.sizes)), row.note])
    tsv = write_tsv(out / "paper_check.tsv",
                    ["row", "first", "source", "claimed_k", "computed_k", "match", "pairwise_sizes", "note"], data)
    fig, ax = plt.subplots(figsize=(7, 3))
    xs = range(len(rows))
    ax.bar([x - 0.2 for x in xs], [r.claim.claimed_k for r in rows], width=0.4, label="printed")
    ax.bar([x + 0.2 for x in xs], [r.computed if r.computed is not None else 0 for r in rows],
           width=0.4, label="recomputed", color=["tab:green" if r.match else "tab:red" for r in rows])
    ax.set_xticks(list(xs), [r.claim.row for r in rows], rotation=45)
    ax.set_ylabel("k")
    ax.legend()
    fig.tight_layout()
    png = out / "paper_check.png"
    fig.savefig(png, dpi=120)
    plt.close(fig)
    return tsv, png


def latin_report(out_dir, n: int, computed, published=None):
    out = Path(out_dir)
    computed = set(computed)
    published = set(published or ())
    top = n * n
    tsv = write_tsv(out / f"latin_n{n}.tsv", ["n", "k", "computed", "published"],
                    [[n, k, int(k in computed), int(k in published)] for k in range(top + 1)])
    fig, ax = plt.subplots(figsize=(max(6, top / 10), 2))
    _strip(ax, 1, published, "tab:blue", "published")
    _strip(ax, 0, computed, "tab:red", "computed")
    ax.set_yticks([0, 1], ["computed", "published"])
    ax.set_xlabel("agreement cells k")
    ax.set_ylim(-0.7, 1.7)
    fig.tight_layout()
    png = out / f"latin_n{n}.png"
    fig.savefig(png, dpi=120)
    plt.close(fig)
    return tsv, png
