"""Result aggregation: CSV and Markdown tables plus rendered figures.

Reads the JSON records a run left in its output directory and writes
plot-ready CSV next to PNG renderings of the same series: bracket width
against resolution, modulus gap against depth, variational sums against
their tolerance, and the dimension-sweep growth curves.
"""

from __future__ import annotations

import csv
import json
import os
from typing import Dict, List, Optional

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402  (backend must be set first)


def _load_json_dir(path: str) -> List[dict]:
    if not os.path.isdir(path):
        return []
    out = []
    for name in sorted(os.listdir(path)):
        if name.endswith(".json"):
            with open(os.path.join(path, name)) as src:
                out.append(json.load(src))
    return out


def _to_float(entry) -> float:
    if isinstance(entry, str) and "/" in entry:
        num, den = entry.split("/")
        return int(num) / int(den)
    return float(entry)


def _vec_sup(entries) -> float:
    return max(abs(_to_float(e)) for e in entries)


def _write_csv(path: str, rows: List[dict], columns: List[str]) -> None:
    with open(path, "w", newline="") as out:
        writer = csv.DictWriter(out, fieldnames=columns)
        writer.writeheader()
        for row in rows:
            writer.writerow({k: row.get(k, "") for k in columns})


def bracket_rows(result_dir: str) -> List[dict]:
    rows = []
    for rec in _load_json_dir(os.path.join(result_dir, "integrate")):
        cert = rec.get("certificate", {})
        if cert.get("kind") != "bracket" or rec.get("n") is None:
            continue
        width = max(
            _to_float(u) - _to_float(l)
            for l, u in zip(cert["lower"], cert["upper"])
        )
        row = {
            "function": rec["function"],
            "n": rec["n"],
            "bracket_width_sup": repr(width),
            "backend": rec["backend"],
        }
        if rec.get("oracle") is not None:
            err = max(
                abs(_to_float(v) - _to_float(o))
                for v, o in zip(rec["value"], rec["oracle"])
            )
            row["mid_error_sup"] = repr(err)
        rows.append(row)
    rows.sort(key=lambda r: (r["function"], int(r["n"])))
    return rows


def modulus_rows(result_dir: str) -> List[dict]:
    rows = []
    for rec in _load_json_dir(os.path.join(result_dir, "modulus")):
        oracle = rec["oracle"]
        for depth, val in enumerate(rec["profile"]):
            gap = max(
                _to_float(o) - _to_float(v) for o, v in zip(oracle, val)
            )
            rows.append({
                "function": rec["function"],
                "depth": depth,
                "gap_sup": repr(gap),
                "backend": rec["backend"],
            })
    rows.sort(key=lambda r: (r["function"], int(r["depth"])))
    return rows


def variational_rows(result_dir: str) -> List[dict]:
    rows = []
    for rec in _load_json_dir(os.path.join(result_dir, "checks")):
        if rec.get("theorem") != "variational":
            continue
        rows.append({
            "function": rec["function"],
            "eps": rec["details"]["eps"],
            "N": rec["details"]["N"],
            "worst_sum": repr(_vec_sup(rec["details"]["worst_sum"])),
            "violated": rec["violated"],
        })
    rows.sort(key=lambda r: (r["function"], _to_float(r["eps"])))
    return rows


def sweep_rows(result_dir: str) -> List[dict]:
    rows = []
    for rec in _load_json_dir(os.path.join(result_dir, "sweep")):
        for row in rec.get("rows", []):
            rows.append({
                "d": row["d"],
                "scaled": row["scaled"],
                "sup_bound": repr(_to_float(row["sup_bound"])),
                "l1_bound": repr(_to_float(row["l1_bound"])),
                "sup_achieved": repr(_to_float(row["sup_achieved"])),
                "l1_achieved": repr(_to_float(row["l1_achieved"])),
            })
    rows.sort(key=lambda r: (bool(r["scaled"]), int(r["d"])))
    return rows


def check_rows(result_dir: str) -> List[dict]:
    rows = []
    for rec in _load_json_dir(os.path.join(result_dir, "checks")):
        rows.append({
            "theorem": rec["theorem"],
            "function": rec["function"],
            "n": rec.get("n", ""),
            "trials": rec["trials"],
            "worst_slack": ";".join(repr(_to_float(e)) for e in rec["worst_slack"]),
            "violated": int(rec["violated"]),
            "control": int(rec.get("control", False)),
            "seed": rec["seed"],
        })
    rows.sort(key=lambda r: (r["theorem"], r["function"], str(r["n"])))
    return rows


def _markdown_table(rows: List[dict], columns: List[str]) -> str:
    if not rows:
        return "(no data)\n"
    head = "| " + " | ".join(columns) + " |\n"
    sep = "| " + " | ".join("---" for _ in columns) + " |\n"
    body = "".join(
        "| " + " | ".join(str(r.get(c, "")) for c in columns) + " |\n" for r in rows
    )
    return head + sep + body


def _fig_bracket(rows: List[dict], path: str) -> None:
    fig, ax = plt.subplots(figsize=(6, 4))
    by_fn: Dict[str, List[dict]] = {}
    for r in rows:
        by_fn.setdefault(r["function"], []).append(r)
    for fn, rs in sorted(by_fn.items()):
        ns = [int(r["n"]) for r in rs]
        ws = [float(r["bracket_width_sup"]) for r in rs]
        ax.loglog(ns, ws, marker="o", label=fn)
    ax.set_xlabel("bracket resolution n")
    ax.set_ylabel("bracket width (sup)")
    ax.set_title("Monotone bracket convergence")
    ax.grid(True, which="both", alpha=0.3)
    ax.legend(fontsize=8)
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)


def _fig_modulus(rows: List[dict], path: str) -> None:
    fig, ax = plt.subplots(figsize=(6, 4))
    by_fn: Dict[str, List[dict]] = {}
    for r in rows:
        by_fn.setdefault(r["function"], []).append(r)
    floor = 1e-18
    for fn, rs in sorted(by_fn.items()):
        ds = [int(r["depth"]) for r in rs]
        gs = [max(float(r["gap_sup"]), floor) for r in rs]
        ax.semilogy(ds, gs, marker="s", label=fn)
    ax.set_xlabel("depth")
    ax.set_ylabel("oracle gap (sup), floored at 1e-18")
    ax.set_title("Modulus lower approximation vs oracle")
    ax.grid(True, which="both", alpha=0.3)
    ax.legend(fontsize=8)
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)


def _fig_variational(rows: List[dict], path: str) -> None:
    fig, ax = plt.subplots(figsize=(6, 4))
    by_fn: Dict[str, List[dict]] = {}
    for r in rows:
        by_fn.setdefault(r["function"], []).append(r)
    for fn, rs in sorted(by_fn.items()):
        eps = [_to_float(r["eps"]) for r in rs]
        sums = [float(r["worst_sum"]) for r in rs]
        ax.loglog(eps, sums, marker="^", label=fn)
    lo = min((_to_float(r["eps"]) for r in rows), default=1e-4)
    hi = max((_to_float(r["eps"]) for r in rows), default=1e-2)
    ax.loglog([lo, hi], [lo, hi], linestyle="--", color="gray", label="bound eps")
    ax.set_xlabel("eps")
    ax.set_ylabel("worst variational sum")
    ax.set_title("Variational sums vs tolerance")
    ax.grid(True, which="both", alpha=0.3)
    ax.legend(fontsize=8)
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)


def _fig_sweep(rows: List[dict], path: str) -> None:
    fig, ax = plt.subplots(figsize=(6, 4))
    for scaled in (False, True):
        rs = [r for r in rows if bool(r["scaled"]) == scaled]
        if not rs:
            continue
        ds = [int(r["d"]) for r in rs]
        tag = "scaled" if scaled else "unscaled"
        ax.plot(ds, [float(r["sup_bound"]) for r in rs], marker="o", label=f"sup bound ({tag})")
        ax.plot(ds, [float(r["l1_bound"]) for r in rs], marker="s", label=f"l1 bound ({tag})")
    ax.set_xlabel("dimension d")
    ax.set_ylabel("pointwise-sum size")
    ax.set_title("Escaping family: sup-order vs L1 growth")
    ax.grid(True, alpha=0.3)
    ax.legend(fontsize=8)
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)


TABLES = {
    "bracket_convergence": (
        bracket_rows,
        ["function", "n", "bracket_width_sup", "mid_error_sup", "backend"],
        _fig_bracket,
    ),
    "modulus_gap": (modulus_rows, ["function", "depth", "gap_sup", "backend"], _fig_modulus),
    "variational": (variational_rows, ["function", "eps", "N", "worst_sum", "violated"], _fig_variational),
    "sweep": (
        sweep_rows,
        ["d", "scaled", "sup_bound", "l1_bound", "sup_achieved", "l1_achieved"],
        _fig_sweep,
    ),
    "checks_summary": (
        check_rows,
        ["theorem", "function", "n", "trials", "worst_slack", "violated", "control", "seed"],
        None,
    ),
}


def write_report(result_dir: str, out_dir: str) -> List[str]:
    """Aggregate result JSONs into CSV tables, a Markdown summary, and
    PNG figures; returns the list of files written."""
    os.makedirs(out_dir, exist_ok=True)
    fig_dir = os.path.join(out_dir, "figures")
    os.makedirs(fig_dir, exist_ok=True)
    written = []
    sections = []
    for name, (loader, columns, fig_fn) in TABLES.items():
        rows = loader(result_dir)
        csv_path = os.path.join(out_dir, f"{name}.csv")
        _write_csv(csv_path, rows, columns)
        written.append(csv_path)
        sections.append(f"## {name.replace('_', ' ')}\n\n" + _markdown_table(rows, columns))
        if rows and fig_fn is not None:
            fig_path = os.path.join(fig_dir, f"{name}.png")
            fig_fn(rows, fig_path)
            written.append(fig_path)
    md_path = os.path.join(out_dir, "summary.md")
    with open(md_path, "w") as out:
        out.write("# Run summary\n\n" + "\n".join(sections))
    written.append(md_path)
    return written
