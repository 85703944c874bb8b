"""Write the data behind one figure to CSV files, one per panel.

    python3 demos/export_figure.py 7 --out fig7 --set n_theta=21
"""

import argparse
import csv
import json
from pathlib import Path

import numpy as np

from bec2model.figures import figure


def _value(text):
    try:
        return json.loads(text)
    except json.JSONDecodeError:
        return text


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("number", type=int)
    ap.add_argument("--out", type=Path, default=Path("."))
    ap.add_argument("--set", action="append", default=[], metavar="KEY=VALUE",
                    help="recipe keyword, e.g. N=50 or n_theta=21")
    args = ap.parse_args()
    kw = {k: _value(v) for k, v in (s.split("=", 1) for s in args.set)}
    fig = figure(args.number, **kw)
    args.out.mkdir(parents=True, exist_ok=True)
    for label, panel in fig.panels.items():
        path = args.out / f"fig{fig.number}_{label.replace(',', '_').replace('=', '')}.csv"
        names = list(panel.columns)
        with path.open("w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(names)
            w.writerows(np.column_stack([np.asarray(panel.columns[n], dtype=float) for n in names]))
        print(path)


if __name__ == "__main__":
    main()
