"""Re-derive the three worked examples and write the figure data.

    python3 scripts/reproduce_examples.py [--figures-dir data/figures]
"""
import argparse
import json
from pathlib import Path

from shapebern.cli import write_figures
from shapebern.search import verify_paper_examples


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--figures-dir", default="data/figures")
    args = ap.parse_args()
    report = verify_paper_examples(strict=False)
    print(json.dumps(report.to_json(), indent=2))
    for path in write_figures(Path(args.figures_dir)):
        print(f"wrote {path}")
    raise SystemExit(0 if report.passed else 1)


if __name__ == "__main__":
    main()
