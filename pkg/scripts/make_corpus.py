"""Regenerate the bundled JSON corpus from the builders in tropdiv.corpus."""

import json
from pathlib import Path

from tropdiv import corpus
from tropdiv.divisor import Divisor

OUT = Path(__file__).resolve().parents[1] / "src" / "tropdiv" / "corpus"


def write(name, obj):
    (OUT / f"{name}.json").write_text(json.dumps(obj, indent=2) + "\n")


def main():
    OUT.mkdir(exist_ok=True)
    graphs = corpus.builders()
    for name, g in graphs.items():
        write(name, corpus.graph_document(name, g))
    for name, (gname, entries) in corpus.divisor_fixtures().items():
        write(name, Divisor(graphs[gname], entries).to_json())
    print(f"wrote {len(graphs)} graphs to {OUT}")


if __name__ == "__main__":
    main()
