"""Regenerate the bundled toy corpus and compression pairs.

    python scripts/make_toy_data.py [--out src/compsumm/data]
"""
import argparse
from pathlib import Path

from compsumm.corpus import document_to_json, pair_to_json, write_jsonl
from compsumm.synth import make_corpus, make_pairs


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--out", default=str(Path(__file__).parents[1] / "src/compsumm/data"))
    parser.add_argument("--docs", type=int, default=40)
    parser.add_argument("--pairs", type=int, default=80)
    args = parser.parse_args()
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    write_jsonl(out / "toy_corpus.jsonl",
                (document_to_json(d) for d in make_corpus(args.docs, seed=0, prefix="toy")))
    write_jsonl(out / "toy_pairs.jsonl",
                (pair_to_json(p) for p in make_pairs(args.pairs, seed=100, prefix="toypair")))
    print(f"wrote {args.docs} documents and {args.pairs} pairs to {out}")


if __name__ == "__main__":
    main()
