#!/usr/bin/env python3
"""Convert TREC Genomics 2006 passage judgements to the qrels.tsv format.

The raw relevance file is whitespace- or tab-separated with one passage per
line; by default this reads column 0 as the topic, column 1 as the PMID,
and column 4 as the grade. Grades may be numeric (0/1/2) or the campaign's
labels (NOT_RELEVANT / POSSIBLY_RELEVANT / DEFINITELY_RELEVANT, matched by
prefix, case-insensitive). Adjust the column flags for other layouts.

Output: `topic_id<TAB>doc_id<TAB>grade` per passage; the benchmark
aggregates repeated (topic, doc) lines by maximum grade itself.

Usage: trec_qrels_to_tsv.py trec2006.raw.relevance.tsv > qrels.tsv
"""

import argparse
import sys

GRADE_PREFIXES = {"NOT": 0, "POS": 1, "DEF": 2, "REL": 2}


def parse_grade(token):
    if token in {"0", "1", "2"}:
        return int(token)
    upper = token.upper()
    for prefix, grade in GRADE_PREFIXES.items():
        if upper.startswith(prefix):
            return grade
    raise ValueError(f"unrecognized grade {token!r}")


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("relevance_file")
    parser.add_argument("--topic-col", type=int, default=0)
    parser.add_argument("--doc-col", type=int, default=1)
    parser.add_argument("--grade-col", type=int, default=4)
    args = parser.parse_args()

    with open(args.relevance_file, encoding="utf-8") as handle:
        for lineno, line in enumerate(handle, 1):
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            fields = line.split("\t") if "\t" in line else line.split()
            try:
                topic = fields[args.topic_col]
                doc = fields[args.doc_col]
                grade = parse_grade(fields[args.grade_col])
            except (IndexError, ValueError) as err:
                print(f"line {lineno}: {err}", file=sys.stderr)
                sys.exit(1)
            sys.stdout.write(f"{topic}\t{doc}\t{grade}\n")


if __name__ == "__main__":
    main()
