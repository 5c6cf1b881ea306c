#!/usr/bin/env python3
"""Convert a MeSH ASCII descriptor file to the vocab.tsv format.

The ASCII distribution (e.g. d2025.bin) is record-oriented:

    *NEWRECORD
    RECTYPE = D
    MH = Heart Arrest
    ...
    MN = C14.280.383.220
    MN = C23.550.260.505
    ...
    UI = D006323

Each record becomes one line `UI<TAB>MH<TAB>MN(;MN)*`. Records without any
MN line (check tags, qualifiers) are skipped.

Usage: mesh_ascii_to_vocab.py d2025.bin > vocab.tsv
"""

import argparse
import sys


def convert(lines, out):
    ui, heading, tree_numbers = None, None, []
    skipped = 0

    def flush():
        nonlocal skipped
        if ui is None:
            return
        if not tree_numbers:
            skipped += 1
            return
        out.write(f"{ui}\t{heading}\t{';'.join(tree_numbers)}\n")

    for raw in lines:
        line = raw.rstrip("\n")
        if line == "*NEWRECORD":
            flush()
            ui, heading, tree_numbers = None, None, []
            continue
        if " = " not in line:
            continue
        key, value = line.split(" = ", 1)
        if key == "MH":
            heading = value
        elif key == "MN":
            tree_numbers.append(value)
        elif key == "UI":
            ui = value
    flush()
    if skipped:
        print(f"skipped {skipped} records without tree numbers", file=sys.stderr)


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("ascii_file", help="MeSH ASCII descriptor file (d*.bin)")
    args = parser.parse_args()
    with open(args.ascii_file, encoding="utf-8", errors="replace") as handle:
        convert(handle, sys.stdout)


if __name__ == "__main__":
    main()
