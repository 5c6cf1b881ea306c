#!/usr/bin/env python3
"""Convert MEDLINE/PubMed XML citations to the corpus.tsv format.

Reads one or more PubmedArticleSet XML files (optionally .gz) and writes one
line per citation: `PMID<TAB>entry(;entry)*` where an entry is the
descriptor UI, a trailing `*` when the heading is a major topic (the
descriptor or any of its qualifiers carries MajorTopicYN="Y"), and the
qualifier UIs after `/`:

    12345678	D006323*/Q000175,Q000534;D006801

Citations without a MeshHeadingList are skipped.

Usage: medline_to_corpus.py pubmed*.xml.gz > corpus.tsv
"""

import argparse
import gzip
import sys
import xml.etree.ElementTree as ET


def open_maybe_gz(path):
    if path.endswith(".gz"):
        return gzip.open(path, "rb")
    return open(path, "rb")


def convert(path, out, seen):
    skipped = 0
    with open_maybe_gz(path) as handle:
        for _, elem in ET.iterparse(handle, events=("end",)):
            if elem.tag != "MedlineCitation":
                continue
            pmid = elem.findtext("PMID")
            headings = elem.find("MeshHeadingList")
            if pmid is None or headings is None or pmid in seen:
                skipped += pmid is not None and headings is None
                elem.clear()
                continue
            entries = []
            for heading in headings.iter("MeshHeading"):
                descriptor = heading.find("DescriptorName")
                if descriptor is None or not descriptor.get("UI"):
                    continue
                major = descriptor.get("MajorTopicYN") == "Y"
                qualifiers = []
                for qualifier in heading.iter("QualifierName"):
                    major = major or qualifier.get("MajorTopicYN") == "Y"
                    if qualifier.get("UI"):
                        qualifiers.append(qualifier.get("UI"))
                entry = descriptor.get("UI") + ("*" if major else "")
                if qualifiers:
                    entry += "/" + ",".join(qualifiers)
                entries.append(entry)
            if entries:
                seen.add(pmid)
                out.write(f"{pmid}\t{';'.join(entries)}\n")
            else:
                skipped += 1
            elem.clear()
    return skipped


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("xml_files", nargs="+", help="PubmedArticleSet XML files")
    args = parser.parse_args()
    seen = set()
    skipped = 0
    for path in args.xml_files:
        skipped += convert(path, sys.stdout, seen)
    if skipped:
        print(f"skipped {skipped} citations without MeSH headings", file=sys.stderr)


if __name__ == "__main__":
    main()
