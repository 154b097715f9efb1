#!/usr/bin/env python3
"""Regenerate the So range table from a UnicodeData.txt file.

    python3 gen_so_ranges.py UnicodeData-8.0.0.txt > unicode-8.0-so.txt

UnicodeData.txt for a given version lives at
https://www.unicode.org/Public/<version>/ucd/UnicodeData.txt
"""
import sys


def so_codepoints(lines):
    first = None
    for line in lines:
        fields = line.rstrip("\n").split(";")
        if len(fields) < 3:
            continue
        cp, name, cat = int(fields[0], 16), fields[1], fields[2]
        if name.endswith(", First>"):
            first = cp
            continue
        if name.endswith(", Last>"):
            if cat == "So":
                yield from range(first, cp + 1)
            first = None
            continue
        if cat == "So":
            yield cp


def main():
    path = sys.argv[1]
    with open(path, encoding="utf-8") as f:
        cps = sorted(so_codepoints(f))
    ranges = []
    for cp in cps:
        if ranges and ranges[-1][1] == cp - 1:
            ranges[-1][1] = cp
        else:
            ranges.append([cp, cp])
    print("# General category So (Symbol, Other), Unicode 8.0.0.")
    print("# Inclusive codepoint intervals, sorted. Generated by gen_so_ranges.py from UnicodeData.txt.")
    for lo, hi in ranges:
        print("U+%04X..U+%04X" % (lo, hi))


if __name__ == "__main__":
    main()
