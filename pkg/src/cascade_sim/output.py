"""Bit-stable CSV and JSON emission.

Numbers are written with repr, the shortest representation that parses
back to the identical float, independent of locale.  Booleans become 0/1
in CSVs.  Files always end with a trailing newline and use LF endings.
"""

import json


def format_cell(value):
    if isinstance(value, bool):
        return "1" if value else "0"
    if isinstance(value, float):
        return repr(value)
    return str(value)


def write_csv(path, header, rows):
    lines = [",".join(header)]
    for row in rows:
        if len(row) != len(header):
            raise ValueError(
                f"row width {len(row)} does not match header width {len(header)}")
        lines.append(",".join(format_cell(c) for c in row))
    with open(path, "w", encoding="utf-8", newline="\n") as f:
        f.write("\n".join(lines) + "\n")


def write_manifest(path, manifest):
    text = json.dumps(manifest, indent=2, sort_keys=True)
    with open(path, "w", encoding="utf-8", newline="\n") as f:
        f.write(text + "\n")


def read_manifest(path):
    with open(path, "r", encoding="utf-8") as f:
        return json.load(f)
