"""Read path programs the way browsers do and summarise them.

Run: python demos/02_path_grammar.py
"""

from __future__ import annotations

from svgviz.pathdata import EmptyPath, parse_path, path_metrics, to_absolute

PATHS = {
    "pie wedge": "M50 50 L50 10 A40 40 0 0 1 84.6 70 Z",
    "packed arc flags": "M10 80 a25 25 0 1010 0",
    "implicit lineto": "M0 0 10 0 10 10 0 10",
    "garbage tail": "M0 0 L10 10 L20 oops 30",
    "empty": "  ",
}

for name, d in PATHS.items():
    try:
        program = parse_path(d)
    except EmptyPath:
        print(f"{name:17} -> no drawable commands")
        continue
    m = path_metrics(program)
    ops = " ".join(c.op for c in to_absolute(program).commands)
    print(f"{name:17} -> {ops:14} start={m.start} end={m.end} "
          f"closed={m.is_polygon} arcs={m.arc_calls} d_length={m.d_length}")

# "1010" after the arc radii is read as large-arc=1, sweep=0 and x=10, and a
# parse error keeps everything before the bad token rather than failing.
