"""Chart-type shares in five published SVG collections.

Run: python demos/06_usage_tables.py
"""

from __future__ import annotations

from svgviz.collections_data import COLLECTIONS
from svgviz.evaluation import usage_stats

print(f"{'collection':14} {'most popular':>22} {'2nd':>16} {'bar':>6} {'line':>6} {'pie':>6} {'top 4':>6}")
for name, (size, counts) in COLLECTIONS.items():
    r = usage_stats(counts, total=size)
    first = f"{r.most_popular[0]} {r.most_popular[1]:.1f}%"
    second = f"{r.second_most_popular[0]} {r.second_most_popular[1]:.1f}%"
    print(f"{name:14} {first:>22} {second:>16} {r.percent('bar'):6.1f} {r.percent('line'):6.1f} "
          f"{r.percent('pie'):6.1f} {r.top4_coverage:6.1f}")

# Fusion Charts declares 530 charts but only tallies 519 by type; the rest
# are reported as "__unlisted__" so the shares are taken over all 530.
size, counts = COLLECTIONS["Fusion Charts"]
print(usage_stats(counts, total=size).table())
