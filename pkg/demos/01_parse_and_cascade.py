"""Parse a small chart, walk its drawable elements and resolve their styles.

Run: python demos/01_parse_and_cascade.py
"""

from __future__ import annotations

from svgviz.style import parse_stylesheet, resolve_style
from svgviz.svgdom import flatten_elements, parse_svg

CHART = """
<svg xmlns="http://www.w3.org/2000/svg" viewBox="0 0 200 100">
  <style>
    rect { fill: steelblue }
    .highlight { fill: orange }
    #total { stroke: black; stroke-width: 2 }
  </style>
  <g transform="translate(20 10)" fill="gray" font-size="12">
    <rect x="0" y="40" width="30" height="50"/>
    <rect class="highlight" x="40" y="20" width="30" height="70"/>
    <rect id="total" x="80" y="10" width="30" height="80" style="fill: green"/>
    <text x="0" y="100">Q1</text>
  </g>
</svg>
"""

doc = parse_svg(CHART)
# no width/height on the root, so the viewBox sets the drawing size
print(f"viewport: {doc.viewport.width} x {doc.viewport.height}")



def paint(p) -> str:
    return f"#{p.r:02x}{p.g:02x}{p.b:02x}" if hasattr(p, "r") else str(p)


rules = parse_stylesheet(doc.stylesheet_text)
for el in flatten_elements(doc):
    style = resolve_style(el, rules)
    x, y = el.transform.apply(el.number("x"), el.number("y"))
    print(f"{el.kind:5} at ({x:5.1f}, {y:5.1f})  fill={paint(style.fill)}  stroke={paint(style.stroke)}  "
          f"stroke-width={style.stroke_width}  font-size={style.font_size}")

# The type rule beats the inherited gray, the class rule beats the type rule,
# and the inline style beats them all. The text has no rule, so it inherits
# gray and the 12px font size from the group.
