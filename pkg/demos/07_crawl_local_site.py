"""Crawl a throwaway local site and store the SVGs it embeds.

Run: python demos/07_crawl_local_site.py
"""

from __future__ import annotations

import functools
import tempfile
import threading
from http.server import SimpleHTTPRequestHandler, ThreadingHTTPServer
from pathlib import Path

from svgviz.corpus import CorpusStore, CrawlPolicy, crawl

BAR = '<svg width="60" height="40"><rect x="5" y="10" width="10" height="30"/><rect x="20" y="5" width="10" height="35"/></svg>'
SPINNER = '<svg width="20" height="20"><circle cx="10" cy="10" r="8"><animate attributeName="r" values="8;4;8" dur="1s"/></circle></svg>'

site = Path(tempfile.mkdtemp())
(site / "robots.txt").write_text("User-agent: *\nDisallow: /drafts/\n")
(site / "index.html").write_text(f'<a href="/gallery.html">gallery</a> <a href="/drafts/x.html">drafts</a> {BAR}')
(site / "gallery.html").write_text(f"<p>same chart again</p>{BAR}{SPINNER}")
(site / "drafts").mkdir()
(site / "drafts" / "x.html").write_text("<svg width='1' height='1'/>")


class Quiet(SimpleHTTPRequestHandler):
    def log_message(self, *args):
        pass


server = ThreadingHTTPServer(("127.0.0.1", 0), functools.partial(Quiet, directory=str(site)))
threading.Thread(target=server.serve_forever, daemon=True).start()
seed = f"http://127.0.0.1:{server.server_address[1]}/index.html"

out = Path(tempfile.mkdtemp())
policy = CrawlPolicy(max_pages=10, max_depth=1, per_host_delay=0.2)
entries = crawl([seed], policy, CorpusStore(out))
server.shutdown()

# the bar chart appears twice but is stored once; the animated spinner is
# kept but marked as excluded; /drafts/ is never requested
for e in entries:
    print(f"{e.id[:12]}  excluded={e.excluded}  from {e.source_url}")
print((out / "crawl.log").read_text().strip())
print("manifest:", out / "manifest.jsonl")
