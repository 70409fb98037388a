"""Polite fetching of web pages, inline SVG extraction and a content-addressed store.

Layout of a corpus directory::

    objects/<sha256>.svg   one file per distinct SVG
    manifest.jsonl         one JSON record per entry, sorted by id
    crawl.log              per-page errors and skipped files

Only inline ``<svg>`` elements are extracted; SVG files referenced from
``<img>``, ``<object>`` or ``<iframe>`` are not fetched, and no scripts run.
"""

from __future__ import annotations

import hashlib
import json
import logging
import os
import re
import threading
import time
import urllib.robotparser
from collections import defaultdict
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field
from datetime import datetime, timezone
from html.entities import name2codepoint
from html.parser import HTMLParser
from pathlib import Path
from urllib.parse import urldefrag, urljoin, urlsplit

import requests

from svgviz.io import atomic_write
from svgviz.svgdom import MalformedXml, NotSvg, parse_svg

__all__ = [
    "DEFAULT_USER_AGENT",
    "EXCLUDED_ANIMATION",
    "CrawlError",
    "RobotsDisallowed",
    "FetchTimeout",
    "HttpError",
    "TooManyRedirects",
    "CrawlPolicy",
    "PageDocument",
    "CorpusEntry",
    "CorpusStore",
    "CrawlSession",
    "extract_svgs_from_html",
    "extract_links",
    "fetch_page",
    "crawl",
    "ingest",
    "read_labels",
]

log = logging.getLogger(__name__)

DEFAULT_USER_AGENT = os.environ.get("SVGVIZ_USER_AGENT", "svgviz/0.1 (chart corpus crawler)")
EXCLUDED_ANIMATION = "animation/script"
MAX_REDIRECTS = 5

SVG_NS = "http://www.w3.org/2000/svg"
XLINK_NS = "http://www.w3.org/1999/xlink"

_ATTRS = r"""(?:[^>"']|"[^"]*"|'[^']*')*?"""
_TOKENS = re.compile(
    rf"(?P<comment><!--.*?-->)"
    rf"|(?P<script><script\b{_ATTRS}>.*?</script\s*>)"
    rf"|(?P<style><style\b{_ATTRS}>(?P<css>.*?)</style\s*>)"
    rf"|(?P<svg><(?P<close>/?)svg\b{_ATTRS}(?P<selfclose>/?)>)",
    re.I | re.S,
)
_ANIMATED = re.compile(r"<(?:[\w-]+:)?(?:animate|animateTransform|animateMotion|script)(?=[\s/>])", re.I)
_ENTITY = re.compile(r"&([A-Za-z][A-Za-z0-9]*);")
_XML_ENTITIES = frozenset({"lt", "gt", "amp", "quot", "apos"})


class CrawlError(Exception):
    pass


class RobotsDisallowed(CrawlError):
    pass


class FetchTimeout(CrawlError):
    pass


class HttpError(CrawlError):
    def __init__(self, status: int, url: str):
        super().__init__(f"HTTP {status} for {url}")
        self.status = status


class TooManyRedirects(CrawlError):
    pass


@dataclass(frozen=True)
class CrawlPolicy:
    max_pages: int = 100
    max_depth: int = 1
    per_host_delay: float = 1.0
    same_host_only: bool = True
    user_agent: str = DEFAULT_USER_AGENT
    obey_robots: bool = True
    timeout: float = 10.0

    def __post_init__(self):
        if self.per_host_delay < 0:
            raise ValueError("per_host_delay must be non-negative")
        if self.max_pages < 1:
            raise ValueError("max_pages must be at least 1")


@dataclass(frozen=True)
class PageDocument:
    url: str
    body: str
    content_type: str = "text/html"


def _html_entities_to_xml(text: str) -> str:
    def sub(m):
        name = m.group(1)
        if name in _XML_ENTITIES or name not in name2codepoint:
            return m.group(0)
        return f"&#{name2codepoint[name]};"

    return _ENTITY.sub(sub, text)


_TAG = re.compile(rf"<([A-Za-z][^\s/>]*)({_ATTRS})(/?)>", re.S)
_ATTR = re.compile(r"""\s*([^\s=/>"']+)(?:\s*=\s*("[^"]*"|'[^']*'|[^\s>"']+))?""")


def _xml_attributes(fragment: str) -> str:
    """Quote unquoted attribute values and give bare attributes a value."""

    def fix_tag(m):
        name, attrs, slash = m.groups()
        if "=" not in attrs and not attrs.strip():
            return m.group(0)
        parts = []
        for a in _ATTR.finditer(attrs):
            attr, value = a.groups()
            if value is None:
                value = '""'
            elif value[0] not in "\"'":
                value = '"' + value.replace("&", "&amp;").replace('"', "&quot;") + '"'
            parts.append(f" {attr}={value}")
        return f"<{name}{''.join(parts)}{slash}>"

    return _TAG.sub(fix_tag, fragment)


def _standalone(svg: str, page_css: str) -> str:
    svg = _xml_attributes(svg)
    open_end = re.match(rf"<svg\b{_ATTRS}/?>", svg, re.I | re.S).end()
    # HTML tag names are case-insensitive, XML ones are not
    head = "<svg" + svg[4:open_end]
    rest = svg[open_end:]
    if not head.endswith("/>"):
        close = rest.lower().rfind("</svg")
        rest = rest[:close] + "</svg" + rest[close + 5 :]
    if not re.search(r"\sxmlns\s*=", head):
        head = head[:4] + f' xmlns="{SVG_NS}"' + head[4:]
    if "xlink:" in svg and not re.search(r"\sxmlns:xlink\s*=", head):
        head = head[:4] + f' xmlns:xlink="{XLINK_NS}"' + head[4:]
    if page_css.strip():
        css = page_css.replace("]]>", "]]]]><![CDATA[>")
        block = f"<style><![CDATA[\n{css}\n]]></style>"
        if head.endswith("/>"):
            head = head[:-2].rstrip() + ">"
            rest = f"{block}</svg>"
        else:
            close = rest.rfind("</svg")
            rest = rest[:close] + block + rest[close:]
    return _html_entities_to_xml(head + rest)


def extract_svgs_from_html(page: PageDocument) -> list[tuple[str, str | None]]:
    """Every top-level inline ``<svg>`` of a page as standalone SVG text.

    Each result is ``(svg_text, exclusion)``; ``exclusion`` is
    ``"animation/script"`` when the SVG contains animation elements or
    scripts, otherwise None. Page-level ``<style>`` blocks are copied into
    every extracted SVG.
    """
    text = page.body
    regions: list[tuple[int, int]] = []
    css: list[str] = []
    depth = 0
    start = 0
    for m in _TOKENS.finditer(text):
        if m.group("svg") is None:
            if depth == 0 and m.group("style") is not None:
                css.append(m.group("css"))
            continue
        if m.group("close"):
            if depth == 0:
                continue
            depth -= 1
            if depth == 0:
                regions.append((start, m.end()))
        elif m.group("selfclose"):
            if depth == 0:
                regions.append((m.start(), m.end()))
        else:
            if depth == 0:
                start = m.start()
            depth += 1
    page_css = "\n".join(c.strip() for c in css if c.strip())
    out = []
    for a, b in regions:
        raw = text[a:b]
        exclusion = EXCLUDED_ANIMATION if _ANIMATED.search(raw) else None
        out.append((_standalone(raw, page_css), exclusion))
    return out


class _LinkParser(HTMLParser):
    def __init__(self):
        super().__init__(convert_charrefs=True)
        self.hrefs: list[str] = []

    def handle_starttag(self, tag, attrs):
        if tag == "a":
            for name, value in attrs:
                if name == "href" and value:
                    self.hrefs.append(value)


def extract_links(page: PageDocument) -> list[str]:
    """Absolute http(s) links of a page, fragment-free, in document order."""
    parser = _LinkParser()
    parser.feed(page.body)
    out, seen = [], set()
    for href in parser.hrefs:
        url = urldefrag(urljoin(page.url, href.strip())).url
        if urlsplit(url).scheme in ("http", "https") and url not in seen:
            seen.add(url)
            out.append(url)
    return out


def _charset(content_type: str) -> str | None:
    m = re.search(r"charset=[\"']?([\w.:-]+)", content_type, re.I)
    return m.group(1) if m else None


def _decode(body: bytes, content_type: str) -> str:
    charset = _charset(content_type)
    if charset:
        try:
            return body.decode(charset, errors="replace")
        except LookupError:
            pass
    return body.decode("utf-8", errors="replace")


class CrawlSession:
    """Connection pool, robots cache and per-host pacing shared by fetches.

    Requests to one host are serialized, and each starts at least
    ``policy.per_host_delay`` seconds after the previous one to that host
    finished (robots.txt requests included).
    """

    def __init__(self, policy: CrawlPolicy, http: requests.Session | None = None):
        self.policy = policy
        self.http = http or requests.Session()
        self.http.headers["User-Agent"] = policy.user_agent
        self._host_locks: dict[str, threading.Lock] = defaultdict(threading.Lock)
        self._locks_guard = threading.Lock()
        self._last_done: dict[str, float] = {}
        self._robots: dict[str, urllib.robotparser.RobotFileParser] = {}

    def _host_lock(self, host: str) -> threading.Lock:
        with self._locks_guard:
            return self._host_locks[host]

    def _paced_get(self, url: str) -> requests.Response:
        host = urlsplit(url).netloc.lower()
        with self._host_lock(host):
            last = self._last_done.get(host)
            if last is not None:
                wait = last + self.policy.per_host_delay - time.monotonic()
                if wait > 0:
                    time.sleep(wait)
            try:
                return self.http.get(url, timeout=self.policy.timeout, allow_redirects=False)
            except requests.Timeout as exc:
                raise FetchTimeout(f"timed out after {self.policy.timeout}s: {url}") from exc
            except requests.RequestException as exc:
                raise CrawlError(f"request failed for {url}: {exc}") from exc
            finally:
                self._last_done[host] = time.monotonic()

    def _robots_for(self, url: str) -> urllib.robotparser.RobotFileParser:
        parts = urlsplit(url)
        origin = f"{parts.scheme}://{parts.netloc}"
        with self._host_lock("robots:" + origin):
            parser = self._robots.get(origin)
            if parser is not None:
                return parser
            parser = urllib.robotparser.RobotFileParser(origin + "/robots.txt")
            try:
                resp = self._paced_get(origin + "/robots.txt")
            except CrawlError:
                parser.allow_all = True
            else:
                if resp.status_code in (401, 403):
                    parser.disallow_all = True
                elif resp.status_code >= 400:
                    parser.allow_all = True
                else:
                    parser.parse(_decode(resp.content, resp.headers.get("Content-Type", "")).splitlines())
            self._robots[origin] = parser
            return parser

    def fetch(self, url: str) -> PageDocument:
        if urlsplit(url).scheme not in ("http", "https"):
            raise CrawlError(f"not an http(s) URL: {url}")
        # redirects are followed by hand so every hop is paced and robots-checked
        start = url
        for _ in range(MAX_REDIRECTS + 1):
            if self.policy.obey_robots and not self._robots_for(url).can_fetch(self.policy.user_agent, url):
                raise RobotsDisallowed(f"robots.txt disallows {url}")
            resp = self._paced_get(url)
            if not resp.is_redirect:
                break
            url = urljoin(resp.url, resp.headers["Location"])
            if urlsplit(url).scheme not in ("http", "https"):
                raise CrawlError(f"redirect to a non-http(s) URL: {url}")
        else:
            raise TooManyRedirects(f"more than {MAX_REDIRECTS} redirects from {start}")
        if resp.status_code >= 400:
            raise HttpError(resp.status_code, url)
        content_type = resp.headers.get("Content-Type", "")
        return PageDocument(resp.url, _decode(resp.content, content_type), content_type)


def fetch_page(url: str, policy: CrawlPolicy, session: CrawlSession | None = None) -> PageDocument:
    """Fetch one page under ``policy``.

    Pacing and the robots cache live in ``session``; pass the same session
    for consecutive fetches so the per-host delay applies between them.
    """
    return (session or CrawlSession(policy)).fetch(url)


def _now() -> str:
    return datetime.now(timezone.utc).strftime("%Y-%m-%dT%H:%M:%SZ")


@dataclass(frozen=True)
class CorpusEntry:
    id: str
    source_url: str
    fetched_at: str
    svg_path: str
    excluded: str | None = None
    label: str | None = None

    def to_json(self) -> str:
        return json.dumps(asdict(self), sort_keys=True, ensure_ascii=False)

    @classmethod
    def from_json(cls, line: str) -> CorpusEntry:
        return cls(**json.loads(line))


def content_id(svg_text: str) -> str:
    return hashlib.sha256(svg_text.encode("utf-8")).hexdigest()


@dataclass
class CorpusStore:
    """Content-addressed SVG store backed by a manifest file.

    Entries are deduplicated by the SHA-256 of their bytes. ``flush`` rewrites
    the manifest sorted by id, so its content does not depend on insertion
    order.
    """

    root: Path
    _entries: dict[str, CorpusEntry] = field(default_factory=dict, init=False, repr=False)
    _lock: threading.Lock = field(default_factory=threading.Lock, init=False, repr=False)

    def __post_init__(self):
        self.root = Path(self.root)
        (self.root / "objects").mkdir(parents=True, exist_ok=True)
        manifest = self.manifest_path
        if manifest.exists():
            for line in manifest.read_text(encoding="utf-8").splitlines():
                if line.strip():
                    entry = CorpusEntry.from_json(line)
                    self._entries[entry.id] = entry

    @property
    def manifest_path(self) -> Path:
        return self.root / "manifest.jsonl"

    @property
    def log_path(self) -> Path:
        return self.root / "crawl.log"

    def add(
        self,
        svg_text: str,
        source_url: str,
        exclusion: str | None = None,
        label: str | None = None,
        fetched_at: str | None = None,
    ) -> CorpusEntry:
        entry_id = content_id(svg_text)
        with self._lock:
            existing = self._entries.get(entry_id)
            if existing is not None:
                if existing.label is None and label is not None and existing.excluded is None:
                    existing = CorpusEntry(**{**asdict(existing), "label": label})
                    self._entries[entry_id] = existing
                return existing
            rel = f"objects/{entry_id}.svg"
            atomic_write(self.root / rel, svg_text)
            entry = CorpusEntry(
                id=entry_id,
                source_url=source_url,
                fetched_at=fetched_at or _now(),
                svg_path=rel,
                excluded=exclusion,
                label=None if exclusion else label,
            )
            self._entries[entry_id] = entry
            return entry

    def entries(self) -> list[CorpusEntry]:
        return [self._entries[k] for k in sorted(self._entries)]

    def __len__(self) -> int:
        return len(self._entries)

    def svg_text(self, entry: CorpusEntry) -> str:
        return (self.root / entry.svg_path).read_text(encoding="utf-8")

    def log(self, message: str) -> None:
        log.warning(message)
        with self._lock, open(self.log_path, "a", encoding="utf-8") as fh:
            fh.write(f"{_now()}\t{message}\n")

    def flush(self) -> None:
        with self._lock:
            text = "".join(self._entries[k].to_json() + "\n" for k in sorted(self._entries))
            atomic_write(self.manifest_path, text)


def crawl(
    seeds: list[str],
    policy: CrawlPolicy,
    store: CorpusStore,
    jobs: int = 4,
    session: CrawlSession | None = None,
) -> list[CorpusEntry]:
    """Breadth-first crawl from ``seeds``, storing every inline SVG found.

    Pages are fetched in frontier order by up to ``jobs`` workers. Failed
    pages are written to the crawl log and do not stop the crawl. Returns the
    entries seen during this crawl (new or already stored), sorted by id.
    """
    if not seeds:
        raise ValueError("crawl needs at least one seed URL")
    session = session or CrawlSession(policy)
    seed_hosts = {urlsplit(s).netloc.lower() for s in seeds}
    frontier: list[tuple[str, int]] = []
    seen: set[str] = set()
    for url in seeds:
        url = urldefrag(url).url
        if url not in seen:
            seen.add(url)
            frontier.append((url, 0))

    def attempt(item):
        try:
            return session.fetch(item[0])
        except CrawlError as exc:
            return exc

    touched: dict[str, CorpusEntry] = {}
    fetched = 0
    with ThreadPoolExecutor(max_workers=max(1, jobs)) as pool:
        while frontier and fetched < policy.max_pages:
            batch = frontier[: policy.max_pages - fetched]
            frontier = frontier[len(batch):]
            for (url, depth), outcome in zip(batch, pool.map(attempt, batch)):
                if isinstance(outcome, CrawlError):
                    if not isinstance(outcome, RobotsDisallowed):
                        fetched += 1
                    store.log(f"{type(outcome).__name__}\t{url}\t{outcome}")
                    continue
                fetched += 1
                for svg_text, exclusion in extract_svgs_from_html(outcome):
                    entry = store.add(svg_text, outcome.url, exclusion)
                    touched[entry.id] = entry
                if depth >= policy.max_depth:
                    continue
                for link in extract_links(outcome):
                    if policy.same_host_only and urlsplit(link).netloc.lower() not in seed_hosts:
                        continue
                    if link not in seen:
                        seen.add(link)
                        frontier.append((link, depth + 1))
    store.flush()
    return [touched[k] for k in sorted(touched)]


def read_labels(path: str | Path) -> dict[str, str]:
    """Parse a ``filename<TAB>label`` file; blank and ``#`` lines are ignored."""
    labels = {}
    for lineno, line in enumerate(Path(path).read_text(encoding="utf-8").splitlines(), start=1):
        if not line.strip() or line.startswith("#"):
            continue
        name, sep, label = line.partition("\t")
        if not sep or not label.strip():
            raise ValueError(f"{path}:{lineno}: expected 'filename<TAB>label'")
        labels[name.strip()] = label.strip()
    return labels


def ingest(directory: str | Path, labels: str | Path | dict | None, store: CorpusStore) -> list[CorpusEntry]:
    """Add every parseable ``*.svg`` file of ``directory`` to ``store``.

    Labels are joined by file name. Files that do not parse as SVG are
    written to the crawl log and skipped.
    """
    directory = Path(directory)
    if not directory.is_dir():
        raise NotADirectoryError(str(directory))
    if labels is not None and not isinstance(labels, dict):
        labels = read_labels(labels)
    labels = labels or {}
    out = []
    for path in sorted(directory.glob("*.svg")):
        text = path.read_text(encoding="utf-8", errors="replace")
        try:
            parse_svg(text)
        except (MalformedXml, NotSvg) as exc:
            store.log(f"skip\t{path.name}\t{exc}")
            continue
        exclusion = EXCLUDED_ANIMATION if _ANIMATED.search(text) else None
        mtime = datetime.fromtimestamp(path.stat().st_mtime, timezone.utc).strftime("%Y-%m-%dT%H:%M:%SZ")
        out.append(store.add(text, path.resolve().as_uri(), exclusion, labels.get(path.name), mtime))
    store.flush()
    return out
