from __future__ import annotations

import json
import re
import time

import pytest

from stubsite import html, redirect, robots, svg_block, ten_page_site
from svgviz.chartgen import CHART_TYPES, ChartSpec, generate_chart
from svgviz.corpus import (
    EXCLUDED_ANIMATION,
    CorpusEntry,
    CorpusStore,
    CrawlPolicy,
    CrawlSession,
    FetchTimeout,
    HttpError,
    PageDocument,
    RobotsDisallowed,
    TooManyRedirects,
    content_id,
    crawl,
    extract_links,
    extract_svgs_from_html,
    fetch_page,
    ingest,
    read_labels,
)
from svgviz.svgdom import flatten_elements, parse_svg

FAST = CrawlPolicy(per_host_delay=0.0, timeout=5.0)


def page(body: str, url="http://example.test/a/index.html") -> PageDocument:
    return PageDocument(url, f"<html><head></head><body>{body}</body></html>")


# --- extraction -----------------------------------------------------------------------


def test_one_inline_svg():
    ((svg, exclusion),) = extract_svgs_from_html(page('<p>hi</p><svg width="10" height="10"><rect width="1" height="2"/></svg>'))
    assert exclusion is None
    doc = parse_svg(svg)
    assert 'xmlns="http://www.w3.org/2000/svg"' in svg
    assert [e.kind for e in flatten_elements(doc)] == ["rect"]


def test_animation_excluded():
    ((svg, exclusion),) = extract_svgs_from_html(page("<svg><animate/></svg>"))
    assert exclusion == EXCLUDED_ANIMATION
    for body in ("<svg><script>x()</script></svg>", '<svg><g><animateTransform type="x"/></g></svg>', "<svg><animateMotion/></svg>"):
        assert extract_svgs_from_html(page(body))[0][1] == EXCLUDED_ANIMATION


def test_inline_only():
    body = '<img src="x.svg">' + "".join(f'<div><svg width="5" height="5"><circle r="{i}"/></svg></div>' for i in range(1, 4))
    assert len(extract_svgs_from_html(page(body))) == 3


def test_no_svg():
    assert extract_svgs_from_html(page("<p>nothing here</p>")) == []


def test_nested_svg_stays_inside_outer():
    ((svg, _),) = extract_svgs_from_html(page("<svg><svg><rect/></svg><circle/></svg>"))
    assert [e.kind for e in flatten_elements(parse_svg(svg))] == ["rect", "circle"]


def test_svg_in_comment_or_script_ignored():
    body = "<!-- <svg><rect/></svg> --><script>var s = '<svg></svg>';</script><svg><line/></svg>"
    assert len(extract_svgs_from_html(page(body))) == 1


def test_page_styles_copied_in():
    body = "<style>.bar { fill: red }</style><svg width='9' height='9'><rect class='bar'/></svg><SVG/>"
    (a, _), (b, _) = extract_svgs_from_html(page(body))
    assert ".bar { fill: red }" in parse_svg(a).stylesheet_text
    assert ".bar { fill: red }" in parse_svg(b).stylesheet_text


def test_existing_namespace_and_entities():
    body = '<svg xmlns="http://www.w3.org/2000/svg" xmlns:xlink="http://www.w3.org/1999/xlink"><text>a&nbsp;b &amp; c</text></svg>'
    ((svg, _),) = extract_svgs_from_html(page(body))
    assert svg.count("xmlns=") == 1
    (el,) = flatten_elements(parse_svg(svg))
    assert el.text_content == "a\xa0b & c"


def test_html_style_attributes_made_xml():
    ((svg, _),) = extract_svgs_from_html(page("<svg width=40 height=20 focusable><rect x=1 class=a&b width=2 height=3></rect></svg>"))
    doc = parse_svg(svg)
    (el,) = flatten_elements(doc)
    assert (doc.viewport.width, el.number("x"), el.attributes["class"]) == (40, 1, "a&b")


def test_xlink_namespace_added():
    ((svg, _),) = extract_svgs_from_html(page('<svg><use xlink:href="#a"/></svg>'))
    parse_svg(svg)


@pytest.mark.parametrize("kind", CHART_TYPES)
def test_extraction_is_lossless(kind):
    chart = generate_chart(ChartSpec(kind, seed=3, n_points=6)).replace(' xmlns="http://www.w3.org/2000/svg"', "")
    body = f"<h1>t</h1><style>p {{ color: red }}</style><div>{chart}</div><p>after</p>{chart.replace('<svg', '<svg id=two', 1)}"
    extracted = extract_svgs_from_html(page(body))
    drawn = len(re.findall(r"<(?:circle|rect|line|path|text)\b", chart))
    assert [len(flatten_elements(parse_svg(s))) for s, _ in extracted] == [drawn, drawn]


def test_links():
    doc = page('<a href="b.html#x">b</a><a href="/c">c</a><a href="mailto:x@y">m</a><a href="http://other.test/">o</a><a href="b.html">dup</a>')
    assert extract_links(doc) == ["http://example.test/a/b.html", "http://example.test/c", "http://other.test/"]


# --- fetching -------------------------------------------------------------------------


def test_fetch_decodes_declared_charset(stub_site):
    site = stub_site({"/p": (200, {"Content-Type": "text/html; charset=latin-1"}, "caf\xe9".encode("latin-1"))})
    doc = fetch_page(site.url("/p"), FAST)
    assert doc.body == "caf\xe9"
    assert doc.content_type.startswith("text/html")
    assert doc.url == site.url("/p")


def test_fetch_falls_back_to_utf8(stub_site):
    site = stub_site({"/p": (200, {"Content-Type": "text/html; charset=nonsense"}, "☃".encode())})
    assert fetch_page(site.url("/p"), FAST).body == "☃"


def test_robots_disallow(stub_site):
    site = stub_site({"/robots.txt": robots("User-agent: *\nDisallow: /private\n"), "/private/x": html("secret")})
    session = CrawlSession(FAST)
    with pytest.raises(RobotsDisallowed):
        session.fetch(site.url("/private/x"))
    assert "/private/x" not in site.paths()
    session.fetch(site.url("/robots.txt"))  # allowed path is fetched


def test_robots_ignored_when_asked(stub_site):
    site = stub_site({"/robots.txt": robots("User-agent: *\nDisallow: /\n"), "/x": html("ok")})
    fetch_page(site.url("/x"), CrawlPolicy(per_host_delay=0, obey_robots=False))
    assert site.paths() == ["/x"]


def test_robots_forbidden_means_disallow_all(stub_site):
    site = stub_site({"/robots.txt": (403, {}, ""), "/x": html("ok")})
    with pytest.raises(RobotsDisallowed):
        fetch_page(site.url("/x"), FAST)


def test_missing_robots_means_allow_all(stub_site):
    site = stub_site({"/x": html("ok")})
    assert "ok" in fetch_page(site.url("/x"), FAST).body


def test_user_agent_sent(stub_site):
    site = stub_site({"/x": html("ok")})
    fetch_page(site.url("/x"), CrawlPolicy(per_host_delay=0, user_agent="tester/9"))
    assert {h.user_agent for h in site.hits} == {"tester/9"}


def test_per_host_delay(stub_site):
    site = stub_site(ten_page_site())
    session = CrawlSession(CrawlPolicy(per_host_delay=0.3))
    session.fetch(site.url("/p1"))
    session.fetch(site.url("/p2"))
    assert len(site.hits) == 3  # robots.txt, p1, p2
    assert site.min_gap() >= 0.3


def test_http_error(stub_site):
    site = stub_site({})
    with pytest.raises(HttpError) as info:
        fetch_page(site.url("/missing"), FAST)
    assert info.value.status == 404


def test_timeout(stub_site):
    def slow():
        time.sleep(1.0)
        return html("late")

    site = stub_site({"/slow": slow})
    with pytest.raises(FetchTimeout):
        fetch_page(site.url("/slow"), CrawlPolicy(per_host_delay=0, timeout=0.2, obey_robots=False))


def test_redirects(stub_site):
    routes = {f"/r{i}": redirect(f"/r{i + 1}") for i in range(10)}
    routes["/r10"] = html("end")
    site = stub_site(routes)
    assert fetch_page(site.url("/r5"), FAST).url == site.url("/r10")
    with pytest.raises(TooManyRedirects):
        fetch_page(site.url("/r0"), FAST)
    assert "/r6" not in site.paths()[site.paths().index("/r0"):]  # stopped after five hops


def test_redirect_hops_are_paced(stub_site):
    site = stub_site({"/a": redirect("/b"), "/b": redirect("/c"), "/c": html("c")})
    fetch_page(site.url("/a"), CrawlPolicy(per_host_delay=0.2))
    assert site.paths() == ["/robots.txt", "/a", "/b", "/c"]
    assert site.min_gap() >= 0.2


def test_non_http_url():
    with pytest.raises(Exception):
        fetch_page("ftp://example.test/x", FAST)


def test_policy_validation():
    with pytest.raises(ValueError):
        CrawlPolicy(per_host_delay=-1)
    with pytest.raises(ValueError):
        CrawlPolicy(max_pages=0)


# --- crawling --------------------------------------------------------------------------


def test_depth_zero_two_svgs(stub_site, tmp_path):
    site = stub_site({"/": html(svg_block(1) + svg_block(2) + '<a href="/next">n</a>'), "/next": html(svg_block(3))})
    entries = crawl([site.url("/")], CrawlPolicy(max_depth=0, per_host_delay=0), CorpusStore(tmp_path))
    assert len(entries) == 2
    assert "/next" not in site.paths()
    assert all(e.source_url == site.url("/") for e in entries)


def test_budget_on_ten_page_site(stub_site, tmp_path):
    site = stub_site(ten_page_site())
    entries = crawl([site.url("/p0")], CrawlPolicy(max_pages=5, max_depth=3, per_host_delay=0), CorpusStore(tmp_path))
    assert len(site.page_hits()) == 5
    assert len(entries) == 5


def test_crawl_twice_is_idempotent(stub_site, tmp_path):
    site = stub_site(ten_page_site())
    policy = CrawlPolicy(max_pages=20, max_depth=2, per_host_delay=0)
    first = crawl([site.url("/p0")], policy, CorpusStore(tmp_path))
    manifest = (tmp_path / "manifest.jsonl").read_bytes()
    second = crawl([site.url("/p0")], policy, CorpusStore(tmp_path))
    assert (tmp_path / "manifest.jsonl").read_bytes() == manifest
    assert first == second
    assert len(manifest.splitlines()) == 10


def test_errors_are_logged_not_fatal(stub_site, tmp_path):
    site = stub_site({
        "/robots.txt": robots("User-agent: *\nDisallow: /no\n"),
        "/": html('<a href="/gone">x</a><a href="/no">y</a><a href="/ok">z</a>'),
        "/ok": html(svg_block(4)),
    })
    entries = crawl([site.url("/")], CrawlPolicy(per_host_delay=0), CorpusStore(tmp_path))
    assert len(entries) == 1
    log = (tmp_path / "crawl.log").read_text()
    assert "HttpError" in log and "RobotsDisallowed" in log


def test_same_host_filter(stub_site, tmp_path):
    other = stub_site({"/": html(svg_block(8))})
    site = stub_site({"/": html(svg_block(7) + f'<a href="{other.url("/")}">x</a>')})
    crawl([site.url("/")], CrawlPolicy(per_host_delay=0), CorpusStore(tmp_path / "a"))
    assert other.hits == []
    crawl([site.url("/")], CrawlPolicy(per_host_delay=0, same_host_only=False), CorpusStore(tmp_path / "b"))
    assert other.page_hits()


def test_crawl_marks_animation(stub_site, tmp_path):
    site = stub_site({"/": html("<svg><circle r='1'><animate attributeName='r'/></circle></svg>")})
    (entry,) = crawl([site.url("/")], CrawlPolicy(per_host_delay=0), CorpusStore(tmp_path))
    assert entry.excluded == EXCLUDED_ANIMATION and entry.label is None


def test_parallel_crawl_stays_polite(stub_site, tmp_path):
    site = stub_site(ten_page_site())
    crawl([site.url("/p0")], CrawlPolicy(max_pages=4, per_host_delay=0.15), CorpusStore(tmp_path), jobs=4)
    assert len(site.page_hits()) == 4
    assert site.min_gap() >= 0.15


def test_crawl_needs_seeds(tmp_path):
    with pytest.raises(ValueError):
        crawl([], FAST, CorpusStore(tmp_path))


# --- store and ingest ---------------------------------------------------------------------


def test_store_dedup_and_layout(tmp_path):
    store = CorpusStore(tmp_path)
    a = store.add("<svg/>", "http://x/1")
    b = store.add("<svg/>", "http://x/2", label="bar")
    assert a.id == b.id == content_id("<svg/>") and len(store) == 1
    assert b.label == "bar" and b.source_url == "http://x/1"
    assert (tmp_path / a.svg_path).read_text() == "<svg/>"
    assert a.svg_path == f"objects/{a.id}.svg"
    store.flush()
    reloaded = CorpusStore(tmp_path)
    assert reloaded.entries() == store.entries()


def test_excluded_entries_carry_no_label(tmp_path):
    store = CorpusStore(tmp_path)
    e = store.add("<svg><script/></svg>", "u", EXCLUDED_ANIMATION, label="bar")
    assert e.label is None
    assert store.add("<svg><script/></svg>", "u", EXCLUDED_ANIMATION, label="bar").label is None


def test_manifest_sorted_one_json_per_line(tmp_path):
    store = CorpusStore(tmp_path)
    for i in range(5):
        store.add(f"<svg id='{i}'/>", f"u{i}")
    store.flush()
    lines = (tmp_path / "manifest.jsonl").read_text().splitlines()
    ids = [json.loads(l)["id"] for l in lines]
    assert ids == sorted(ids)
    assert CorpusEntry.from_json(lines[0]).to_json() == lines[0]


def _svg_dir(tmp_path, files):
    d = tmp_path / "svgs"
    d.mkdir()
    for name, text in files.items():
        (d / name).write_text(text)
    return d


def test_ingest_with_partial_labels(tmp_path):
    d = _svg_dir(tmp_path, {f"{n}.svg": f'<svg width="1" height="1"><circle r="{i}"/></svg>' for i, n in enumerate("abc")})
    (tmp_path / "labels.tsv").write_text("a.svg\tbar\nb.svg\tpie\nzzz.svg\tline\n")
    store = CorpusStore(tmp_path / "corpus")
    entries = ingest(d, tmp_path / "labels.tsv", store)
    assert len(entries) == 3
    assert sorted(e.label for e in entries if e.label) == ["bar", "pie"]
    assert all(e.source_url.startswith("file://") for e in entries)


def test_ingest_skips_malformed(tmp_path):
    d = _svg_dir(tmp_path, {"bad.svg": "<svg><rect></svg>", "html.svg": "<html/>", "note.txt": "<svg/>"})
    store = CorpusStore(tmp_path / "corpus")
    assert ingest(d, None, store) == []
    assert (tmp_path / "corpus" / "crawl.log").read_text().count("skip") == 2


def test_reingest_is_unchanged(tmp_path):
    d = _svg_dir(tmp_path, {"a.svg": "<svg/>", "b.svg": "<svg><rect/></svg>", "c.svg": "<svg/>"})
    ingest(d, {"a.svg": "x"}, CorpusStore(tmp_path / "corpus"))
    before = (tmp_path / "corpus" / "manifest.jsonl").read_bytes()
    ingest(d, {"a.svg": "x"}, CorpusStore(tmp_path / "corpus"))
    assert (tmp_path / "corpus" / "manifest.jsonl").read_bytes() == before
    assert len(before.splitlines()) == 2  # a and c have identical bytes


def test_ingest_missing_directory(tmp_path):
    with pytest.raises(NotADirectoryError):
        ingest(tmp_path / "nope", None, CorpusStore(tmp_path / "c"))


def test_read_labels(tmp_path):
    p = tmp_path / "l.tsv"
    p.write_text("# comment\n\na.svg\tbar\n b.svg \t line \n")
    assert read_labels(p) == {"a.svg": "bar", "b.svg": "line"}
    p.write_text("a.svg bar\n")
    with pytest.raises(ValueError):
        read_labels(p)
