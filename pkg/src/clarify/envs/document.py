"""Single-document editor with page-level operations.

State: ``filename``, ``pages`` (list of page records with ``text`` and
annotation lists), ``password``, ``watermark`` and ``outputs`` (names of
files written so far). The page count is ``len(pages)``.
"""

from __future__ import annotations

import copy
from functools import lru_cache

from ..schema import EMPTY, Boolean, Finite, ListOf, NumericRange, Text, ToolSchema, Toolkit
from .base import DomainUpdateRule, Environment, ExecutionError, P

FORMATS = ("pptx", "doc", "png", "jpeg", "tiff")
POSITIONS = ("top-left", "top-middle", "top-right", "bottom-left", "bottom-middle", "bottom-right")
MAX_PAGES = 1000

_RANGE_TOOLS = (
    "redact_page_range", "redact_text", "highlight_text", "underline_text", "extract_pages", "delete_page_range",
)
_TEXT_MARK_TOOLS = {"redact_text": "redactions", "highlight_text": "highlights", "underline_text": "underlines"}


def _page():
    return NumericRange(1, MAX_PAGES, True)


@lru_cache(maxsize=None)
def toolkit() -> Toolkit:
    overwrite = P("overwrite", Boolean())
    out_path = P("output_pathname", Text(), required=False, default=True)
    span = (P("start", _page(), dep=True), P("end", _page(), dep=True))
    words = P("object_name", ListOf(Text()))
    font = P("font_size", NumericRange(8, 72, True))
    return Toolkit((
        ToolSchema("convert", (
            P("format", Finite(FORMATS)),
            P("output_filename", Text()),
            P("zip", Boolean(), required=False, default=True),
        )),
        ToolSchema("add_comment", (
            P("page_num", _page(), dep=True),
            P("coordinates", ListOf(NumericRange(0, 1000))),
            font,
        )),
        ToolSchema("redact_page_range", span),
        ToolSchema("redact_text", span + (words, overwrite, out_path)),
        ToolSchema("highlight_text", span + (words, overwrite, out_path)),
        ToolSchema("underline_text", span + (words, overwrite, out_path)),
        ToolSchema("extract_pages", span + (overwrite, out_path)),
        ToolSchema("delete_page", (P("page_num", _page(), dep=True), overwrite, out_path)),
        ToolSchema("delete_page_range", span + (overwrite, out_path)),
        ToolSchema("add_signature", (
            P("page_num", _page(), dep=True),
            P("position", Finite(POSITIONS)),
            overwrite,
            out_path,
        )),
        ToolSchema("add_page_with_text", (
            P("text_content", Text()),
            font,
            P("page_num", NumericRange(1, MAX_PAGES + 1, True), dep=True),
        )),
        ToolSchema("add_watermark", (P("watermark_text", Text()), P("transparency", NumericRange(0.0, 1.0)))),
        ToolSchema("add_password", (P("password", Text()),)),
        ToolSchema("duplicate", (P("output_filename", Text()),)),
        ToolSchema("rename", (P("output_filename", Text()),)),
        ToolSchema("search", (P("object_name", Text()),)),
        ToolSchema("count_pages", ()),
        ToolSchema("compress_file", (P("output_filename", Text(), required=False, default=True),)),
    ))


# Calls that succeed on the fixture state, one fresh environment each.
SAMPLES = (
    ("convert", {"format": "png", "output_filename": "report_img", "zip": False}),
    ("delete_page", {"page_num": 3, "overwrite": True}),
    ("delete_page_range", {"start": 2, "end": 4, "overwrite": False, "output_pathname": "trimmed.pdf"}),
    ("extract_pages", {"start": 1, "end": 3, "overwrite": False, "output_pathname": "intro.pdf"}),
    ("add_signature", {"page_num": 10, "position": "bottom-right", "overwrite": True}),
    ("add_comment", {"page_num": 2, "coordinates": [100, 200], "font_size": 12}),
    ("highlight_text", {"start": 1, "end": 5, "object_name": ["Budget"], "overwrite": True}),
    ("underline_text", {"start": 3, "end": 3, "object_name": ["Methods"], "overwrite": False,
                        "output_pathname": "methods.pdf"}),
    ("redact_page_range", {"start": 7, "end": 8}),
    ("add_page_with_text", {"text_content": "Summary", "font_size": 14, "page_num": 11}),
    ("add_watermark", {"watermark_text": "DRAFT", "transparency": 0.3}),
    ("add_password", {"password": "s3cret"}),
    ("compress_file", {"output_filename": "report_small.pdf"}),
    ("duplicate", {"output_filename": "report_copy.pdf"}),
    ("rename", {"output_filename": "final.pdf"}),
)


class DocumentEnv(Environment):
    sample_table = SAMPLES
    name = "document"
    defaults = {t: {"output_pathname": None} for t in _RANGE_TOOLS + ("delete_page", "add_signature")}
    defaults = {**defaults, "convert": {"zip": False}, "compress_file": {"output_filename": None}}

    @classmethod
    def toolkit(cls) -> Toolkit:
        return toolkit()

    @property
    def num_pages(self) -> int:
        return len(self.state["pages"])

    def _page_domain(self, extra: int = 0):
        n = self.num_pages + extra
        return NumericRange(1, n, True) if n >= 1 else EMPTY

    def build_rules(self) -> list:
        changing = "delete_page|delete_page_range|extract_pages|add_page_with_text"
        aspects = [("add_comment", "page_num"), ("delete_page", "page_num"), ("add_signature", "page_num")]
        aspects += [(t, p) for t in _RANGE_TOOLS for p in ("start", "end")]
        return [
            DomainUpdateRule(changing, tuple(aspects), lambda s: self._page_domain(), "page count -> valid pages"),
            DomainUpdateRule(
                changing,
                (("add_page_with_text", "page_num"),),
                lambda s: self._page_domain(1),
                "page count -> insert positions",
            ),
        ]

    # -- helpers --------------------------------------------------------------

    @staticmethod
    def _span(start, end):
        if start > end:
            raise ExecutionError("out-of-range", f"start {start} is after end {end}", "start", "end")
        return int(start) - 1, int(end)

    def _write_out(self, param, name, default_suffix):
        name = name or self.state["filename"].rsplit(".", 1)[0] + default_suffix
        if name in self.state["outputs"] or name == self.state["filename"]:
            raise ExecutionError("duplicate", f"output file {name!r} already exists", param)
        self.state["outputs"].append(name)
        return name

    def _edit(self, overwrite, output_pathname, change):
        """Apply ``change`` to the pages, in place or into a new output file."""
        if overwrite:
            change(self.state["pages"])
            return self.state["filename"]
        pages = copy.deepcopy(self.state["pages"])
        change(pages)
        return self._write_out("output_pathname", output_pathname, "_edited.pdf")

    # -- tools ----------------------------------------------------------------

    def do_convert(self, format, output_filename, zip=False):
        name = f"{output_filename}.{format}" + (".zip" if zip else "")
        return self._write_out("output_filename", name, "")

    def do_add_comment(self, page_num, coordinates, font_size):
        if len(coordinates) != 2:
            raise ExecutionError("out-of-range", "coordinates must be an [x, y] pair", "coordinates")
        self.state["pages"][int(page_num) - 1]["comments"].append(
            {"at": list(coordinates), "font_size": font_size}
        )

    def do_redact_page_range(self, start, end):
        lo, hi = self._span(start, end)
        for page in self.state["pages"][lo:hi]:
            page["redacted"] = True

    def _mark(self, tool, start, end, object_name, overwrite, output_pathname):
        lo, hi = self._span(start, end)
        key = _TEXT_MARK_TOOLS[tool]

        def change(pages):
            for page in pages[lo:hi]:
                page[key].extend(w for w in object_name if w in page["text"])

        return self._edit(overwrite, output_pathname, change)

    def do_redact_text(self, start, end, object_name, overwrite, output_pathname=None):
        return self._mark("redact_text", start, end, object_name, overwrite, output_pathname)

    def do_highlight_text(self, start, end, object_name, overwrite, output_pathname=None):
        return self._mark("highlight_text", start, end, object_name, overwrite, output_pathname)

    def do_underline_text(self, start, end, object_name, overwrite, output_pathname=None):
        return self._mark("underline_text", start, end, object_name, overwrite, output_pathname)

    def do_extract_pages(self, start, end, overwrite, output_pathname=None):
        lo, hi = self._span(start, end)

        def change(pages):
            pages[:] = pages[lo:hi]

        return self._edit(overwrite, output_pathname, change)

    def do_delete_page(self, page_num, overwrite, output_pathname=None):
        def change(pages):
            del pages[int(page_num) - 1]

        return self._edit(overwrite, output_pathname, change)

    def do_delete_page_range(self, start, end, overwrite, output_pathname=None):
        lo, hi = self._span(start, end)

        def change(pages):
            del pages[lo:hi]

        return self._edit(overwrite, output_pathname, change)

    def do_add_signature(self, page_num, position, overwrite, output_pathname=None):
        def change(pages):
            pages[int(page_num) - 1]["signature"] = position

        return self._edit(overwrite, output_pathname, change)

    def do_add_page_with_text(self, text_content, font_size, page_num):
        page = {"text": text_content, "comments": [], "highlights": [], "underlines": [], "redactions": []}
        page["font_size"] = font_size
        self.state["pages"].insert(int(page_num) - 1, page)

    def do_add_watermark(self, watermark_text, transparency):
        self.state["watermark"] = {"text": watermark_text, "transparency": transparency}

    def do_add_password(self, password):
        self.state["password"] = password

    def do_duplicate(self, output_filename):
        return self._write_out("output_filename", output_filename, "")

    def do_rename(self, output_filename):
        if output_filename in self.state["outputs"]:
            raise ExecutionError("duplicate", f"{output_filename!r} already exists", "output_filename")
        self.state["filename"] = output_filename

    def do_search(self, object_name):
        return [i + 1 for i, p in enumerate(self.state["pages"]) if object_name in p["text"]]

    def do_count_pages(self):
        return self.num_pages

    def do_compress_file(self, output_filename=None):
        return self._write_out("output_filename", output_filename, "_compressed.pdf")
