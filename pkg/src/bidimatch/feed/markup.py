"""Best-effort HTML cleanup for raw job ads."""

from __future__ import annotations

from html.parser import HTMLParser

_SKIPPED_ELEMENTS = {"script", "style"}


class _TextExtractor(HTMLParser):
    def __init__(self) -> None:
        super().__init__(convert_charrefs=True)
        self.chunks: list[str] = []
        self._skip_depth = 0

    def handle_starttag(self, tag, attrs):
        if tag in _SKIPPED_ELEMENTS:
            self._skip_depth += 1

    def handle_endtag(self, tag):
        if tag in _SKIPPED_ELEMENTS and self._skip_depth > 0:
            self._skip_depth -= 1

    def handle_data(self, data):
        if self._skip_depth == 0 and data:
            self.chunks.append(data)


def clean_markup(payload: str) -> str:
    """Strip tags, drop script/style bodies, decode entities, collapse space.

    Malformed markup is handled best-effort; plain text passes through.
    """
    parser = _TextExtractor()
    parser.feed(payload)
    parser.close()
    return " ".join(" ".join(parser.chunks).split())
