"""Extract plain-text UDHR fixtures from the `udhr` npm package.

Usage: python3 scripts/extract_udhr.py <path-to-udhr-package>/declaration <out-dir>

Writes one UTF-8 file per language: the text content of every heading,
paragraph and list item, one element per line.
"""
import html.parser
import pathlib
import sys

CODES = ["eng", "afr", "zul", "xho", "nbl", "nso", "sot", "tsn", "sna", "swh", "nyn", "kmb"]
BLOCKS = {"h1", "h2", "h3", "h4", "p", "li"}


class Blocks(html.parser.HTMLParser):
    def __init__(self):
        super().__init__()
        self.lines = []
        self.current = None

    def handle_starttag(self, tag, attrs):
        if tag in BLOCKS:
            self.current = []

    def handle_endtag(self, tag):
        if tag in BLOCKS and self.current is not None:
            line = " ".join("".join(self.current).split())
            if line:
                self.lines.append(line)
            self.current = None

    def handle_data(self, data):
        if self.current is not None:
            self.current.append(data)


def main(src, out):
    out = pathlib.Path(out)
    out.mkdir(parents=True, exist_ok=True)
    for code in CODES:
        parser = Blocks()
        parser.feed((pathlib.Path(src) / f"{code}.html").read_text(encoding="utf-8"))
        (out / f"{code}.txt").write_text("\n".join(parser.lines) + "\n", encoding="utf-8")


if __name__ == "__main__":
    main(sys.argv[1], sys.argv[2])
