"""Build review strings whose flag spans are known by construction.

Each string is assembled from pieces; URL pieces and non-ASCII characters are
annotated as they are placed, so the expected flags never come from a detector.
Offsets are code points.
"""
import json
import random
import sys
from pathlib import Path

ASCII_WORDS = ["Gandhi", "was", "born", "in", "1869", "the", "model", "asks", "about",
               "India", "Porbandar", "lawyer", "campaign", "salt", "march", "(1930)",
               "it", "rains", "today", "and", "questions", "answers", "--", "e.g.", "x"]
NON_ASCII_WORDS = ["café", "naïve", "résumé", "Zürich", "São", "Paulo", "façade",
                   "日本語", "naïveté", "£100", "coöperate", "\U0001f600",
                   "—", "¿qué?", "Ω", "“quoted”", "straße"]
URLS = ["http://x.io", "https://example.org/path?q=1", "www.wikipedia.org/wiki/Gandhi",
        "HTTPS://Upper.case/Path", "http://example.com/café", "www.a.b/c_d-e",
        "https://en.wikipedia.org/wiki/Salt_March#History"]
TRAILERS = ["", ".", ",", ")", "?", "!", ";", ":", "\"", "'", "]."]
SEPARATORS = [" ", " ", " ", "  ", "\n", "\t", " "]


def build(rng: random.Random):
    text = []
    flags = []
    non_ascii = []
    length = 0

    def put(piece, is_url=False):
        nonlocal length
        if is_url:
            flags.append({"kind": "url", "start": length, "end": length + len(piece)})
        else:
            non_ascii.extend(length + k for k, ch in enumerate(piece) if ord(ch) > 127)
        text.append(piece)
        length += len(piece)

    for k in range(rng.randint(1, 9)):
        if k:
            sep = rng.choice(SEPARATORS)
            # A non-breaking space right after a URL would still end it, but keep
            # the run structure simple by using plain spaces there.
            put(" " if text and flags and flags[-1]["end"] == length else sep)
        roll = rng.random()
        if roll < 0.25:
            put(rng.choice(URLS), is_url=True)
            put(rng.choice(TRAILERS))
        elif roll < 0.6:
            put(rng.choice(NON_ASCII_WORDS))
        else:
            put(rng.choice(ASCII_WORDS))
    # Maximal runs of consecutive non-ASCII code points outside URLs.
    runs = []
    for pos in non_ascii:
        if runs and runs[-1][1] == pos:
            runs[-1][1] = pos + 1
        else:
            runs.append([pos, pos + 1])
    flags += [{"kind": "non_ascii", "start": s, "end": e} for s, e in runs]
    flags.sort(key=lambda f: (f["start"], f["end"]))
    return "".join(text), flags


def main(out: Path) -> None:
    rng = random.Random(7)
    fixed = [
        ("Gandhi was born in 1869.", []),
        ("café at http://x.io today", [{"kind": "non_ascii", "start": 3, "end": 4},
                                       {"kind": "url", "start": 8, "end": 19}]),
        ("naïve résumé", [{"kind": "non_ascii", "start": 2, "end": 3},
                          {"kind": "non_ascii", "start": 7, "end": 8},
                          {"kind": "non_ascii", "start": 11, "end": 12}]),
    ]
    rows = [{"text": t, "flags": f} for t, f in fixed]
    while len(rows) < 50:
        text, flags = build(rng)
        if text.strip():
            rows.append({"text": text, "flags": flags})
    with out.open("w") as f:
        for row in rows:
            f.write(json.dumps(row, ensure_ascii=True) + "\n")


if __name__ == "__main__":
    main(Path(sys.argv[1]))
