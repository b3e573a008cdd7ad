"""Freeze original-algorithm Porter stems from NLTK as a test fixture."""
import re
import sys
from pathlib import Path

from nltk.stem.porter import PorterStemmer

EXTRA = """caresses ponies ties caress cats feed agreed plastered bled motoring sing
conflated troubled sized hopping tanned falling hissing fizzed failing filing happy sky
relational conditional rational valenci hesitanci digitizer conformabli radicalli
differentli vileli analogousli vietnamization predication operator feudalism
decisiveness hopefulness callousness formaliti sensitiviti sensibiliti triplicate
formative formalize electriciti electrical hopeful goodness revival allowance inference
airliner gyroscopic adjustable defensible irritant replacement adjustment dependent
adoption homologou communism activate angulariti homologous effective bowdlerize probate
rate cease controll roll generalization switching switches running shoes""".split()


def main(out: Path) -> None:
    words = set(EXTRA)
    for source in sys.argv[2:]:
        words.update(w.lower() for w in re.findall(r"[A-Za-z]+", Path(source).read_text()))
    stemmer = PorterStemmer(mode=PorterStemmer.ORIGINAL_ALGORITHM)
    with out.open("w") as f:
        # Words of one or two letters are left alone by the reference
        # implementation; NLTK's original mode strips them, so skip them here.
        for w in sorted(x for x in words if len(x) > 2):
            f.write(f"{w}\t{stemmer.stem(w, to_lowercase=False)}\n")


if __name__ == "__main__":
    main(Path(sys.argv[1]))
