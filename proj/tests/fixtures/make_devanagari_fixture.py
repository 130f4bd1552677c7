"""Build devanagari_words.tsv (devanagari<TAB>slp1) from SLP1 word sources.

Devanagari is spelled out from Unicode character names, independently of the
C++ codec, so the fixture can check both directions.

usage: make_devanagari_fixture.py LEXICON CORPUS OUT [COUNT]
"""
import sys
import unicodedata

VOWELS = {
    "a": "A", "A": "AA", "i": "I", "I": "II", "u": "U", "U": "UU",
    "f": "VOCALIC R", "F": "VOCALIC RR", "x": "VOCALIC L", "X": "VOCALIC LL",
    "e": "E", "E": "AI", "o": "O", "O": "AU",
}
CONSONANTS = {
    "k": "KA", "K": "KHA", "g": "GA", "G": "GHA", "N": "NGA",
    "c": "CA", "C": "CHA", "j": "JA", "J": "JHA", "Y": "NYA",
    "w": "TTA", "W": "TTHA", "q": "DDA", "Q": "DDHA", "R": "NNA",
    "t": "TA", "T": "THA", "d": "DA", "D": "DHA", "n": "NA",
    "p": "PA", "P": "PHA", "b": "BA", "B": "BHA", "m": "MA",
    "y": "YA", "r": "RA", "l": "LA", "L": "LLA", "v": "VA",
    "S": "SHA", "z": "SSA", "s": "SA", "h": "HA",
}
SIGNS = {"M": "ANUSVARA", "H": "VISARGA", "~": "CANDRABINDU", "'": "AVAGRAHA"}


def ch(name):
    return unicodedata.lookup("DEVANAGARI " + name)


def to_devanagari(word):
    out = []
    for k, c in enumerate(word):
        nxt = word[k + 1] if k + 1 < len(word) else None
        prev = word[k - 1] if k > 0 else None
        if c in CONSONANTS:
            out.append(ch("LETTER " + CONSONANTS[c]))
            if nxt not in VOWELS:
                out.append(ch("SIGN VIRAMA"))
        elif c in VOWELS:
            if prev in CONSONANTS:
                if c != "a":
                    out.append(ch("VOWEL SIGN " + VOWELS[c]))
            else:
                out.append(ch("LETTER " + VOWELS[c]))
        elif c in SIGNS:
            out.append(ch("SIGN " + SIGNS[c]))
        else:
            raise ValueError(f"not SLP1: {c!r} in {word!r}")
    return "".join(out)


EXTRA = ["kxpta", "pitFn", "kfzRa", "SrI", "oM", "saMskftam", "so'ham", "agnimILe",
         "XkAra", "Ekya", "OzaDa", "haMsa~", "cA~drI", "tejaH", "vAk", "samrAw",
         "jYAnam", "kzatriya", "Wakkura", "QOkate", "PalaM", "GaRwA", "NaNa", "YakAra"]


def main():
    lexicon, corpus, out = sys.argv[1:4]
    count = int(sys.argv[4]) if len(sys.argv) > 4 else 500
    words = []
    seen = set()

    def add(w):
        if w and w not in seen:
            seen.add(w)
            words.append(w)

    for w in EXTRA:
        add(w)
    with open(lexicon, encoding="utf-8") as f:
        for line in f:
            line = line.strip()
            if line and not line.startswith("#"):
                add(line.split("\t")[0])
    with open(corpus, encoding="utf-8") as f:
        for line in f:
            if len(words) >= count:
                break
            add(line.rstrip("\n").split("\t")[2])
    words = words[:count]
    with open(out, "w", encoding="utf-8") as f:
        for w in words:
            f.write(f"{to_devanagari(w)}\t{w}\n")


if __name__ == "__main__":
    main()
