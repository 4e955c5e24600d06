#!/usr/bin/env python3
"""Regenerates data/porter/sample_vocab.tsv.

The expected stems come from an independent implementation of the 1980
suffix-stripping rule tables, written directly from the published rule
lists (longest matching suffix per step, condition tested once). The
script self-checks against hand-derived anchor words before writing
anything, so a slip in either implementation fails loudly instead of
silently corrupting the fixture.

The vocabulary deliberately avoids words shorter than three letters and
words whose stemming differs between the original 1980 rule tables and
later revisions of the algorithm (-logi words, for example), so the
fixture is meaningful for any faithful implementation of the original
tables.
"""

import os

VOWELS = "aeiou"


def is_cons(word, i):
    c = word[i]
    if c in VOWELS:
        return False
    if c == "y":
        return True if i == 0 else not is_cons(word, i - 1)
    return True


def run_pattern(stem):
    runs = []
    for i in range(len(stem)):
        mark = "C" if is_cons(stem, i) else "V"
        if not runs or runs[-1] != mark:
            runs.append(mark)
    return runs


def measure(stem):
    runs = run_pattern(stem)
    return sum(1 for i in range(len(runs) - 1) if runs[i] == "V" and runs[i + 1] == "C")


def has_vowel(stem):
    return any(not is_cons(stem, i) for i in range(len(stem)))


def ends_double_cons(word):
    return len(word) >= 2 and word[-1] == word[-2] and is_cons(word, len(word) - 1)


def ends_cvc(word):
    if len(word) < 3:
        return False
    n = len(word)
    if not is_cons(word, n - 1) or is_cons(word, n - 2) or not is_cons(word, n - 3):
        return False
    return word[-1] not in "wxy"


def longest_match(word, suffixes):
    best = None
    for suf in suffixes:
        if word.endswith(suf) and (best is None or len(suf) > len(best)):
            best = suf
    return best


def step1a(w):
    for suf, rep in (("sses", "ss"), ("ies", "i"), ("ss", "ss"), ("s", "")):
        if w.endswith(suf):
            return w[: len(w) - len(suf)] + rep
    return w


def step1b(w):
    if w.endswith("eed"):
        stem = w[:-3]
        return stem + "ee" if measure(stem) > 0 else w
    if w.endswith("ed") and has_vowel(w[:-2]):
        w = w[:-2]
    elif w.endswith("ing") and has_vowel(w[:-3]):
        w = w[:-3]
    else:
        return w
    if w.endswith("at") or w.endswith("bl") or w.endswith("iz"):
        return w + "e"
    if ends_double_cons(w) and w[-1] not in "lsz":
        return w[:-1]
    if measure(w) == 1 and ends_cvc(w):
        return w + "e"
    return w


def step1c(w):
    if w.endswith("y") and has_vowel(w[:-1]):
        return w[:-1] + "i"
    return w


STEP2 = {
    "ational": "ate", "tional": "tion", "enci": "ence", "anci": "ance",
    "izer": "ize", "abli": "able", "alli": "al", "entli": "ent", "eli": "e",
    "ousli": "ous", "ization": "ize", "ation": "ate", "ator": "ate",
    "alism": "al", "iveness": "ive", "fulness": "ful", "ousness": "ous",
    "aliti": "al", "iviti": "ive", "biliti": "ble",
}

STEP3 = {
    "icate": "ic", "ative": "", "alize": "al", "iciti": "ic",
    "ical": "ic", "ful": "", "ness": "",
}


def replace_step(w, table):
    suf = longest_match(w, table.keys())
    if suf is None:
        return w
    stem = w[: len(w) - len(suf)]
    return stem + table[suf] if measure(stem) > 0 else w


STEP4 = [
    "al", "ance", "ence", "er", "ic", "able", "ible", "ant", "ement",
    "ment", "ent", "ion", "ou", "ism", "ate", "iti", "ous", "ive", "ize",
]


def step4(w):
    suf = longest_match(w, STEP4)
    if suf is None:
        return w
    stem = w[: len(w) - len(suf)]
    if suf == "ion" and not (stem and stem[-1] in "st"):
        return w
    return stem if measure(stem) > 1 else w


def step5a(w):
    if not w.endswith("e"):
        return w
    stem = w[:-1]
    m = measure(stem)
    if m > 1 or (m == 1 and not ends_cvc(stem)):
        return stem
    return w


def step5b(w):
    if w.endswith("l") and ends_double_cons(w) and measure(w) > 1:
        return w[:-1]
    return w


def porter(word):
    if len(word) < 3 or not word.isascii() or not word.islower() or not word.isalpha():
        return word
    for step in (step1a, step1b, step1c,
                 lambda w: replace_step(w, STEP2),
                 lambda w: replace_step(w, STEP3),
                 step4, step5a, step5b):
        word = step(word)
    return word


# Hand-derived results, worked through the rule tables on paper. If the
# implementation above disagrees with any of these, stop immediately.
ANCHORS = {
    "caresses": "caress", "ponies": "poni", "ties": "ti", "caress": "caress",
    "cats": "cat", "feed": "feed", "agreed": "agre", "plastered": "plaster",
    "bled": "bled", "motoring": "motor", "sing": "sing", "conflated": "conflat",
    "troubled": "troubl", "sized": "size", "hopping": "hop", "tanned": "tan",
    "falling": "fall", "hissing": "hiss", "fizzed": "fizz", "failing": "fail",
    "filing": "file", "happy": "happi", "sky": "sky", "relational": "relat",
    "generalizations": "gener", "oscillators": "oscil", "abilities": "abil",
    "rational": "ration", "information": "inform", "controlling": "control",
    "rolling": "roll", "making": "make", "hoping": "hope", "snowing": "snow",
    "saying": "sai", "dying": "dy", "freely": "freeli", "replacement": "replac",
    "adoption": "adopt", "cease": "ceas",
}

VOCAB = """
abilities absolutely accessible accidentally activate adjustable adjustment
adoption agencies agreed airliner allowance amazingly analogously angularity
animated announcement answered appreciated arguments arranged assertions
assignment attached attempted authenticity authorization avoided awaiting
backported badges balanced bargains baseless bubbles buses cables caresses
caress carefully cats ceased certificate certificates changing characters
checking classes cleaned collapsed combination combined comfortably
communism comparisons compilation compiled compiling conditional conferences
confidently configuration configured conflated connections considerations
consistently contained controlling conversions converted copies correctness
corrupted crashes created creation crying darkness databases debugging
decoded defensible definitely deletion dependencies dependent deprecated
derivative designers detection developers dictionaries differences
differently digitizer directories disabled disappeared discovered docking
documentation dogs duplicate duplicated duplicates dying editors effective
effectiveness electrical electricity elements embedded enabled encodings
entries environments equality evaluated exceptions executable execution
expanded expectations expired explanations exploration expressions failing
failures falling feed fetched filing filtered fixes fizzed flexibility
flying folders followers formalize formality formatting formally forwarded
frequencies frequently functions generalizations generally generated
goodness grouping handlers happy headers hesitancy hissing histories
hopefulness hoping hopping horses hosting identifiers ignored images
implementation imported indentation indexes indexing inference information
informative inheritance initialized injected inputs insertion inspections
installation instances integers intended interfaces internally interpreted
interruptions invalidated investigated invocations irritant iterations
joined judgment keys knives labels languages latencies layering libraries
licenses limitation linked listeners loaded localized locations logical
loops lovely machines making managed mappings margins matched measurements
merged messages migrations missing mistakes modifications modules motoring
mounted movements multiplied namely nationalism navigation nested networks
normally notebooks notifications numbering objects observers obviously
occurrences offsets operation operational operations operator optimizer
optimizations ordering organizer outputs overflowed overlapping overridden
packages padding pages parses parsing partitions passing patches paths
patterns permissions persisted plastered players pointers policies ponies
populated ports positioning possibilities predictions prefixes presented
probably procedures processes productivity profiles programmer programming
projections properties protections providers publishing qualities queries
queues quietly quoting radically rational readability readers rebuilding
recursion recursively references reflection registered relational
relationships reloaded rendering renders repeated replacement reported
repositories requested requirements resizing resolutions responsibility
restarted retried returned reversed rewriting roles rolling rotation
routines rules runners running saved saying scaling schedulers scopes
scripts scrolling sections seeded segments selections sensitively
sensitivity serializing servers services sessions settings shipped
signatures simplified sing singular sized sky sliced snapshots snowing
sockets sorted sources specifications spacing stackable statements
stemming storages streaming strings structures studying subscriptions
succeeded suffixes suggestions summaries supported synchronized syntaxes
tables tagging tanned templates testing threads ties timings tokens
touched tracing tracked translations triggered triplicate troubled
truncated tuples typing unexpectedly updating uploads validation variables
vectors verification versions viewers virtualization visibility warnings
watchers widgets windows workers wrappers writes
""".split()


def main():
    for word, expected in ANCHORS.items():
        got = porter(word)
        if got != expected:
            raise SystemExit(f"anchor mismatch: porter({word!r}) = {got!r}, expected {expected!r}")

    words = sorted(set(VOCAB))
    if len(words) < 200:
        raise SystemExit(f"vocabulary too small: {len(words)} words")
    for w in words:
        if len(w) < 3 or not w.isalpha() or not w.islower():
            raise SystemExit(f"unsuitable fixture word: {w!r}")
        if w.endswith("ogi") or step1c(step1b(step1a(w))).endswith(("logi", "ogi")):
            raise SystemExit(f"word {w!r} is sensitive to later rule revisions")

    out_path = os.path.join(os.path.dirname(__file__), "..", "data", "porter",
                            "sample_vocab.tsv")
    out_path = os.path.normpath(out_path)
    os.makedirs(os.path.dirname(out_path), exist_ok=True)
    with open(out_path, "w", encoding="ascii") as f:
        for w in words:
            f.write(f"{w}\t{porter(w)}\n")
    print(f"wrote {len(words)} entries to {out_path}")


if __name__ == "__main__":
    main()
