#!/usr/bin/env python3
"""Regenerates the toy corpus, connotation lexicon and mock infiller table.

The infiller table is keyed by the exact masked sentence the rewriter sends,
so this script replays the left-to-right rewrite to know each context.
Run from anywhere; files are written next to this script.
"""
import json
import os

HERE = os.path.dirname(os.path.abspath(__file__))

CONNOTATION = [
    ("prepare", "anticipation"),
    ("real", "trust"),
    ("defense", "anticipation;anger;fear"),
    ("resources", "joy;trust"),
    ("safety", "trust"),
    ("threat", "fear"),
    ("threat", "anger"),  # duplicate row, unions to anger;fear
    ("danger", "fear"),
    ("attack", "anger;fear"),
    ("crisis", "fear;sadness"),
    ("war", "anger;fear;sadness"),
    ("hope", "anticipation;joy;trust"),
    ("honest", "trust"),
    ("truthful", "trust"),
    ("corrupt", "anger;disgust"),
    ("failure", "sadness;disgust"),
    ("success", "anticipation;joy"),
    ("protect", "trust;fear"),
    ("secure", "trust"),
    ("violence", "anger;fear;disgust"),
    ("tax", "anger;sadness"),
    ("money", "anticipation;anger;joy;surprise;trust"),
    ("freedom", "joy;trust"),
    ("community", "trust"),
    ("leaders", "trust"),
    ("poverty", "anger;fear;sadness"),
    ("crime", "anger;fear;sadness"),
    ("police", "trust;fear"),
    ("policy", "neutral"),
    ("soft power", "trust"),  # multi-token, skipped by the loader
]

# Infiller candidates per original word, best first. Echoes, punctuation and
# sub-word pieces are included on purpose; the rewriter must filter them.
SUBSTITUTES = {
    "prepare": [("prepare", 9.0), ("plan", 5.0), ("train", 3.0)],
    "real": [("real", 8.0), (",", 6.0), ("your", 4.0)],
    "defense": [("Defense", 9.0), ("safety", 7.0)],
    "resources": [("##s", 9.0), ("tools", 5.0)],
    "threat": [("threat", 9.0), ("danger", 6.0), ("risk", 4.0)],
    "danger": [("danger", 9.0), ("threat", 5.0)],
    "attack": [("attack", 9.0), ("assault", 6.0)],
    "crisis": [("crisis", 9.0), ("challenge", 5.0)],
    "war": [("war", 9.0), ("conflict", 5.0)],
    "hope": [("hope", 9.0), ("expect", 5.0)],
    "honest": [("honest", 9.0), ("truthful", 5.0)],  # same set: never accepted
    "corrupt": [("corrupt", 9.0), ("broken", 5.0)],
    "failure": [("failure", 9.0), ("setback", 5.0)],
    "success": [("success", 9.0), ("progress", 5.0)],
    "protect": [("protect", 9.0), ("guard", 5.0)],
    "secure": [("secure", 9.0), ("safe", 5.0)],
    "violence": [("violence", 9.0), ("unrest", 5.0)],
    "tax": [("tax", 9.0), ("levy", 5.0)],
    "money": [("money", 9.0), ("resources", 5.0)],
    "freedom": [("freedom", 9.0), ("liberty", 5.0)],
    "community": [("community", 9.0), ("neighborhood", 5.0)],
    "leaders": [("leaders", 9.0), ("officials", 5.0)],
    "poverty": [("poverty", 9.0), ("hardship", 5.0)],
    "crime": [("crime", 9.0), ("theft", 5.0)],
    "police": [("police", 9.0), ("officers", 5.0)],
}

SENTENCES = [
    "Cities must prepare , since real defense starts at home .",
    "Public money matters because resources shape every school .",
    "The threat is growing since leaders ignore the evidence .",
    "Studies show that poverty drives crime in many regions .",
    "Police presence helps because it can protect local shops .",
    "Since the war ended , the community has rebuilt its roads .",
    "The evidence shows that violence falls when jobs return .",
    "Honest leaders matter because voters reward them over time .",
    "Given the crisis , hospitals need more nurses and beds .",
    "The tax burden grows since wages stayed flat for years .",
    "Corrupt officials fail because nobody checks their budgets .",
    "Freedom of speech matters since ideas need open debate .",
    "The attack happened because the border was poorly watched .",
    "Due to the danger , families left the valley last spring .",
    "This policy is a failure because prices kept rising .",
    "The program was a success since enrollment doubled .",
    "Secure elections matter because trust depends on them .",
    "For example , the city spent its money on new parks .",
    "There is hope because young voters are turning out .",
    "Schools improved since teachers received better training .",
    "Crime dropped in the district because lighting improved .",
    "The community garden thrives since neighbors share tools .",
    "Leaders met since the crisis required a quick response .",
    "Evidence suggests that police training reduces violence .",
    "Farmers struggle because the drought destroyed their crops .",
    "The river flooded since heavy rain fell for a week .",
    "Prices rose because supply chains broke down last year .",
    "Given the threat of war , allies signed a new treaty .",
    "Tourism grew since the museum opened a new wing .",
    "The bridge closed because engineers found deep cracks .",
    "Our military strength deters rivals because it signals resolve .",
    "Soft power works since culture travels further than armies .",
    "The death tax hurts farms because land values are high .",
    "The broken system fails patients since wait times keep growing .",
    "Targeted killing raises legal questions because courts never review it .",
    "Territorial claims escalate since neither side will negotiate .",
    "Abortion providers face threats because protests turned violent .",
    "Investment vehicles attract money since returns look stable .",
    "Local markets recovered because tourists came back .",
    "Clean water is scarce since the old pipes corroded .",
    "We should raise the minimum wage .",
    "The council must act now .",
    "Voters ought to reject this plan .",
    "I believe the mayor is wrong .",
    "Therefore the law should change .",
    "Is this fair ?",
    "What do you think ?",
    "Why would anyone vote for that ?",
    "Great point .",
    "Thanks for sharing .",
]

COLLOCATIONS = [
    "soft power",
    "military strength",
    "death tax",
    "broken system",
    "targeted killing",
    "territorial claims",
    "abortion providers",
    "investment vehicles",
    "illegal aliens",
]

# NRC-style rows: word, emotion, flag.
EMOTION_ROWS = [
    ("threat", "fear", 1), ("threat", "anger", 1), ("threat", "negative", 1),
    ("danger", "fear", 1), ("danger", "negative", 1),
    ("attack", "fear", 1), ("attack", "anger", 1),
    ("war", "fear", 1), ("war", "sadness", 1),
    ("crisis", "fear", 1),
    ("violence", "fear", 1), ("violence", "anger", 1),
    ("crime", "fear", 1),
    ("killing", "fear", 1), ("killing", "anger", 1),
    ("drought", "fear", 1), ("drought", "sadness", 1),
    ("flooded", "fear", 0),
    ("police", "fear", 1), ("police", "trust", 1),
    ("hope", "anticipation", 1), ("hope", "joy", 1), ("hope", "fear", 0),
    ("hope", "positive", 1),
    ("trust", "trust", 1),
    ("garden", "joy", 1),
]


def lexicon_map():
    out = {}
    for word, labels in CONNOTATION:
        if " " in word:
            continue
        s = set(labels.split(";"))
        if word in out:
            merged = out[word] | s
            if len(merged) > 1:
                merged.discard("neutral")
            out[word] = merged
        else:
            out[word] = s
    return out


def emotions_of(lex, word):
    return lex.get(word.lower(), {"neutral"})


def usable(cand, original):
    cand = cand.strip()
    if not cand or cand.lower() == original.lower():
        return False
    if not any(c.isalnum() for c in cand):
        return False
    return cand[0].isalpha()


def simulate(sentence, lex, table):
    """Replays DIFFERENT-mode rewriting; returns the rewritten sentence."""
    words = sentence.split(" ")
    for i, w in enumerate(list(words)):
        orig_set = emotions_of(lex, w)
        if orig_set == {"neutral"}:
            continue
        masked = " ".join(words[:i] + ["[MASK]"] + words[i + 1:])
        cands = SUBSTITUTES.get(w.lower())
        if cands is None:
            continue
        table[masked] = [[c, s] for c, s in cands]
        for c, _ in sorted(cands, key=lambda cs: -cs[1]):
            if usable(c, w) and emotions_of(lex, c) != orig_set:
                words[i] = c.strip()
                break
    return " ".join(words)


# Partisan test items: two long-form arguments plus the corpus sentences that
# carry a collocation.
EXTRA_TEST_ITEMS = [
    ("ts-contradict", "I suppose we could argue that they 're much better at soft power than Nazi Germany or the USSR , but come on"),
    ("ts-credibility", "It is difficult to think of any single act that would do more to restore America 's soft power than the election of Obama to the presidency"),
]

# PREFER(trust) candidates for the lexical-replacement baseline.
PHRASE_SUBSTITUTES = {
    "soft power": [("soft power", 9.0), ("moral standing", 5.0), ("influence", 3.0)],
    "military strength": [("military strength", 9.0), ("defense", 6.0), ("safety", 4.0)],
    "death tax": [("death tax", 9.0), ("estate tax", 5.0)],
}

CONTRADICT = EXTRA_TEST_ITEMS[0][1]
CREDIBILITY = EXTRA_TEST_ITEMS[1][1]
FORCE = CONTRADICT.replace("soft power", "military strength")
DIPLOMATIC = CONTRADICT.replace("soft power", "diplomatic communication")
CREDIBLE = CREDIBILITY.replace("soft power", "diplomatic credibility")

GENERATOR = {
    "rules": [
        {"contains": "better at [SEP] soft power [SEP] than Nazi", "k": 5, "output": FORCE},
        {"contains": "better at [SEP] soft power [SEP] than Nazi", "k": 10, "output": DIPLOMATIC},
        {"contains": "restore America 's [SEP] soft power [SEP]", "k": 15, "output": CREDIBLE},
        {"contains": "[SEP] death tax [SEP]", "k": 20, "fail": True},
    ],
    "perplexities": [9.5, 6.25, 4.0, 4.5, 5.0],
}

SCORER = {
    "pairs": [
        {"premise": CONTRADICT, "hypothesis": FORCE, "scores": [0.08, 0.22, 0.70]},
        {"premise": CONTRADICT, "hypothesis": DIPLOMATIC, "scores": [0.81, 0.15, 0.04]},
        {"premise": CREDIBILITY, "hypothesis": CREDIBLE, "scores": [0.9, 0.08, 0.02]},
    ]
}


def phrase_spans(text):
    """Greedy leftmost-longest collocation matches over space-split words."""
    words = text.split(" ")
    starts = []
    pos = 0
    for w in words:
        starts.append(pos)
        pos += len(w) + 1
    phrases = {tuple(c.split(" ")) for c in COLLOCATIONS}
    longest = max(len(p) for p in phrases)
    spans = []
    i = 0
    while i < len(words):
        for n in range(min(longest, len(words) - i), 0, -1):
            if tuple(w.lower() for w in words[i:i + n]) in phrases:
                b = starts[i]
                e = starts[i + n - 1] + len(words[i + n - 1])
                spans.append((b, e))
                i += n
                break
        else:
            i += 1
    return spans


def simulate_lexrep(text, lex, table):
    current = text
    delta = 0
    for b, e in phrase_spans(text):
        b2, e2 = b + delta, e + delta
        original = current[b2:e2]
        cands = PHRASE_SUBSTITUTES.get(original.lower())
        if cands is None:
            continue
        masked = current[:b2] + "[MASK]" + current[e2:]
        table[masked] = [[c, s] for c, s in cands]
        survivors = [c for c, _ in sorted(cands, key=lambda cs: -cs[1]) if usable(c, original)]
        if not survivors:
            continue
        pick = next((c for c in survivors if "trust" in emotions_of(lex, c)), survivors[0])
        current = current[:b2] + pick + current[e2:]
        delta += len(pick) - len(original)
    return current


def write_test_set(lex, table):
    items = list(EXTRA_TEST_ITEMS)
    for n, s in enumerate(SENTENCES, start=1):
        if phrase_spans(s):
            items.append((f"toy-{n:02d}", s))
    lines = []
    for rid, text in items:
        simulate_lexrep(text, lex, table)
        spans = [{"start": b, "end": e, "surface": text[b:e]} for b, e in phrase_spans(text)]
        lines.append(json.dumps({"id": rid, "text": text, "spans": spans}))
    with open(os.path.join(HERE, "partisan_testset.jsonl"), "w") as f:
        f.write("\n".join(lines) + "\n")


def main():
    lex = lexicon_map()
    table = {}
    corpus_lines = []
    for n, s in enumerate(SENTENCES, start=1):
        simulate(s, lex, table)
        corpus_lines.append(json.dumps({"id": f"toy-{n:02d}", "text": s, "source": "toy"}))
    write_test_set(lex, table)
    for name, obj in (("generator.json", GENERATOR), ("scorer.json", SCORER)):
        with open(os.path.join(HERE, name), "w") as f:
            json.dump(obj, f, indent=2)
            f.write("\n")
    with open(os.path.join(HERE, "toy_corpus.jsonl"), "w") as f:
        f.write("\n".join(corpus_lines) + "\n")
    with open(os.path.join(HERE, "connotation.csv"), "w") as f:
        f.write("word,emotions\n")
        for word, labels in CONNOTATION:
            f.write(f"{word},{labels}\n")
    with open(os.path.join(HERE, "toy_infiller.json"), "w") as f:
        rows = [f" {json.dumps(k)}: {json.dumps(v)}" for k, v in sorted(table.items())]
        f.write("{\n" + ",\n".join(rows) + "\n}\n")
    with open(os.path.join(HERE, "collocations.txt"), "w") as f:
        f.write("# partisan collocations, one per line\n")
        f.write("\n".join(COLLOCATIONS) + "\n")
    with open(os.path.join(HERE, "emotion_lexicon.tsv"), "w") as f:
        for w, e, flag in EMOTION_ROWS:
            f.write(f"{w}\t{e}\t{flag}\n")


if __name__ == "__main__":
    main()
