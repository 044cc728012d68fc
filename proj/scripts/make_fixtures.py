#!/usr/bin/env python3
"""Writes the bundled fixture set under fixtures/.

The knowledge base is a hand-made miniature. Ids of the case-study
entities (office chain, Donald Trump, politics) follow Wikidata; every other
id lives in the Q9000000 range and stands for nothing outside this fixture.

Word vectors are synthetic 50-d vectors. Most words share a common direction
so they pass the cosine gate; a few off-context words do not. The labels of
the office chain are placed so that their cosine with the vector of the
office sentence equals the case-study values.
"""

import json
import math
import os
import re

import numpy as np

ROOT = os.path.join(os.path.dirname(os.path.abspath(__file__)), "..", "fixtures")
DIM = 50

LABELS = {
    # office chain
    "Q12823105": "Office",
    "Q180516": "room",
    "Q17334923": "location",
    "Q107": "space",
    "Q133327": "spacetime",
    "Q11471": "Time",
    # politics
    "Q22686": "Donald Trump",
    "Q7163": "politics",
    "Q5": "human",
    "Q9000011": "Investor",
    "Q9000012": "stock market",
    "Q9000010": "military",
    "Q9000013": "armed forces",
    # gun control
    "Q9000001": "gun control",
    "Q9000002": "gun",
    "Q9000003": "regulation",
    "Q9000004": "law",
    "Q9000020": "rifle",
    "Q9000021": "pistol",
    "Q9000022": "home",
    "Q9000023": "firearm",
    "Q9000024": "weapon",
    "Q9000025": "death",
    "Q9000026": "injury",
    "Q9000027": "museum",
    "Q9000028": "civil war",
    "Q9000029": "institution",
    "Q9000030": "war",
    "Q9000031": "background check",
    "Q9000032": "criminal",
    "Q9000033": "person",
    "Q9000034": "lake",
    "Q9000035": "summer",
    "Q9000036": "body of water",
    "Q9000037": "season",
    "Q9000039": "citizen",
    "Q9000040": "self-defense",
    "Q9000041": "hunting",
    "Q9000042": "rural area",
    "Q9000045": "crime",
    # nuclear energy
    "Q9000100": "nuclear power",
    "Q9000101": "energy",
    "Q9000102": "nuclear power plant",
    "Q9000103": "electricity",
    "Q9000104": "carbon dioxide",
    "Q9000105": "power station",
    "Q9000106": "greenhouse gas",
    "Q9000107": "uranium",
    "Q9000108": "chemical element",
    "Q9000109": "nuclear fuel",
    "Q9000110": "radioactive waste",
    "Q9000111": "nuclear reactor",
    "Q9000112": "wind power",
    "Q9000113": "solar energy",
    "Q9000114": "renewable energy",
    "Q9000115": "Chernobyl disaster",
    "Q9000116": "nuclear accident",
    "Q9000117": "farmland",
    "Q9000118": "radioactive contamination",
    "Q9000119": "land",
    "Q9000120": "power",
    "Q9000121": "rate",
    "Q9000122": "physical quantity",
    "Q9000123": "kitchen",
    "Q9000124": "yellow",
    "Q9000125": "industry",
    "Q9000126": "economic sector",
    "Q9000127": "fuel",
    "Q9000128": "accident",
    "Q9000129": "football",
    "Q9000130": "stadium",
    "Q9000131": "fossil fuel",
}

TRIPLES = [
    # office chain
    ("Q12823105", "P279", "Q180516"),
    ("Q180516", "P279", "Q17334923"),
    ("Q17334923", "P361", "Q107"),
    ("Q107", "P361", "Q133327"),
    ("Q133327", "P527", "Q11471"),
    # politics
    ("Q22686", "P31", "Q5"),
    ("Q22686", "P101", "Q7163"),
    ("Q22686", "P106", "Q9000011"),
    ("Q9000011", "P361", "Q9000012"),
    ("Q7163", "P527", "Q9000010"),
    ("Q9000010", "P279", "Q9000013"),
    # gun control
    ("Q9000001", "P279", "Q9000003"),
    ("Q9000003", "P279", "Q9000004"),
    ("Q9000002", "P279", "Q9000024"),
    ("Q9000020", "P279", "Q9000023"),
    ("Q9000021", "P279", "Q9000023"),
    ("Q9000023", "P279", "Q9000024"),
    ("Q9000023", "P1542", "Q9000026"),
    ("Q9000026", "P1542", "Q9000025"),
    ("Q9000024", "P366", "Q9000030"),
    ("Q9000028", "P279", "Q9000030"),
    ("Q9000027", "P31", "Q9000029"),
    ("Q9000031", "P279", "Q9000003"),
    ("Q9000032", "P279", "Q9000033"),
    ("Q9000032", "P828", "Q9000045"),
    ("Q9000039", "P279", "Q9000033"),
    ("Q9000034", "P279", "Q9000036"),
    ("Q9000035", "P31", "Q9000037"),
    ("Q9000020", "P366", "Q9000041"),
    ("Q9000041", "P361", "Q9000042"),
    # nuclear energy
    ("Q9000100", "P279", "Q9000101"),
    ("Q9000100", "P527", "Q9000111"),
    ("Q9000103", "P279", "Q9000101"),
    ("Q9000102", "P31", "Q9000105"),
    ("Q9000102", "P1542", "Q9000103"),
    ("Q9000104", "P31", "Q9000106"),
    ("Q9000131", "P1542", "Q9000104"),
    ("Q9000107", "P31", "Q9000108"),
    ("Q9000107", "P366", "Q9000109"),
    ("Q9000109", "P279", "Q9000127"),
    ("Q9000111", "P1542", "Q9000110"),
    ("Q9000111", "P361", "Q9000102"),
    ("Q9000112", "P279", "Q9000114"),
    ("Q9000113", "P279", "Q9000114"),
    ("Q9000114", "P279", "Q9000101"),
    ("Q9000115", "P31", "Q9000116"),
    ("Q9000116", "P279", "Q9000128"),
    ("Q9000116", "P828", "Q9000111"),
    ("Q9000116", "P1542", "Q9000118"),
    ("Q9000117", "P279", "Q9000119"),
    ("Q9000120", "P279", "Q9000121"),
    ("Q9000101", "P31", "Q9000122"),
    ("Q9000125", "P279", "Q9000126"),
    ("Q9000129", "P366", "Q9000130"),
]

GUN = "gun control"
NUC = "nuclear energy"
TOPIC_CONCEPTS = {
    GUN: [("gun control", "Q9000001", 0.9), ("gun", "Q9000002", 0.6)],
    NUC: [("nuclear energy", "Q9000100", 0.9), ("energy", "Q9000101", 0.5)],
}

# topic, sentence, label, split, sentence concepts (surface, id, rank)
INSTANCES = [
    (GUN, "In these days and times, a lot of us do not feel safe in our own homes or offices.",
     "Pro", "train", [("times", "Q11471", 0.8), ("offices", "Q12823105", 0.7)]),
    (GUN, "Trump uses the military to prove his manhood.", "NoArgument", "train",
     [("Trump", "Q22686", 0.9), ("military", "Q9000010", 0.6)]),
    (GUN, "A rifle or a pistol in every home makes families less safe.", "Pro", "train",
     [("rifle", "Q9000020", 0.8), ("pistol", "Q9000021", 0.8), ("home", "Q9000022", 0.4)]),
    (GUN, "Stricter gun laws reduce the number of deaths from firearms.", "Pro", "train",
     [("laws", "Q9000004", 0.7), ("deaths", "Q9000025", 0.6), ("firearms", "Q9000023", 0.8)]),
    (GUN, "The museum displays old rifles from the civil war.", "NoArgument", "test",
     [("museum", "Q9000027", 0.7), ("rifles", "Q9000020", 0.6), ("civil war", "Q9000028", 0.8)]),
    (GUN, "Background checks keep guns away from criminals.", "Pro", "test",
     [("Background checks", "Q9000031", 0.9), ("guns", "Q9000002", 0.7),
      ("criminals", "Q9000032", 0.6)]),
    (GUN, "My grandfather taught me to fish on the lake every summer.", "NoArgument", "train",
     [("lake", "Q9000034", 0.6), ("summer", "Q9000035", 0.5)]),
    (GUN, "Owning a gun gives citizens the power to defend themselves.", "Con", "train",
     [("gun", "Q9000002", 0.8), ("citizens", "Q9000039", 0.7), ("power", "Q9000120", 0.3)]),
    (GUN, "Hunting with a rifle is a tradition in rural areas.", "Con", "test",
     [("Hunting", "Q9000041", 0.8), ("rifle", "Q9000020", 0.7), ("rural areas", "Q9000042", 0.5)]),
    (GUN, "The city council met on Tuesday to discuss parking.", "NoArgument", "test", None),
    (NUC, "Donald Trump has a lot of power.", "NoArgument", "train",
     [("Donald Trump", "Q22686", 0.9), ("power", "Q9000120", 0.7)]),
    (NUC, "Nuclear plants produce electricity without emitting carbon dioxide.", "Pro", "train",
     [("Nuclear plants", "Q9000102", 0.9), ("electricity", "Q9000103", 0.8),
      ("carbon dioxide", "Q9000104", 0.7)]),
    (NUC, "Uranium is a chemical element with the symbol U.", "NoArgument", "train",
     [("Uranium", "Q9000107", 0.9), ("chemical element", "Q9000108", 0.8)]),
    (NUC, "Radioactive waste from reactors remains dangerous for thousands of years.", "Con",
     "train", [("Radioactive waste", "Q9000110", 0.9), ("reactors", "Q9000111", 0.8)]),
    (NUC, "Wind and solar energy are cheaper than nuclear power today.", "Con", "test",
     [("Wind", "Q9000112", 0.6), ("solar energy", "Q9000113", 0.8),
      ("nuclear power", "Q9000100", 0.9)]),
    (NUC, "The Chernobyl disaster happened in 1986.", "NoArgument", "test",
     [("Chernobyl disaster", "Q9000115", 0.9)]),
    (NUC, "A nuclear accident can contaminate farmland for decades.", "Con", "test",
     [("nuclear accident", "Q9000116", 0.9), ("farmland", "Q9000117", 0.7)]),
    (NUC, "She painted the kitchen walls a bright yellow.", "NoArgument", "train",
     [("kitchen", "Q9000123", 0.6), ("yellow", "Q9000124", 0.5)]),
    (NUC, "Nuclear energy provides a stable supply of power for industry.", "Pro", "train",
     [("Nuclear energy", "Q9000100", 0.9), ("power", "Q9000120", 0.6),
      ("industry", "Q9000125", 0.7)]),
    (NUC, "Football fans gathered outside the stadium before the match.", "NoArgument", "test",
     [("Football", "Q9000129", 0.8), ("stadium", "Q9000130", 0.7)]),
]

# id, usage count, label, description
PROPERTIES = [
    ("P31", 1100000000, "instance of",
     "that class of which this subject is a particular example and member"),
    ("P279", 3900000, "subclass of",
     "next higher class or type; all instances of these items are instances of those items"),
    ("P361", 5200000, "part of", "object of which the subject is a part"),
    ("P527", 4300000, "has part", "part of this subject; inverse of part of"),
    ("P101", 900000, "field of work", "specialization of a person or organization in politics or science"),
    ("P106", 8000000, "occupation", "occupation of a person; the work they are paid for"),
    ("P1542", 52000, "has effect", "effect of this item; what this event or weapon causes"),
    ("P828", 61000, "has cause", "underlying cause, thing that ultimately resulted in this effect"),
    ("P366", 74000, "use", "main use of the subject; what a weapon, fuel or tool is used for"),
    ("P463", 2100000, "member of", "organization, club or musical group to which the subject belongs"),
    ("P17", 15000000, "country", "sovereign state that this item is in"),
    ("P131", 11000000, "located in the administrative territorial entity",
     "the item is located on the territory of the following administrative entity"),
    ("P19", 3000000, "place of birth", "most specific known birth location of a person"),
    ("P136", 2600000, "genre", "creative work's genre or an artist's field of work"),
    ("P170", 1800000, "creator", "maker of this creative work or other object"),
    ("P921", 40000000, "main subject", "primary topic of a work"),
    ("P1889", 600, "different from",
     "item that is different from another item, with which it may be confused"),
    ("P2283", 45000, "uses", "item or concept used by the subject or in the operation"),
    ("P1269", 900, "facet of", "topic of which this item is an aspect, item that offers a broader perspective"),
    ("P460", 250000, "said to be the same as", "this item is said to be the same as that item"),
]

ARTICLES = {
    "Q9000001": "Gun control is a set of laws and policies that regulate the manufacture, "
                "sale, transfer, possession and use of firearms by civilians. Regulation of "
                "weapons is part of public policy in many countries. Each class of weapon is "
                "treated as a separate type under the law.",
    "Q9000002": "A gun is a ranged weapon that uses a shooting tube to launch projectiles. "
                "A firearm is a type of gun. Guns are used for hunting, sport and self-defense, "
                "and their use in crime has an effect on public safety.",
    "Q9000020": "A rifle is a long firearm designed for accurate shooting. Rifles are a class of "
                "weapon widely used for hunting and in war. The barrel is the main part of a rifle.",
    "Q9000021": "A pistol is a handgun, a type of firearm small enough to be used with one hand. "
                "Pistols are part of the equipment of police and are used for self-defense.",
    "Q9000004": "Law is a system of rules enforced through social institutions to govern "
                "behavior. Criminal law is a part of law whose effect is to deter crime.",
    "Q9000025": "Death is the end of life. Injury caused by a weapon can have death as an effect.",
    "Q9000023": "A firearm is any type of gun designed to be carried by a person. The use of a "
                "firearm can cause injury; injury and death are an effect of gun violence.",
    "Q9000027": "A museum is an institution that cares for artifacts of historical importance. "
                "Many museums display weapons as part of their collections.",
    "Q9000028": "A civil war is a war between organized groups within the same state. Weapons "
                "used in war are part of its history.",
    "Q9000031": "A background check is a process used to look up criminal records. It is part of "
                "the regulation of gun sales and has an effect on crime.",
    "Q9000032": "A criminal is a person who has committed a crime. Crime has social causes and "
                "its effect on society is studied as part of criminology.",
    "Q9000039": "A citizen is a person who is a legal member of a state. Citizens may use "
                "firearms for self-defense in some countries.",
    "Q9000041": "Hunting is the practice of killing animals. Rifles are used for hunting in "
                "rural areas and hunting is part of many traditions.",
    "Q11471": "Time is the continued sequence of existence. Time is part of spacetime and is a "
              "class of physical quantity.",
    "Q12823105": "An office is a room or other area where people work. An office is a type of room "
                 "and is part of a building.",
    "Q22686": "Donald Trump is an American politician and businessman. His field of work "
              "is politics and he is a member of the Republican Party.",
    "Q9000010": "A military is a heavily armed organization. The military is part of the state "
                "and uses weapons in war; its effect on politics is large.",
    "Q9000100": "Nuclear power is the use of nuclear reactions to produce electricity. A nuclear "
                "reactor is part of a nuclear power plant. Nuclear fuel is a type of fuel whose "
                "use has an effect on carbon emissions.",
    "Q9000101": "Energy is a physical quantity. Each class of energy, such as electricity, is a "
                "type of energy that is used for work.",
    "Q9000102": "A nuclear power plant is a type of power station. Its main use is to produce "
                "electricity and its reactor is the central part of the plant.",
    "Q9000103": "Electricity is a type of energy. The effect of electric current is used in "
                "industry as part of many processes.",
    "Q9000104": "Carbon dioxide is a greenhouse gas. Its effect on climate is caused by the "
                "use of fossil fuel and it is part of the carbon cycle.",
    "Q9000107": "Uranium is a chemical element. Its main use is as nuclear fuel; uranium is a "
                "class of heavy metal and part of many minerals.",
    "Q9000108": "A chemical element is a type of atom. Each element is a class of substance "
                "defined by its number of protons.",
    "Q9000110": "Radioactive waste is a type of waste that contains radioactive material. It is "
                "an effect of the use of nuclear reactors.",
    "Q9000111": "A nuclear reactor is a device used to sustain a nuclear chain reaction. A "
                "reactor is part of a power plant and radioactive waste is an effect of its use.",
    "Q9000112": "Wind power is the use of wind to produce electricity. Wind power is a type of "
                "renewable energy.",
    "Q9000113": "Solar energy is radiant light and heat from the Sun. Solar energy is a type of "
                "renewable energy used to produce electricity.",
    "Q9000115": "The Chernobyl disaster was a nuclear accident. Its cause was a flawed reactor "
                "design and its effect was radioactive contamination.",
    "Q9000116": "A nuclear accident is a type of accident involving a reactor. Its effect is "
                "radioactive contamination and the cause is often part of the reactor.",
    "Q9000117": "Farmland is land used for agriculture. It is part of the rural economy.",
    "Q9000120": "Power is the amount of energy transferred per unit time. Power is a type of rate.",
    "Q9000125": "Industry is the production of goods. Industry is part of the economy and uses "
                "electricity.",
}

DOCUMENTS = {
    GUN: [
        (1, "https://example.org/gun-control/overview",
         "Gun control laws differ from state to state. Citizens use guns for protection in many "
         "homes. Background checks reduce gun violence according to several studies. "
         "Gun owners store firearms at home."),
        (2, "https://example.org/gun-control/debate",
         "Supporters say stricter regulation saves lives. Opponents argue that criminals ignore "
         "gun laws. Hunters use rifles in rural areas every autumn."),
        (3, "https://example.org/gun-control/history",
         "The first federal gun law was passed in 1934. It taxed machine guns heavily."),
        (4, "https://example.org/gun-control/misc",
         "This page lists unrelated notes about parking and football matches."),
    ],
    NUC: [
        (1, "https://example.org/nuclear/power",
         "Members of politics in general have power over energy policy. Nuclear plants generate "
         "low carbon electricity. Radioactive contamination affects farmland near reactors."),
        (2, "https://example.org/nuclear/safety",
         "Reactor accidents are rare but severe. The Chernobyl disaster released large amounts "
         "of radioactive material into the air."),
        (3, "https://example.org/nuclear/waste",
         "Radioactive waste must be stored for thousands of years. Uranium fuel is mined in "
         "several countries."),
        (4, "https://example.org/nuclear/offtopic",
         "Kitchen walls look bright when they are painted yellow."),
    ],
}

OIE_TRIPLES = {
    GUN: [
        (1.0, "Citizens", "use", "guns for protection"),
        (0.92, "Background checks", "reduce", "gun violence"),
        (0.88, "Gun owners", "store", "firearms at home"),
        (0.81, "criminals", "ignore", "gun laws"),
        (0.77, "Hunters", "use", "rifles in rural areas"),
        (0.7, "stricter regulation", "saves", "lives"),
        (0.7, "stricter regulation", "saves", "lives"),
    ],
    NUC: [
        (1.0, "Members of politics", "in general have", "power"),
        (0.93, "Nuclear plants", "generate", "low carbon electricity"),
        (0.9, "Radioactive contamination", "affects", "farmland near reactors"),
        (0.85, "The Chernobyl disaster", "released", "radioactive material"),
        (0.8, "Radioactive waste", "must be stored for", "thousands of years"),
        (0.75, "Uranium fuel", "is mined in", "several countries"),
    ],
}

# Words placed off the common direction; their cosine with most sentences is
# near zero or negative.
OFF_CONTEXT = {"investor", "stock", "market", "spacetime", "rate", "yellow", "kitchen",
               "football", "stadium", "fans", "painted", "walls"}

def tokens(text):
    return re.findall(r"[a-z0-9]+", text.lower())


def load_stopwords():
    words = set()
    with open(os.path.join(ROOT, "stopwords.txt")) as f:
        for line in f:
            line = line.strip()
            if line and not line.startswith("#"):
                words.add(line)
    return words


def unit(v):
    return v / np.linalg.norm(v)


def write(path, text):
    os.makedirs(os.path.dirname(path), exist_ok=True)
    with open(path, "w") as f:
        f.write(text)


def make_vectors(stop):
    rng = np.random.default_rng(20200701)
    common = unit(rng.normal(size=DIM))
    vocab = set()
    for _, s, _, _, _ in INSTANCES:
        vocab.update(tokens(s))
    for t in TOPIC_CONCEPTS:
        vocab.update(tokens(t))
    for label in LABELS.values():
        vocab.update(tokens(label))
    for topic, triples in OIE_TRIPLES.items():
        for _, s, p, o in triples:
            vocab.update(tokens(s + " " + p + " " + o))
    vocab = sorted(w for w in vocab if w not in stop and not w.isdigit())

    vectors = {}
    for w in vocab:
        noise = rng.normal(size=DIM) * (0.6 / math.sqrt(DIM))
        if w in OFF_CONTEXT:
            vectors[w] = -0.15 * common + noise
        else:
            vectors[w] = common + noise

    # Case-study labels: exact cosines against the office sentence.
    office_sentence = INSTANCES[0][1]
    covered = [w for w in tokens(office_sentence) if w in vectors]
    v_s = unit(np.mean([vectors[w] for w in covered], axis=0))
    targets = {"office": 0.7007, "room": 0.7195, "location": 0.6469, "space": 0.6210,
               "spacetime": -0.0365, "time": 0.8891}
    for w, c in targets.items():
        r = rng.normal(size=DIM)
        r = unit(r - r.dot(v_s) * v_s)
        vectors[w] = (c * v_s + math.sqrt(1 - c * c) * r) * 1.3
    lines = [w + " " + " ".join("%.6f" % x for x in vectors[w]) for w in sorted(vectors)]
    write(os.path.join(ROOT, "vectors.txt"), "\n".join(lines) + "\n")


def main():
    stop = load_stopwords()
    write(os.path.join(ROOT, "kb", "labels.tsv"),
          "".join("%s\t%s\n" % (k, LABELS[k]) for k in sorted(LABELS)))
    write(os.path.join(ROOT, "kb", "triples.tsv"),
          "".join("%s\t%s\t%s\n" % t for t in TRIPLES))

    rows = ["topic\tsentence\tlabel\tsplit"]
    ann = []
    for topic, sentence, label, split, concepts in INSTANCES:
        rows.append("\t".join([topic, sentence, label, split]))
        if concepts is None:
            continue
        doc = {
            "topic": topic,
            "sentence": sentence,
            "topic_concepts": [
                {"surface": s, "entity_id": e, "rank_score": r, "entity_label": LABELS[e]}
                for s, e, r in TOPIC_CONCEPTS[topic]],
            "sentence_concepts": [
                {"surface": s, "entity_id": e, "rank_score": r, "entity_label": LABELS[e]}
                for s, e, r in concepts],
        }
        ann.append(json.dumps(doc, sort_keys=True))
    write(os.path.join(ROOT, "dataset.tsv"), "\n".join(rows) + "\n")
    write(os.path.join(ROOT, "annotations.jsonl"), "\n".join(ann) + "\n")

    write(os.path.join(ROOT, "properties.tsv"),
          "".join("%s\t%d\t%s\t%s\n" % p for p in PROPERTIES))
    for qid, text in ARTICLES.items():
        write(os.path.join(ROOT, "articles", qid + ".txt"), text + "\n")

    for topic, docs in DOCUMENTS.items():
        slug = "_".join(tokens(topic))
        write(os.path.join(ROOT, "documents", slug + ".jsonl"),
              "".join(json.dumps({"rank": r, "url": u, "text": t}) + "\n" for r, u, t in docs))
        write(os.path.join(ROOT, "triples", slug + ".tsv"),
              "".join("%s\t%s\t%s\t%s\n" % t for t in OIE_TRIPLES[topic]))

    make_vectors(stop)


if __name__ == "__main__":
    main()
