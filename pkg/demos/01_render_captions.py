"""
Frame lexicon and caption rendering
===================================

A verb frame is a verb, its ordered roles, and a caption template. Fill the
roles with noun classes and you get a sentence.
"""

from openscene.frames import load_lexicon, render_caption

# One verb per line: verb <TAB> roles <TAB> template. Articles written as
# "A"/"An" adapt to the noun that lands in the slot; "the" stays fixed; a
# slot marked ~ is dropped (with its connective) when the role is unfilled.
LEXICON = [
    "riding\tAgent,Vehicle,Place\tAn {Agent} rides the {Vehicle} at a ~{Place}",
    "sitting\tAgent,Item,Place\tAn {Agent} sits on an {Item} at a ~{Place}",
]

# Noun classes are WordNet-style ids mapped to display words.
NOUNS = [
    "n10287213\tman",
    "n10787470\twoman",
    "n03790512\tmotorcycle",
    "n03001627\tchair",
    "n04096066\troad",
    "n03841666\toffice",
    "n02774630\tbag",
]

lexicon = load_lexicon(LEXICON, nouns=NOUNS)

print(render_caption(lexicon, "riding", {
    "Agent": "n10287213", "Vehicle": "n03790512", "Place": "n04096066",
}))

print(render_caption(lexicon, "sitting", {
    "Agent": "n10787470", "Item": "n03001627", "Place": "n03841666",
}))

# Leave the droppable Place empty and the trailing group disappears.
print(render_caption(lexicon, "sitting", {
    "Agent": "n10787470", "Item": "n03001627", "Place": "",
}))

# The article flips with the noun: "a bag" here, not "an bag".
print(render_caption(lexicon, "riding", {
    "Agent": "n10787470", "Vehicle": "n02774630", "Place": "",
}))
