"""Builds the 50-d fixture vector table and prints oracle values.

Run from this directory: python3 make_vectors.py
The table is written once and checked in; the printed numbers are frozen
into the Rust tests.
"""
import re
import numpy as np

DIM = 50
rng = np.random.default_rng(20230101)

pasta = ("pasta water salt boil pot spaghetti sauce tomato garlic basil olive oil "
         "parmesan cheese drain minutes pan simmer onion pepper stir serve noodles").split()
cake = ("chocolate cake flour sugar eggs butter cocoa bake oven vanilla whisk mix "
        "batter frosting cream milk baking powder chill slice layers").split()
common = "the a and with of to in for then until it add".split()

pasta_c = rng.normal(size=DIM); pasta_c *= 4.0 / np.linalg.norm(pasta_c)
cake_c = rng.normal(size=DIM); cake_c *= 4.0 / np.linalg.norm(cake_c)

rows = []
for w in pasta:
    rows.append((w, pasta_c + rng.normal(scale=0.1, size=DIM)))
for w in cake:
    rows.append((w, cake_c + rng.normal(scale=0.1, size=DIM)))
for w in common:
    rows.append((w, rng.normal(scale=0.05, size=DIM)))

with open("vectors50.txt", "w") as f:
    for w, v in rows:
        f.write(w + " " + " ".join("%.6f" % x for x in v) + "\n")

# Re-read from the text file so the oracle sees exactly the serialized values.
table = {}
for line in open("vectors50.txt"):
    parts = line.split()
    table.setdefault(parts[0].lower(), np.array([float(x) for x in parts[1:]]))


def tokens(text):
    out = []
    for raw in text.split():
        t = "".join(ch for ch in raw if ch.isalnum()).lower()
        if t:
            out.append(t)
    return out


def embed(text):
    acc = np.zeros(DIM)
    for t in tokens(text):
        if t in table:
            acc = acc + table[t]
    return acc


def cos(a, b):
    return float(a @ b / (np.linalg.norm(a) * np.linalg.norm(b)))


PASTA_DRAFT = ("Boil the water with salt in a pot. Add the spaghetti and cook for ten minutes. "
               "Drain the pasta, then stir in tomato sauce with garlic and basil. Serve with parmesan cheese.")
PASTA_REV = PASTA_DRAFT + " Add olive oil and pepper."
CAKE_DRAFT = ("Mix the flour, sugar, cocoa and baking powder. Whisk the eggs with butter, milk and vanilla. "
              "Bake the chocolate cake in the oven, then add frosting.")

print("recipe tokens", len(tokens(PASTA_DRAFT)), "matched", sum(t in table for t in tokens(PASTA_DRAFT)))
e = embed(PASTA_DRAFT)
print("embed", "[" + ", ".join(repr(float(x)) for x in e) + "]")
print("rev_vs_draft", repr(cos(embed(PASTA_REV), e)))
print("cake_vs_draft", repr(cos(embed(CAKE_DRAFT), e)))
