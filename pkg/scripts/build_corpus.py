"""Regenerate the JSON files under src/stairfold/corpus from the gallery builders."""
import os
import sys
from fractions import Fraction

from stairfold import gallery as gl
from stairfold.documents import Document, save

NOTE = "hand-built; coordinates chosen for clarity, not copied from any drawing"

CORPUS = os.path.join(os.path.dirname(__file__), "..", "src", "stairfold", "corpus")


def entries():
    yield "snake_height1", Document("stairwell", gl.snake(1), {"note": NOTE})
    yield "snake_height3", Document("stairwell", gl.snake(3), {"note": NOTE})
    yield "snake_height5", Document("stairwell", gl.snake(5), {"note": NOTE})
    yield "snake_height7", Document("stairwell", gl.snake(7), {"note": NOTE})
    yield "broken_pit1", Document("broken_stairwell", gl.unfold_example(), {"note": NOTE})
    yield "broken_pit2", Document("broken_stairwell", gl.broken_pit_two(), {"note": NOTE})
    yield "triod_separator", Document("separator", (gl.triod_separator(), Fraction(1, 16)),
                                      {"note": NOTE})
    yield "zigzag_separator", Document("separator", (gl.zigzag_separator(), Fraction(1, 16)),
                                       {"note": NOTE})
    yield "flat_separator", Document("separator", (gl.flat_separator(gl.triod()), None),
                                     {"note": NOTE})
    yield "h_straight_set", Document("straight_set", gl.h_straight_set(), {"note": NOTE})
    yield "arc_fold", Document("fold_sequence", gl.fold_sequence(gl.arc_fold()), {"note": NOTE})
    yield "triod_fold", Document("fold_sequence", gl.fold_sequence(gl.triod_fold()), {"note": NOTE})
    yield "triod_graph", Document("graph", gl.triod(), {"note": NOTE})
    yield "interval_maps", Document("interval_maps", gl.interval_maps(), {"note": NOTE})


def main(out=CORPUS):
    os.makedirs(out, exist_ok=True)
    for name, doc in entries():
        save(doc, os.path.join(out, name + ".json"))
        print(name)


if __name__ == "__main__":
    main(*sys.argv[1:])
