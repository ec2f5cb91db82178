#!/usr/bin/env python3
"""Regenerates the bundled CSV datasets under data/.

iris:      scikit-learn's bundled copy of the UCI iris data.
breast:    Wisconsin breast cancer (original, 699 rows) as shipped in R's MASS
           package (`biopsy`), read through the `rdatasets` wheel. The sample id
           column and the 16 rows with a missing bare-nuclei value are dropped.
tictactoe: the UCI tic-tac-toe endgame set, rebuilt by enumerating every board
           in which a game (x moves first) has just ended. 958 rows.
"""
import csv
import os
import sys

OUT = os.path.join(os.path.dirname(os.path.abspath(__file__)), "..", "..", "data")

LINES = [(0, 1, 2), (3, 4, 5), (6, 7, 8), (0, 3, 6), (1, 4, 7), (2, 5, 8), (0, 4, 8), (2, 4, 6)]


def winner(board):
    for a, b, c in LINES:
        if board[a] != "b" and board[a] == board[b] == board[c]:
            return board[a]
    return None


def tictactoe():
    seen = set()
    rows = []

    def play(board, player):
        w = winner(board)
        if w is not None or "b" not in board:
            key = "".join(board)
            if key not in seen:
                seen.add(key)
                rows.append((list(board), "positive" if w == "x" else "negative"))
            return
        for i in range(9):
            if board[i] == "b":
                board[i] = player
                play(board, "o" if player == "x" else "x")
                board[i] = "b"

    play(["b"] * 9, "x")
    rows.sort(key=lambda r: "".join(r[0]))
    header = ["top_left", "top_middle", "top_right", "middle_left", "middle_middle",
              "middle_right", "bottom_left", "bottom_middle", "bottom_right", "class"]
    return header, [r[0] + [r[1]] for r in rows]


def iris():
    from sklearn.datasets import load_iris
    d = load_iris()
    header = ["sepal_length", "sepal_width", "petal_length", "petal_width", "species"]
    rows = [[f"{v:g}" for v in x] + [d.target_names[t]] for x, t in zip(d.data, d.target)]
    return header, rows


def breast():
    import rdatasets
    d = rdatasets.data("MASS", "biopsy").dropna()
    header = ["clump_thickness", "cell_size", "cell_shape", "adhesion", "epithelial_size",
              "bare_nuclei", "chromatin", "nucleoli", "mitoses", "class"]
    rows = [[str(int(r[f"V{k}"])) for k in range(1, 10)] + [r["class"]] for _, r in d.iterrows()]
    return header, rows


def write(name, header, rows):
    path = os.path.join(OUT, name + ".csv")
    with open(path, "w", newline="") as f:
        w = csv.writer(f, lineterminator="\n")
        w.writerow(header)
        w.writerows(rows)
    print(f"{path}: {len(rows)} rows", file=sys.stderr)


if __name__ == "__main__":
    os.makedirs(OUT, exist_ok=True)
    for name, fn in [("tictactoe", tictactoe), ("iris", iris), ("breast", breast)]:
        write(name, *fn())
