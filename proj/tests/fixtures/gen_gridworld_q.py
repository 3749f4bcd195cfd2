"""Regenerates the exact grid-world action-value fixtures.

Solves q = r + P q directly (numpy.linalg.solve) over the 92 non-terminal
state-action pairs of the 5x5 grid with terminals at (0,0) and (4,4).
Actions: 0 north (row - 1), 1 east, 2 south, 3 west. State id = row * 5 + col.
"""
import numpy as np

W = H = 5
TERMINAL = {0, W * H - 1}
MOVES = [(0, -1), (1, 0), (0, 1), (-1, 0)]


def step(s, a):
    col, row = s % W, s // W
    dc, dr = MOVES[a]
    col = min(max(col + dc, 0), W - 1)
    row = min(max(row + dr, 0), H - 1)
    return row * W + col


def solve(policy_row):
    pairs = [(s, a) for s in range(W * H) if s not in TERMINAL for a in range(4)]
    index = {p: i for i, p in enumerate(pairs)}
    n = len(pairs)
    A = np.eye(n)
    b = np.full(n, -1.0)
    for (s, a), i in index.items():
        nxt = step(s, a)
        if nxt in TERMINAL:
            continue
        for a2 in range(4):
            A[i, index[(nxt, a2)]] -= policy_row[a2]
    q = np.linalg.solve(A, b)
    return pairs, q


def write(path, policy_row):
    pairs, q = solve(policy_row)
    with open(path, "w") as f:
        f.write("state,action,q\n")
        for (s, a), v in zip(pairs, q):
            f.write(f"{s},{a},{v:.17g}\n")


if __name__ == "__main__":
    write("gridworld_equiprobable_q.csv", [0.25] * 4)
    write("gridworld_north_eps05_q.csv", [0.625, 0.125, 0.125, 0.125])
