import random
import sys
from pathlib import Path

sys.path.insert(0, str(Path(__file__).parent))


def rand_string(rng: random.Random, n: int, sigma: int) -> list[int]:
    return [rng.randrange(sigma) for _ in range(n)]


def fibonacci_word(n: int) -> list[int]:
    a, b = [0], [0, 1]
    while len(b) < n:
        a, b = b, b + a
    return b[:n]


def repetitive_string(rng: random.Random, n: int, sigma: int = 4) -> list[int]:
    """Concatenate mutated repeats of a short seed until length n."""
    seed = rand_string(rng, max(2, n // 16 + 1), sigma)
    out: list[int] = []
    while len(out) < n:
        piece = list(seed)
        if rng.random() < 0.5 and piece:
            piece[rng.randrange(len(piece))] = rng.randrange(sigma)
        out.extend(piece)
    return out[:n]


def string_family(rng: random.Random, n: int):
    """A mix of random, repetitive and degenerate strings of length n."""
    kind = rng.randrange(6)
    if kind == 0:
        return rand_string(rng, n, 2)
    if kind == 1:
        return rand_string(rng, n, 4)
    if kind == 2:
        return rand_string(rng, n, 256)
    if kind == 3:
        return [0] * n
    if kind == 4:
        return fibonacci_word(n)
    return repetitive_string(rng, n)
