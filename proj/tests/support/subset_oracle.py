"""Independent reference for the seeded subset selection used by the k-d tree.

SplitMix64 stream; index j = i + ((next() * (n - i)) >> 64); swap; keep the
first round(fraction * n) (half away from zero, at least 1) indices, sorted.
"""
import math
import sys

MASK = (1 << 64) - 1


def splitmix64(seed):
    state = seed & MASK
    while True:
        state = (state + 0x9E3779B97F4A7C15) & MASK
        z = state
        z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & MASK
        z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & MASK
        yield z ^ (z >> 31)


def retained(n, fraction):
    x = fraction * n
    m = int(math.floor(x + 0.5)) if x >= 0 else -int(math.floor(-x + 0.5))
    return max(1, min(n, m))


def select_subset(n, fraction, seed):
    m = retained(n, fraction)
    idx = list(range(n))
    if m < n:
        rng = splitmix64(seed)
        for i in range(m):
            j = i + ((next(rng) * (n - i)) >> 64)
            idx[i], idx[j] = idx[j], idx[i]
        idx = sorted(idx[:m])
    return idx


if __name__ == "__main__":
    n, fraction, seed = int(sys.argv[1]), float(sys.argv[2]), int(sys.argv[3])
    print("{" + ", ".join(str(i) for i in select_subset(n, fraction, seed)) + "}")
