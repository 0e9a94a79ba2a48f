#!/usr/bin/env python3
"""Independent reference computations for values frozen into the C++ tests.

Run: python3 tests/oracles/reference_values.py
"""
import math
import struct

MASK64 = (1 << 64) - 1


def splitmix64(state):
    state = (state + 0x9E3779B97F4A7C15) & MASK64
    z = state
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & MASK64
    return state, z ^ (z >> 31)


def mix(x):
    return splitmix64(x)[1]


def rotl(x, k):
    return ((x << k) | (x >> (64 - k))) & MASK64


class Xoshiro256ss:
    def __init__(self, s):
        self.s = list(s)

    def next(self):
        s = self.s
        result = (rotl((s[1] * 5) & MASK64, 7) * 9) & MASK64
        t = (s[1] << 17) & MASK64
        s[2] ^= s[0]
        s[3] ^= s[1]
        s[1] ^= s[2]
        s[0] ^= s[3]
        s[2] ^= t
        s[3] = rotl(s[3], 45)
        return result


PURPOSES = {"inversion": 1, "mask": 2, "init": 3, "step": 4}


def derive_stream(seed, purpose, t, m, n):
    h = mix(seed)
    for v in (PURPOSES[purpose], t, m, n):
        h = mix(h ^ v)
    st = h
    words = []
    for _ in range(4):
        st, out = splitmix64(st)
        words.append(out)
    return Xoshiro256ss(words)


def f32(x):
    return struct.unpack("<f", struct.pack("<f", x))[0]


def main():
    print("splitmix64(0) first:", hex(splitmix64(0)[1]))
    g = Xoshiro256ss([1, 2, 3, 4])
    print("xoshiro256** {1,2,3,4}:", [g.next() for _ in range(4)])
    for key in [(42, "inversion", 3, 0, 1), (42, "mask", 3, 0, 1), (42, "inversion", 3, 5, 1)]:
        g = derive_stream(*key)
        print("derive_stream", key, [hex(g.next()) for _ in range(4)])
    print("box-muller(0.5, 0):", math.sqrt(-2 * math.log(0.5)) * math.cos(0.0))
    # scalar DDIM step: z=1, abar_t=0.25, abar_prev=0.81, eps=0.5, sigma=0
    z, at, ap, e = 1.0, 0.25, 0.81, 0.5
    v = math.sqrt(ap) / math.sqrt(at) * (z - math.sqrt(1 - at) * e) + math.sqrt(1 - ap) * e
    print("ddim scalar:", repr(v))
    # scaled-linear default schedule
    T = 1000
    b0, b1 = 8.5e-4, 1.2e-2
    betas = [(math.sqrt(b0) + (t - 1) / (T - 1) * (math.sqrt(b1) - math.sqrt(b0))) ** 2 for t in range(1, T + 1)]
    ab = 1.0
    abars = []
    for b in betas:
        ab *= 1 - b
        abars.append(ab)
    print("abar_1000:", repr(abars[-1]), "abar_500:", repr(abars[499]), "abar_50:", repr(abars[49]))
    print("ppm 127:", repr(f32(127 / 127.5 - 1)))
    print("f32 2.0 LE bytes:", struct.pack("<f", 2.0).hex())
    print("mask ones P=0.3 8x8:", math.floor(0.3 * 64 + 0.5))
    print("dummy z=0 t=4 cond=1:", repr(f32(math.tanh(0.0) * 1.0 + 0.01 * ((4 % 7) - 3))))


if __name__ == "__main__":
    main()
