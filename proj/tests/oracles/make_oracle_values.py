#!/usr/bin/env python3
"""Independent high-precision reference values for the stats and codes tests.

Writes tests/oracle_values.hpp. Every statistic is recomputed here from its
textbook definition with mpmath at 40 digits; nothing is shared with the C++
implementation. Run from the repository root:

    python3 tests/oracles/make_oracle_values.py > tests/oracle_values.hpp
"""

import random

import mpmath as mp
import numpy as np

mp.mp.dps = 40

PI_100 = (
    "1100100100001111110110101010001000100001011010001100"
    "001000110100110001001100011001100010100010111000"
)
LONGEST_128 = (
    "11001100000101010110110001001100111000000000001001001101010100010001"
    "001111010110100000001101011111001100111001101101100010110010"
)


def rand_bits(seed, n, p=0.5):
    rng = random.Random(seed)
    return "".join("1" if rng.random() < p else "0" for _ in range(n))


RAND_8192 = rand_bits(20240611, 8192)
BIASED_4096 = rand_bits(77, 4096, 0.56)


def erfc(x):
    return mp.erfc(mp.mpf(x))


def igamc(a, x):
    return mp.gammainc(mp.mpf(a), mp.mpf(x), mp.inf, regularized=True)


def monobit(e):
    n = len(e)
    s = sum(1 if c == "1" else -1 for c in e)
    return erfc(abs(mp.mpf(s)) / mp.sqrt(2 * n))


def runs(e):
    n = len(e)
    pi = mp.mpf(e.count("1")) / n
    if abs(pi - mp.mpf(1) / 2) >= 2 / mp.sqrt(n):
        return mp.mpf(0)
    v = 1 + sum(1 for i in range(n - 1) if e[i] != e[i + 1])
    return erfc(abs(v - 2 * n * pi * (1 - pi)) / (2 * mp.sqrt(2 * n) * pi * (1 - pi)))


def block_frequency(e, m):
    blocks = len(e) // m
    chi = mp.mpf(0)
    for b in range(blocks):
        pi = mp.mpf(e[b * m:(b + 1) * m].count("1")) / m
        chi += (pi - mp.mpf(1) / 2) ** 2
    chi *= 4 * m
    return igamc(mp.mpf(blocks) / 2, chi / 2)


def longest_probs(m, lo, hi):
    # Count M-bit strings by longest run of ones, exactly, then classify.
    counts = {}
    # dp[len][best] = number of prefixes
    dp = {(0, 0): 1}
    for _ in range(m):
        nxt = {}
        for (run, best), c in dp.items():
            key0 = (0, best)
            nxt[key0] = nxt.get(key0, 0) + c
            r = run + 1
            key1 = (r, max(best, r) if max(best, r) < hi else hi)
            nxt[key1] = nxt.get(key1, 0) + c
        # cap run length at hi to keep the state space small
        dp = {}
        for (run, best), c in nxt.items():
            k = (min(run, hi), best)
            dp[k] = dp.get(k, 0) + c
    for (_, best), c in dp.items():
        counts[best] = counts.get(best, 0) + c
    total = mp.mpf(2) ** m
    probs = []
    for v in range(lo, hi + 1):
        if v == lo:
            c = sum(cnt for b, cnt in counts.items() if b <= lo)
        elif v == hi:
            c = sum(cnt for b, cnt in counts.items() if b >= hi)
        else:
            c = counts.get(v, 0)
        probs.append(mp.mpf(c) / total)
    return probs


def longest_schedule(n):
    if n >= 750000:
        return 10000, 10, 16
    if n >= 6272:
        return 128, 4, 9
    return 8, 1, 4


def longest_run(e):
    m, lo, hi = longest_schedule(len(e))
    probs = longest_probs(m, lo, hi)
    blocks = len(e) // m
    counts = [0] * len(probs)
    for b in range(blocks):
        best = max(len(r) for r in e[b * m:(b + 1) * m].split("0"))
        counts[min(max(best, lo), hi) - lo] += 1
    chi = sum((counts[i] - blocks * probs[i]) ** 2 / (blocks * probs[i]) for i in range(len(probs)))
    return igamc(mp.mpf(len(probs) - 1) / 2, chi / 2)


def cusum(e, forward):
    n = len(e)
    seq = e if forward else e[::-1]
    s, z = 0, 0
    for c in seq:
        s += 1 if c == "1" else -1
        z = max(z, abs(s))
    phi = lambda x: mp.ncdf(x)
    sq = mp.sqrt(n)
    t1 = mp.mpf(0)
    for k in range(int(mp.floor((mp.mpf(-n) / z + 1) / 4)), int(mp.floor((mp.mpf(n) / z - 1) / 4)) + 1):
        t1 += phi((4 * k + 1) * z / sq) - phi((4 * k - 1) * z / sq)
    t2 = mp.mpf(0)
    for k in range(int(mp.floor((mp.mpf(-n) / z - 3) / 4)), int(mp.floor((mp.mpf(n) / z - 1) / 4)) + 1):
        t2 += phi((4 * k + 3) * z / sq) - phi((4 * k + 1) * z / sq)
    return 1 - t1 + t2


def pattern_counts(e, m):
    n = len(e)
    ext = e + e[: m - 1]
    counts = {}
    for i in range(n):
        counts[ext[i:i + m]] = counts.get(ext[i:i + m], 0) + 1
    return counts


def psi2(e, m):
    if m <= 0:
        return mp.mpf(0)
    n = len(e)
    return mp.mpf(2) ** m / n * sum(mp.mpf(c) ** 2 for c in pattern_counts(e, m).values()) - n


def serial(e, m):
    d1 = psi2(e, m) - psi2(e, m - 1)
    d2 = psi2(e, m) - 2 * psi2(e, m - 1) + psi2(e, m - 2)
    return igamc(mp.mpf(2) ** (m - 2), d1 / 2), igamc(mp.mpf(2) ** (m - 3), d2 / 2)


def apen(e, m):
    n = len(e)

    def phi(mm):
        return sum(mp.mpf(c) / n * mp.log(mp.mpf(c) / n) for c in pattern_counts(e, mm).values())

    a = phi(m) - phi(m + 1)
    chi = 2 * n * (mp.log(2) - a)
    return igamc(mp.mpf(2) ** (m - 1), chi / 2)


def spectral(e):
    n = len(e)
    x = np.array([1.0 if c == "1" else -1.0 for c in e])
    mods = np.abs(np.fft.fft(x))[: n // 2]
    t = mp.sqrt(mp.log(20) * n)
    # guard: no modulus may sit within 1e-9 of the threshold
    assert all(abs(float(m) - float(t)) > 1e-9 for m in mods)
    n1 = int(sum(1 for m in mods if m < float(t)))
    d = (n1 - mp.mpf("0.95") * n / 2) / mp.sqrt(n * mp.mpf("0.95") * mp.mpf("0.05") / 4)
    return erfc(abs(d) / mp.sqrt(2))


def fmt(v):
    return mp.nstr(v, 17, min_fixed=-1, max_fixed=-1) if v != 0 else "0.0"


def emit_string(name, s):
    print(f"inline constexpr const char* {name} =")
    for i in range(0, len(s), 96):
        print(f'    "{s[i:i + 96]}"')
    print("    ;")


def main():
    print("// Generated by tests/oracles/make_oracle_values.py (mpmath, 40 digits). Do not edit.")
    print("#pragma once\n")
    print("namespace oracle {\n")
    print("struct Point1 {\n    double x;\n    double value;\n};\n")
    print("struct Point2 {\n    double a;\n    double x;\n    double value;\n};\n")

    erfc_x = ["-3", "-1.5", "-0.5", "0", "0.125", "0.25", "0.4472135954999579", "0.5", "0.75", "1", "1.25",
              "1.5", "2", "2.5", "3", "3.5", "4", "5", "6", "8", "10", "12", "15", "20", "25"]
    print("inline constexpr Point1 kErfc[] = {")
    for x in erfc_x:
        print(f"    {{{x}, {fmt(erfc(x))}}},")
    print("};\n")

    igamc_pts = [("0.5", "0.1"), ("0.5", "2"), ("1", "1"), ("1.5", "0.5"), ("1.5", "3"), ("2", "0.25"),
                 ("2.5", "7.5"), ("3", "2"), ("4", "1"), ("4", "9"), ("5", "3.3"), ("8", "8"), ("8", "20"),
                 ("16", "10"), ("32", "40"), ("64", "60"), ("128", "150"), ("500", "480"), ("1953", "2000"),
                 ("3906", "3900"), ("3906", "4100"), ("0.25", "0.01"), ("10", "0.5"), ("2", "30")]
    print("inline constexpr Point2 kIgamc[] = {")
    for a, x in igamc_pts:
        print(f"    {{{a}, {x}, {fmt(igamc(a, x))}}},")
    print("};\n")

    emit_string("kPi100", PI_100)
    emit_string("kLongest128", LONGEST_128)
    emit_string("kRandom8192", RAND_8192)
    emit_string("kBiased4096", BIASED_4096)
    print()

    def vec(prefix, e):
        print(f"inline constexpr double {prefix}Monobit = {fmt(monobit(e))};")
        print(f"inline constexpr double {prefix}Runs = {fmt(runs(e))};")
        print(f"inline constexpr double {prefix}CusumForward = {fmt(cusum(e, True))};")
        print(f"inline constexpr double {prefix}CusumBackward = {fmt(cusum(e, False))};")
        s1, s2 = serial(e, 2)
        print(f"inline constexpr double {prefix}Serial1M2 = {fmt(s1)};")
        print(f"inline constexpr double {prefix}Serial2M2 = {fmt(s2)};")
        s1, s2 = serial(e, 3)
        print(f"inline constexpr double {prefix}Serial1M3 = {fmt(s1)};")
        print(f"inline constexpr double {prefix}Serial2M3 = {fmt(s2)};")
        print(f"inline constexpr double {prefix}ApEnM2 = {fmt(apen(e, 2))};")
        print(f"inline constexpr double {prefix}Spectral = {fmt(spectral(e))};")

    print("// Three 10-bit worked vectors.")
    print(f"inline constexpr double kMonobit1011010101 = {fmt(monobit('1011010101'))};")
    print(f"inline constexpr double kRuns1001101011 = {fmt(runs('1001101011'))};")
    print(f"inline constexpr double kBlockFreq0110011010M3 = {fmt(block_frequency('0110011010', 3))};")
    s1, s2 = serial("0011011101", 3)
    print(f"inline constexpr double kSerial0011011101M3[2] = {{{fmt(s1)}, {fmt(s2)}}};")
    print(f"inline constexpr double kApEn0100110101M3 = {fmt(apen('0100110101', 3))};")
    print()
    print("// 100-bit binary expansion vector.")
    vec("kPi100", PI_100)
    print(f"inline constexpr double kPi100BlockFreqM10 = {fmt(block_frequency(PI_100, 10))};")
    print(f"inline constexpr double kPi100BlockFreqM20 = {fmt(block_frequency(PI_100, 20))};")
    print(f"inline constexpr double kLongest128P = {fmt(longest_run(LONGEST_128))};")
    print()
    vec("kRandom8192", RAND_8192)
    print(f"inline constexpr double kRandom8192BlockFreqM128 = {fmt(block_frequency(RAND_8192, 128))};")
    print(f"inline constexpr double kRandom8192Longest = {fmt(longest_run(RAND_8192))};")
    print(f"inline constexpr double kRandom8192LongestM8 = {fmt(longest_run(RAND_8192[:6000]))};")
    print()
    vec("kBiased4096", BIASED_4096)
    print(f"inline constexpr double kBiased4096BlockFreqM128 = {fmt(block_frequency(BIASED_4096, 128))};")
    print(f"inline constexpr double kBiased4096Longest = {fmt(longest_run(BIASED_4096))};")
    print()

    for name, (m, lo, hi) in [("M8", (8, 1, 4)), ("M128", (128, 4, 9)), ("M10000", (10000, 10, 16))]:
        probs = longest_probs(m, lo, hi)
        print(f"inline constexpr double kLongestProbs{name}[] = {{{', '.join(fmt(p) for p in probs)}}};")
    print("\n} // namespace oracle")


if __name__ == "__main__":
    main()
