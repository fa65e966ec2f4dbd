"""Reference t and F tail probabilities at 50 significant digits (mpmath).

Writes the table used by the acceptance tests:
    python tools/tail_oracle.py > crates/validation/tests/data/tail_probabilities.txt
"""

import mpmath as mp

mp.mp.dps = 50

T_STATS = [0.5, 1, 2, 3, 5, 12]
T_DF = [1, 2, 5, 10, 30, 100, 200]
F_STATS = [0.5, 1, 2, 4, 10, 40]
F_DF = [(1, 1), (1, 10), (2, 5), (3, 96), (5, 50), (10, 200), (1, 200)]


def t_two_sided(t, df):
    t, df = mp.mpf(t), mp.mpf(df)
    return mp.betainc(df / 2, mp.mpf(1) / 2, 0, df / (df + t * t), regularized=True)


def f_upper(f, d1, d2):
    f, d1, d2 = mp.mpf(f), mp.mpf(d1), mp.mpf(d2)
    return mp.betainc(d2 / 2, d1 / 2, 0, d2 / (d2 + d1 * f), regularized=True)


def main():
    print("# kind stat df1 [df2] p  (mpmath, 50 digits)")
    for t in T_STATS:
        for df in T_DF:
            print(f"t {t} {df} {mp.nstr(t_two_sided(t, df), 20)}")
    for f in F_STATS:
        for d1, d2 in F_DF:
            print(f"f {f} {d1} {d2} {mp.nstr(f_upper(f, d1, d2), 20)}")
    print(f"f 1 1 1000000 {mp.nstr(f_upper(1, 1, 10**6), 20)}")


if __name__ == "__main__":
    main()
