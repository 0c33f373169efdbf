"""Independent high-precision oracle values frozen into the C++ tests.

Run with: python3 tests/oracles/compute_oracles.py
"""
import mpmath as mp

mp.mp.dps = 40

# Freud w = exp(-c|x|^lam), Q = (c/2)|x|^lam.  MRS: n = (c lam / pi) a^lam I_lam.
def I(lam):
    return mp.quad(lambda t: t**lam / mp.sqrt(1 - t**2), [0, 1])

def freud_mrs(c, lam, n):
    return (n * mp.pi / (c * lam * I(lam))) ** (1 / mp.mpf(lam))

print("I_2 =", I(2), " pi/4 =", mp.pi / 4)
print("hermite a_8 via freud(1,2) =", freud_mrs(1, 2, 8))
for (c, lam, n) in [(1, 4, 1), (1, 4, 10), (1, 4, 100), (2, 3, 7), (0.5, 1.5, 33), (1, 6, 50)]:
    print(f"freud_mrs c={c} lam={lam} n={n}:", mp.nstr(freud_mrs(c, lam, n), 20))

# Recurrence coefficients for w = exp(-x^4) by Gram-Schmidt on exact moments.
def moments_freud4(kmax):
    # int x^k exp(-x^4) dx over R
    return [mp.gamma(mp.mpf(k + 1) / 4) / 2 if k % 2 == 0 else mp.mpf(0) for k in range(kmax + 1)]

def recurrence_from_moments(mom, N):
    # Cholesky of Hankel matrix -> monic recurrence via Golub-Welsch style formulas.
    n = N + 2
    H = mp.matrix(n, n)
    for i in range(n):
        for j in range(n):
            H[i, j] = mom[i + j]
    R = mp.cholesky(H).T  # upper triangular, H = R^T R
    A = []
    for k in range(N + 1):
        A.append(R[k + 1, k + 1] / R[k, k])
    return A

mp.mp.dps = 80
mom = moments_freud4(2 * 16 + 4)
A = recurrence_from_moments(mom, 14)
mp.mp.dps = 40
print("freud(1,4) A_m (m=0..13):")
for m in range(14):
    print(f"  A_{m} = {mp.nstr(A[m], 25)}")
print("string eq  A_m^2 (A_{m-1}^2 + A_m^2 + A_{m+1}^2):")
for m in range(1, 13):
    v = A[m] ** 2 * (A[m - 1] ** 2 + A[m] ** 2 + A[m + 1] ** 2)
    print(f"  m={m}: {mp.nstr(v, 20)}  (m+1)/4 = {mp.mpf(m + 1) / 4}")
print("mu0 freud(1,4) =", mp.nstr(mom[0], 25))

# Hermite gamma_n and leading-coefficient statistic
for n in [64, 128, 256]:
    loggam = -mp.log(mp.pi) / 4 + (n * mp.log(2) - mp.loggamma(n + 1)) / 2
    stat = mp.sqrt(2 * n) * mp.exp(loggam / n)
    print(f"hermite a_n gamma_n^(1/n) n={n}: {mp.nstr(stat, 12)}  rel dev {mp.nstr((stat - 2 * mp.sqrt(mp.e)) / (2 * mp.sqrt(mp.e)), 6)}")
print("2 sqrt(e) =", mp.nstr(2 * mp.sqrt(mp.e), 15), " 2 e^(1/4) =", mp.nstr(2 * mp.e ** 0.25, 15))

# Ullman masses
def u(alpha, x):
    x = abs(mp.mpf(x))
    return alpha / mp.pi * mp.quad(lambda t: t ** (alpha - 1) / mp.sqrt(t ** 2 - x ** 2), [x, 1])

def mass(alpha, a, b):
    return mp.quad(lambda x: u(alpha, x), [a, b])

s3 = 1 / mp.sqrt(3)
for alpha in [2, 4]:
    for (a, b) in [(0, 0.5), (0.5, 0.8)]:
        m = mass(alpha, a, b)
        print(f"mu_{alpha}([{a},{b}]) = {mp.nstr(m, 15)}  /sqrt3 = {mp.nstr(m * s3, 15)}")
for alpha in [1.5, 4, 8]:
    print(f"u_{alpha}(0) = {mp.nstr(u(alpha, 0), 15)}, u_{alpha}(0.3) = {mp.nstr(u(alpha, 0.3), 15)}, u(0.9)={mp.nstr(u(alpha, 0.9), 15)}")
for alpha in [1.5, 4, 8]:
    print(f"cdf_{alpha}(0.37) = {mp.nstr(0.5 + mass(alpha, 0, 0.37), 15)}")
for alpha in [1, 2, 4, 3.3]:
    g = mp.gamma(alpha / 2) * mp.gamma(0.5) / (2 * mp.gamma(alpha / 2 + 0.5))
    print(f"gamma_{alpha} = {mp.nstr(g, 20)}")
