#!/usr/bin/env python3
"""Arbitrary-precision oracle for the frozen test fixtures.

Evaluates the Dirichlet marginal-likelihood gamma products, posterior
entropies, and BIC values for the small worked datasets directly from
their definitions, at 60 significant digits. Test constants in the Rust
crates are frozen from this script's output; run it to regenerate.
"""

from mpmath import mp, mpf, gamma, log, exp

mp.dps = 60


def bd_family(counts, alpha_cell):
    """Product over parent configs of Gamma(a_j)/Gamma(a_j+n_j) * prod_k Gamma(a_jk+n_jk)/Gamma(a_jk).

    counts: list of per-config count vectors (observed configs only).
    alpha_cell: pseudo-count per cell.
    """
    total = mpf(1)
    for cfg in counts:
        r = len(cfg)
        a_j = alpha_cell * r
        n_j = sum(cfg)
        term = gamma(a_j) / gamma(a_j + n_j)
        for n in cfg:
            term *= gamma(alpha_cell + n) / gamma(alpha_cell)
        total *= term
    return total


def bdeu_family(counts, r, q, alpha):
    return bd_family(counts, mpf(alpha) / (r * q))


def bds_family(counts, r, alpha):
    q_tilde = len(counts)
    return bd_family(counts, mpf(alpha) / (r * q_tilde))


def posterior_entropy(counts, alpha_cell):
    h = mpf(0)
    for cfg in counts:
        r = len(cfg)
        n_j = sum(cfg)
        for n in cfg:
            p = (alpha_cell + n) / (r * alpha_cell + n_j)
            h -= p * log(p)
    return h


def empirical_entropy(counts):
    h = mpf(0)
    for cfg in counts:
        n_j = sum(cfg)
        for n in cfg:
            if n > 0:
                p = mpf(n) / n_j
                h -= p * log(p)
    return h


def bic_family(counts, r, q, n):
    ll = mpf(0)
    for cfg in counts:
        n_j = sum(cfg)
        for c in cfg:
            if c > 0:
                ll += c * log(mpf(c) / n_j)
    return ll - (r - 1) * q / mpf(2) * log(mpf(n))


def show(label, v, digits=12):
    print(f"{label:55s} = {mp.nstr(v, digits)}")


# --- dataset D1: X | Z,W and X | Z,W,Y (12 rows, binary) ---
d1_zw = [[2, 1], [1, 2], [1, 2], [2, 1]]          # q = 4, all observed
d1_zwy = [[2, 1], [1, 2], [1, 2], [2, 1]]         # q = 8, 4 observed

print("== D1, family X|{Z,W} (r=2, q=4) and X|{Z,W,Y} (r=2, q=8) ==")
show("BDeu(X|Z,W; a=1)", bdeu_family(d1_zw, 2, 4, 1))
show("BDeu(X|Z,W,Y; a=1)", bdeu_family(d1_zwy, 2, 8, 1))
show("BDs(X|Z,W; a=1)", bds_family(d1_zw, 2, 1))
show("BDs(X|Z,W,Y; a=1)", bds_family(d1_zwy, 2, 1))
show("H(X|Z,W) empirical", empirical_entropy(d1_zw))
show("H(X|Z,W; 1) posterior (a*=1/8)", posterior_entropy(d1_zw, mpf(1) / 8))
show("H(X|Z,W,Y; 1) posterior (a*=1/16)", posterior_entropy(d1_zwy, mpf(1) / 16))
show("Htilde(X|Z,W,Y; 1) posterior (atilde=1/8)", posterior_entropy(d1_zwy, mpf(1) / 8))

print()
print("== D2, same families, singular ==")
d2_zw = [[3, 0], [0, 3], [0, 3], [3, 0]]
d2_zwy = [[3, 0], [0, 3], [0, 3], [3, 0]]
show("BDeu(X|Z,W; a=1)", bdeu_family(d2_zw, 2, 4, 1))
show("BDeu(X|Z,W,Y; a=1)", bdeu_family(d2_zwy, 2, 8, 1))
show("BDs(X|Z,W,Y; a=1)", bds_family(d2_zwy, 2, 1))
show("H empirical (both)", empirical_entropy(d2_zw))
show("H(X|Z,W; 1) posterior (a*=1/8)", posterior_entropy(d2_zw, mpf(1) / 8))
show("H(X|Z,W,Y; 1) posterior (a*=1/16)", posterior_entropy(d2_zwy, mpf(1) / 16))
show("Htilde(X|Z,W,Y; 1) (atilde=1/8)", posterior_entropy(d2_zwy, mpf(1) / 8))

print()
print("== D3 (7 rows): network BDs totals, a=1 ==")
# G1 = {Y -> X}: node Y marginal counts (0,7); node X | Y: only Y=1 observed, counts (2,5)
y_marginal = [[0, 7]]
x_marginal = [[2, 5]]
x_given_y = [[2, 5]]            # q~ = 1
y_given_x = [[0, 2], [0, 5]]    # q~ = 2
g1 = bds_family(y_marginal, 2, 1) * bds_family(x_given_y, 2, 1)
g2 = bds_family(x_marginal, 2, 1) * bds_family(y_given_x, 2, 1)
g0 = bds_family(x_marginal, 2, 1) * bds_family(y_marginal, 2, 1)
show("BDs(G1 = Y->X)", g1)
show("BDs(G2 = X->Y)", g2)
show("BDs(G0 = empty)", g0)

print()
print("== closed-form BD spot checks ==")
show("BD a_ijk=1, counts (1,1)", bd_family([[1, 1]], mpf(1)))
show("BD a_ijk=1/2, counts (1,0)", bd_family([[1, 0]], mpf(1) / 2))

print()
print("== BIC ==")
show("BIC counts (5,5), no parents", bic_family([[5, 5]], 2, 1, 10))
show("BIC counts (10,0), no parents", bic_family([[10, 0]], 2, 1, 10))

print()
print("== theorem limit grids on D1/D2 G+ family ==")
for a in ["1e-6", "1e-4", "1e-2", "1"]:
    v = bdeu_family(d1_zwy, 2, 8, mpf(a))
    print(f"  log BDeu(D1 X|ZWY; a={a:>5s}) = {mp.nstr(log(v), 12)}")
for a in ["1e-6", "1e8"]:
    ratio1 = bds_family(d1_zwy, 2, 1 if a == "1" else mpf(a)) / bdeu_family(d1_zwy, 2, 8, mpf(a))
    ratio2 = bds_family(d2_zwy, 2, mpf(a)) / bdeu_family(d2_zwy, 2, 8, mpf(a))
    print(f"  a={a:>5s}: BDs/BDeu D1 G+ = {mp.nstr(ratio1, 12)}  D2 G+ = {mp.nstr(ratio2, 12)}")
show("BDeu(D2 X|Z,W; a=1e-8)", bdeu_family(d2_zw, 2, 4, mpf("1e-8")))

print()
print("== D1 parentless families (Z, W, Y marginals), a=1 ==")
show("BDeu(Z; a=1), counts (6,6)", bdeu_family([[6, 6]], 2, 1, 1))
show("BDeu(W; a=1), counts (6,6)", bdeu_family([[6, 6]], 2, 1, 1))
show("BDeu(Y; a=1), counts (9,3)", bdeu_family([[9, 3]], 2, 1, 1))
g_minus_total = (bdeu_family(d1_zw, 2, 4, 1) * bdeu_family([[6, 6]], 2, 1, 1) ** 2
                 * bdeu_family([[9, 3]], 2, 1, 1))
show("network BDeu(D1, G-)", g_minus_total)
show("log network BDeu(D1, G-)", log(g_minus_total))
