# %% [markdown]
# # Matching, stabilizer censuses, and small-cancellation certificates
#
# Three detectors on the geodesic [x, w_n x] of a random word, all exact
# string combinatorics on the tree (Hausdorff slack 0):
#
# * matches with a translate of a fixed axis,
# * occurrences of a fixed test pattern (non-matching),
# * pairs of disjoint subsegments equal up to a translate (self-matching).

# %%
from fractions import Fraction

from hypwalk import FiniteMeasure, FreeGroupOracle, fellow_traveling_delta, stab_census
from hypwalk import experiments as E
from hypwalk import words as W

oracle = FreeGroupOracle(2)
measure = FiniteMeasure(
    oracle,
    [(W.word_to_str((g,)), (g,), Fraction(1, 4)) for g in (1, -1, 2, -2)],
    attest_non_elementary=True,
)

print("match 'abab' on the (ab)-axis, L=4:", W.match_detect(W.str_to_word("abab"), W.str_to_word("ab"), 4))
print("self-match in 'abab', L=2:", W.self_match_detect(W.str_to_word("abab"), 2))

# %% [markdown]
# Frequencies over random words: short axis matches are generic, long
# fixed patterns never appear, and long self-matches die off as n grows.

# %%
axis = E.match_census("axis", measure, seed=23, trials=100, n=400,
                      axis_core=W.str_to_word("ab"), L=4)
print("axis-match frequency at L=4:", axis.aggregates["frequency"])

non = E.match_census("non", measure, seed=23, trials=100, n=400)
print("fixed-pattern frequencies by prefix length:",
      {s: a["frequency"] for s, a in non.aggregates["per_s"].items()})

self_m = E.match_census("self", measure, seed=23, trials=100, n_grid=[100, 300])
print("self-match frequencies:",
      {n: a["frequency"] for n, a in self_m.aggregates["per_n"].items()})

# %% [markdown]
# Joint coarse stabilizers: |Stab_K(x, w_n x)| counted by brute-force ball
# enumeration.  The free action keeps the census at 1; what matters is that
# its quantiles do not grow with n (asymptotic acylindricality).

# %%
print("census for w = a^10, K = 2:", stab_census(W.power((1,), 10), 2, rank=2))
stab = E.stab_acylindricity(measure, K=2, n_grid=[50, 200], trials=100, seed=29)
print("99%-quantile census per n:",
      {n: a["quantile_count"] for n, a in stab.aggregates["per_n"].items()})

# %% [markdown]
# The fellow-travelling constant Delta(w): the longest overlap between the
# axis of w and any translate by an element outside the axis stabilizer.
# On a tree it is exact string periodicity of the cyclic core; the
# small-cancellation certificate compares it against epsilon * tau(w).

# %%
for word in ("ab", "aab", "abAB"):
    w = W.str_to_word(word)
    print(f"Delta({word}) = {fellow_traveling_delta(w)}, tau = {W.translation_length(w)}")

cert = E.small_cancellation_certificate(W.power(W.str_to_word("ab"), 10), A=1.0, epsilon=0.1)
print("certificate for (ab)^10:", cert)

generic = E.small_cancellation_experiment(measure, n=400, trials=60, seed=31, epsilon=0.1)
print("certificate pass frequency at n=400:", generic.aggregates["pass_frequency"],
      "| max Delta seen:", generic.aggregates["max_delta"])
