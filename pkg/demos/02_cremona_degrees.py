# %% [markdown]
# # Plane Cremona maps through exact degree dynamics
#
# A birational self-map of the projective plane is a coprime triple of
# homogeneous polynomials.  Composition is substitution followed by
# cancelling the common factor; the degree after cancellation is the whole
# story, because the group acts on a hyperboloid with
# d(x, f.x) = arccosh(deg f).

# %%
import math

from hypwalk import CremonaModel, MonomialMap, dynamical_degree_estimate, monomial_dynamical_degree

model = CremonaModel()  # two coefficient primes tracked in lockstep
sigma = model.sigma()
print("sigma = [yz : xz : xy], degree", sigma.degree)
print("sigma o sigma == identity:", model.multiply(sigma, sigma) == model.identity())

# %% [markdown]
# The quadratic involution is why degree is not multiplicative: the formal
# composition has degree 4 but the triple (x^2 yz : x y^2 z : x y z^2)
# cancels down to the identity.  The henon family shows the opposite
# behaviour: degrees double forever.

# %%
h = model.henon(2)          # (x, y) -> (y, y^2 - x)
print("henon triple degree:", h.degree)
print("degree sequence of h:", model.degree_sequence(h, 6))
print("deg(sigma o h):", model.multiply(sigma, h).degree, "(a line cancels: 3, not 4)")

# %% [markdown]
# The dynamical degree is the growth rate lim (deg f^n)^(1/n), approached
# from above along the submultiplicative degree sequence.  For sigma the
# estimate collapses to 1 (elliptic); for henon it is exactly 2; for a
# monomial map it is the spectral radius of the exponent matrix, computed
# with no polynomial arithmetic at all.

# %%
print("lambda(sigma):", dynamical_degree_estimate(model, sigma, 6).value)
print("lambda(h):", dynamical_degree_estimate(model, h, 6).value)
fib = MonomialMap(2, 1, 1, 1)
print("lambda([[2,1],[1,1]]):", monomial_dynamical_degree(fib), "=", (3 + math.sqrt(5)) / 2)

# %% [markdown]
# Orbit distances and translation lengths on the hyperboloid: tau(f) is
# log of the dynamical degree, and the budgeted estimate converges from
# above.

# %%
print("d(x, sigma.x) = arccosh 2 =", model.displacement(sigma))
print("tau estimate for h at budget 6:", model.translation_length_estimate(h, 6), "~ log 2 =", math.log(2))
print("classify sigma:", model.classify(sigma, 6).value)
print("classify h:", model.classify(h, 6).value)
print("classify shear [[1,1],[0,1]]:", model.classify(model.monomial([1, 1, 0, 1]), 8).value)
