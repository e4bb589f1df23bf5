"""
Recovering a unitary from its action on half of a Bell pair
===========================================================

A lifted unitary family is evaluated once on the maximally entangled state
between A and a copy of A. Reshaping the output gives back the unitary.
"""

import numpy as np

from loclab import linalg as la
from loclab.latrans import lift_unitary
from loclab.reconstruct import extract_pure_operator, teleport_apply

u = la.haar_unitary(3, seed=1)
family = lift_unitary(u)

# one evaluation, environment dimension = 3
chi = family.apply(la.bell_state(3), env_dim=3)
op = extract_pure_operator(family)
print("classification:", op.classification)
print("|V - U|_F =", np.linalg.norm(op.matrix - u))

# the same operator, applied through a Bell effect instead of a reshape
psi = la.random_pure(3, seed=2)
print("teleport route error:", np.linalg.norm(teleport_apply(chi, psi, 3) - u @ psi))
