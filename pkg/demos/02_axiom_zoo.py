"""
Which candidate families are locally applicable?
================================================

Run the three-axiom checker over a lifted unitary and every zoo entry.
"""

from loclab import linalg as la
from loclab.latrans import SamplingConfig, check_all, lift_unitary, zoo
from loclab.latrans.zoo import ZOO

cfg = SamplingConfig(trials=300, env_dims=(1, 2, 3), seed=0)

families = {"lifted Haar unitary": lift_unitary(la.haar_unitary(2, seed=4))}
families.update({name: zoo(name) for name in ZOO})

for label, fam in families.items():
    rep = check_all(fam, cfg)
    worst = max(rep.max_violation, key=rep.max_violation.get)
    print(f"{label:22s} {rep.verdict:4s}  worst axiom: {worst} ({rep.max_violation[worst]:.2e})")
    if rep.witnesses:
        w = rep.witnesses[0]
        print(f"{'':22s} witness [{w.kind}] env_dim={w.env_dim}: {w.message}")
