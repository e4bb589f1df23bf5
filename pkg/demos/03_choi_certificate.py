"""
Channels from mixed-state families
==================================

Extract the Choi matrix of a lifted random channel, check it against the
Kraus operators, then watch the transpose fail complete positivity.
"""

import numpy as np

from loclab import linalg as la
from loclab.latrans import SamplingConfig, lift_channel, zoo
from loclab.reconstruct import apply_choi, certify, choi_from_kraus, extract_choi

kraus = la.random_kraus_channel(2, 3, rank=3, seed=7)
choi = extract_choi(lift_channel(kraus))
print("Choi vs Kraus sum:", np.linalg.norm(choi.matrix - choi_from_kraus(kraus).matrix))
print("cp defect:", choi.cp_defect, " tp defect:", choi.tp_defect)

rho = la.random_density(2, seed=8)
direct = sum(k @ rho @ k.conj().T for k in kraus)
print("apply_choi error:", np.linalg.norm(apply_choi(choi, rho) - direct))

cfg = SamplingConfig(trials=100, env_dims=(2,))
for name in ("constant_mixed", "transpose_mixed"):
    cert = certify(zoo(name), cfg)
    print(f"{name}: {cert.verdict} ({cert.classification})")
    for note in cert.notes:
        print("   ", note)
