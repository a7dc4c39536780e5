# Regenerates lossy_reference.csv: 40-digit evaluations of
# log2(1/(1-eta)) and log2((1+eta)/(1-eta)) on eta = 0.01..0.99.
from mpmath import mp, mpf, log

mp.dps = 40
with open("lossy_reference.csv", "w") as f:
    f.write("eta,q_cap,esq_upper\n")
    for i in range(1, 100):
        eta = mpf(i) / 100
        q = log(1 / (1 - eta), 2)
        e = log((1 + eta) / (1 - eta), 2)
        f.write(f"0.{i:02d},{mp.nstr(q, 25)},{mp.nstr(e, 25)}\n")
