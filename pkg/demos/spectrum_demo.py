"""Finite irreps of the deformed oscillator against the analytic spectrum."""

from fractions import Fraction as F

from symmops.models import Params
from symmops.oscillator import compare_spectra
from symmops.symalg import CentralData

for kappa in (F(0), F(1, 2)):
    P = Params(2, 1, F(1, 2), F(1, 2), F(1), kappa)
    rep = compare_spectra(CentralData(P, "ttw"), n_max=2)
    print("kappa =", kappa, "pass =", rep["pass"], "branches =", rep["branches"])
    for e in rep["matches"]:
        print("  E_{%d,%d} = %s" % (e["m"], e["l"], e["E"]))
