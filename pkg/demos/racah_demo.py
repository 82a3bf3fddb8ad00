"""k = 1, kappa = 0: the quadratic algebra of the TTW generators and the fitted sigma."""

from fractions import Fraction as F

from symmops.models import Params
from symmops.symalg import build_generators, degeneration_checks

for w in (F(1), F(3, 2), F(2)):
    P = Params(1, 1, F(1, 3), F(2, 5), w, F(0))
    res, sigma = degeneration_checks(build_generators(P, "ttw"))
    print("omega = %s  sigma = %s" % (w, sigma))
    for name in sorted(res):
        print("  %-28s %s" % (name, res[name]))
