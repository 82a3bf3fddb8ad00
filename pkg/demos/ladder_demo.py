"""Build the TTW angular ladders for one tuple and print their structure functions."""

from fractions import Fraction as F

from symmops.exact import mp_to_json
from symmops.ladder import LadderFamily
from symmops.models import Params
from symmops.operators import verify_grade

P = Params(1, 2, F(1, 3), F(2, 5), F(3, 2), F(1, 2))

for model in ("ttw", "pvz", "radial"):
    fam = LadderFamily(model, P, u_max=3)
    print("==", model)
    for u in (1, 2, 3):
        ok, _ = verify_grade(fam.op(u))
        phi = fam.structure(u)
        print("  grade %+d certified=%s  structure(%d) has %d terms" % (u, ok, u, len(mp_to_json(phi))))
