"""Interpolants as boundary formulas, including broken implications.

Run:  python3 demos/05_interpolation.py
"""
from relaxec import CnfFormula, broken_interpolant, extract_interpolant
from relaxec.bench import gen_mlp, inject_bug
from relaxec.relax import CutSplit, compare_relaxations, extend_counterexample

# %% A(x, y) = x & (x -> y);  B(y, z) = !y & z.  A & B is unsatisfiable.
A = CnfFormula([(1,), (-1, 2)])
B = CnfFormula([(-2,), (3,)])
print("interpolant over y:", extract_interpolant(A, B).clauses)

# %% Break the implication: B no longer forces !y.
B2 = CnfFormula([(2, 3), (-3,)])
H, w = broken_interpolant(A, B2)
print("broken: H =", H.clauses, "short counterexample", {"y": w["y"], "z": w["z"]})
print("extended to A & B:", extend_counterexample(A, B2, w["y"], w["z"]))

# %% On a miter, dropping EQ & F_M (replacing) gives an interpolant only
# when the circuits agree; dropping EQ alone (separating) always gives a
# boundary formula.
m = gen_mlp(3)
for other in (m, inject_bug(m, 2, 0)):
    r = compare_relaxations(CutSplit.from_pair(m, other, 2))
    print(f"{other.name:10s} |H_r|={len(r.H_r.clauses)} interpolant={r.H_r_is_interpolant} "
          f"|H_s|={len(r.H_s.clauses)} cut-eq boundary={r.cut_eq_boundary_from_below}")
