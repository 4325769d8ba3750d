"""Partial quantifier elimination on a toy formula.

exists w [A & B] == A* & exists w [B]: only A is taken out of the scope.

Run:  python3 demos/03_partial_quantifier_elimination.py
"""
from relaxec import CnfFormula, PqeProblem, pqe_oracle, pqe_sat, pqe_solve, verify_pqe_solution
from relaxec.qe import eliminate

# x1=1, x2=2 are free; w=3 is quantified.
A = CnfFormula([(1, 3)])          # x1 | w
B = CnfFormula([(-3, 2), (-1, -2)])  # !w | x2 ; !x1 | !x2
p = PqeProblem(A, B, {3})

for name, fn in (("oracle", pqe_oracle), ("d-sequent", pqe_solve), ("cegar", pqe_sat)):
    s = fn(p)
    print(f"{name:10s} A* = {s.Astar.clauses}  verified={verify_pqe_solution(p, s)}")

# %% Full elimination of w from A & B gives more clauses: it also
# restates what B alone already says about x1, x2.
print("full QE    :", eliminate(A & B, {3}).clauses)

# %% The D-sequent engine keeps track of which A-clauses each new
# clause came from.
s = pqe_solve(p)
print("ancestry   :", s.ancestry, s.stats)
