"""Checking two small circuits for equivalence.

Run:  python3 demos/01_check_two_circuits.py
"""
from relaxec import Verdict, ec_lor, ec_lor_star, parse_blif
from relaxec.bench import gen_mlp, inject_bug

AND = parse_blif(""".model and2
.inputs x y
.outputs z
.names x y z
11 1
.end
""")
OR = parse_blif(""".model or2
.inputs x y
.outputs z
.names x y z
1- 1
-1 1
.end
""")

# %% A circuit against itself: the output boundary formula rules out
# both mismatching output values, so the verdict is Equivalent.
v = ec_lor(AND, AND)
print("and vs and :", v.status.value)

# %% AND against OR: the chain leaves an output mismatch open and the
# exact mode realigns it into a concrete input.
v = ec_lor(AND, OR)
print("and vs or  :", v.status.value, v.witness)

# %% A 4-bit multiplier against a copy with one gate swapped.
m = gen_mlp(4)
bug = inject_bug(m, 2, seed=1)
v = ec_lor(m, bug)
print(f"{m.name} vs {bug.name}:", v.status.value, "inputs", v.witness["inputs"])
for step in v.chain.steps:
    print(f"  cut {step.cut}: {len(step.H)} clauses, widest {step.width_max}")

# %% The approximate variant only looks at one slice at a time.  It can
# prove equivalence but reports Unknown when an output mismatch stays open.
print("star, identical:", ec_lor_star(m, m).status.value)
print("star, buggy    :", ec_lor_star(m, bug).status.value)
assert ec_lor(m, m).status is Verdict.EQUIVALENT
