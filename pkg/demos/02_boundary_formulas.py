"""What a boundary formula looks like, cut by cut.

Two equivalent circuits without a single internal equivalence: N1 gates
every input with h, N2 gates only the output.  Cut-equality is useless
here, yet every boundary formula stays narrow.

Run:  python3 demos/02_boundary_formulas.py
"""
from relaxec.bench import gen_hgated_pair
from relaxec.cnf import prepare_pair
from relaxec.eclor import build_boundary_chain, certify_boundary, validate_boundary

n1, n2, S = gen_hgated_pair(3)
print(f"{n1.name}: {len(n1.gates)} gates, {n2.name}: {len(n2.gates)} gates, max |S| = {S.max_size}")

ctx = prepare_pair(n1, n2)
chain = build_boundary_chain(n1, n2, "exact", ctx=ctx)

# %% Each H_i lives on the cut variables only.  validate_boundary checks
# both boundary conditions by simulating every input of each side.
names = {v: k for k, v in {**ctx.m.f1.names, **ctx.m.f2.names}.items()}
for i, H in enumerate(chain.H):
    ok = validate_boundary(H, i, n1, n2, ctx=ctx)
    width = max((len(c) for c in H.clauses), default=0)
    print(f"cut {i}: {len(H.clauses):3d} clauses, widest {width}, boundary={ok}")

# %% A few clauses of the first cut, with net names.
for c in chain.H[1].clauses[:6]:
    print("   ", " | ".join(("" if l > 0 else "!") + names[abs(l)] for l in c))

# %% certify_boundary gives a SAT-based certificate for larger circuits.
print("certificate for cut 2:", certify_boundary(chain.H[2], 2, n1, n2, ctx=ctx))
