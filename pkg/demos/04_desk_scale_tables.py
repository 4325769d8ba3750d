"""Small-scale versions of the three experiments.

Writes CSV to stdout.  Takes a few seconds.

Run:  python3 demos/04_desk_scale_tables.py
"""
from relaxec import run_experiment

# %% Boundary formula vs cut image at the first cut of doubled multipliers.
t1 = run_experiment("table1", ks=(4, 5))
print(t1.to_csv())
print("summary:", t1.summary, "\n")

# %% The approximate variant on h-gated pairs.
t2 = run_experiment("table2", ks=(2, 3))
print(t2.to_csv())
print("summary:", t2.summary, "\n")

# %% alpha vs beta on buggy 8-bit multipliers with cut-equality at cut 3.
t3 = run_experiment("table3", k=8, seeds=6, cut=3)
print(t3.to_csv())
s = t3.summary
print(f"median decisions: alpha {s['median_alpha_decisions']}, beta {s['median_beta_decisions']}")
