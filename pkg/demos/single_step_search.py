"""Single-step structured search on 1-SAT formulas.

The search needs one oracle application regardless of n: prepare the uniform
superposition, phase each assignment by its conflict count, mix amplitudes by
Hamming distance, and measure.  For soluble 1-SAT the final distribution sits
entirely on the solutions; an unsatisfied top assignment therefore proves the
formula insoluble.
"""

import numpy as np

from hoggsat import (
    assignment_bits,
    conflicts,
    grover_success_probability,
    measure_distribution,
    parse_formula,
    run_pipeline,
    solutions,
)

FORMULAS = [
    "v1 & v2 & v3",     # unique solution
    "!v1 & v2 & !v3",   # unique solution, mixed signs
    "!v2",              # 4 solutions on 3 variables
    "v1 & !v3",         # 2 solutions
    "v1 & !v1",         # insoluble
]

for text in FORMULAS:
    f = parse_formula(text, n=3)
    probs = measure_distribution(run_pipeline(f))
    top = int(np.argmax(probs))
    verdict = "SAT" if conflicts(f, top) == 0 else "UNSAT"
    print(f"{text:16s} -> ", end="")
    support = [f"{assignment_bits(a, f.n)}:{p:.3f}" for a, p in enumerate(probs) if p > 1e-9]
    print(" ".join(support), f" verdict={verdict}")
    assert verdict == ("SAT" if solutions(f) else "UNSAT")

print()
print("The distribution is uniform over exactly the solution set: each")
print("solution carries 2**-(n-m), and an empty solution set shows up as a")
print("top assignment that fails verification.")
print()

# contrast with unstructured amplitude amplification on 3 qubits
for iterations in range(4):
    p = grover_success_probability(3, iterations)
    print(f"unstructured search, {iterations} iterations: success probability {p:.4f}")
print("the structured single step reaches 1.0000 on every soluble 1-SAT instance")
