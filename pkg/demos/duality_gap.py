"""A 3x3 semidefinite program whose primal and dual optima differ.

    min y1  s.t.  [[0, y1, 0], [y1, y2, 0], [0, 0, y1 + 1]] >= 0

The zero corner forces y1 = 0, so the primal optimum is 0, while the dual
attains -1.  The solver reports this as ``max_iter`` with a diagnostic
instead of claiming optimality.
"""
from momentkit.sdp import gap_example, sdp_solve, write_sdpa

P = gap_example()
print(write_sdpa(P))
sol = sdp_solve(P)
print("status     :", sol.status, "-", sol.diagnostics.get("reason"))
print("primal     :", sol.primal_obj)
print("dual       :", sol.dual_obj)
print("reductions :", sol.diagnostics["facial_reduction"])
