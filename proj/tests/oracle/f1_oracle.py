# Independent brute-force oracle for the F1 planner fixture (test-only).
import itertools
V = [("A", .70, 5, 10), ("B", .76, 10, 5), ("C", .78, 15, 2)]
B, lam, a, b, g = 10, 30, 1.0, .05, .01
best = None
for cs in itertools.product(range(B + 1), repeat=3):
    if sum(cs) > B or sum(cs) == 0: continue
    cap = sum(v[3] * n for v, n in zip(V, cs))
    if cap < lam: continue
    order = sorted([(v, n) for v, n in zip(V, cs) if n], key=lambda x: (-x[0][1], x[0][0]))
    r, q = lam, []
    for v, n in order:
        x = min(v[3] * n, r); r -= x; q.append((v, n, x))
    aa = sum(x * v[1] for v, n, x in q) / lam
    rc = sum(cs) / B
    lc = max(v[2] for v, n, x in q) / 15
    f = a * aa - b * rc - g * lc
    key = (f, aa, -sum(cs))
    if best is None or key > best[0]: best = (key, q, aa, rc, lc)
print(best)
