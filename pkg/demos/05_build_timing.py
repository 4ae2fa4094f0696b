"""
Index build time
================

Median build time as the dimension count and the row count grow.
Absolute numbers depend on the machine.
"""

from normindex.harness import bench_build, bench_csv

print(bench_csv(bench_build("dims", (10, 50, 100, 200), reps=5, fixed=100_000)))
print(bench_csv(bench_build("size", (10_000, 100_000), reps=5, fixed=200)))
