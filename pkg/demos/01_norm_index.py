"""
Building and querying a norm index
==================================

Rows are sorted by Euclidean norm.  The table maps sorted positions to
original rows and back, and a norm interval is found with two binary
searches.
"""

import numpy as np

from normindex import Dataset, band_positions, build_index, dumps_index, original_of, ordered_pos_of

# four rows whose norms order as c < a < z < b
data = Dataset([[2.0, 0.0], [5.0, 0.0], [1.0, 0.0], [0.0, 3.0]])
index = build_index(data)

for pos in range(index.n):
    print(pos, original_of(index, pos))

# sorted position of row 3, and the rows with norm in [1.5, 4]
print("row 3 sits at position", ordered_pos_of(index, 3))
band = band_positions(index, 1.5, 4.0)
print("norms in [1.5, 4]:", [original_of(index, p)[0] for p in band])

# text form: one header line, then pos,original_index,norm
print(dumps_index(index))

# a larger random set
rng = np.random.default_rng(0)
big = Dataset(rng.normal(size=(10_000, 32)))
big_index = build_index(big)
print("norm range", big_index.min_norm, big_index.max_norm)
