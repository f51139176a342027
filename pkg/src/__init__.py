# Three-permutation discrepancy toolkit
