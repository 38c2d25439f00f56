'''
Binomial trees for the variance and the rate factor and their product lattice
'''

from .tree import TreeGrid1D, build_v_tree, build_x_tree, degenerate_tree
from .bivariate import BivariateLattice, joint_probs, build_lattice
