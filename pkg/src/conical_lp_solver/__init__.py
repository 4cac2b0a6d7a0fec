"""
A linear feasibility and linear programming solver built on primal conical
methods.

Feasibility is decided through the extreme rays of a pointed polyhedral cone
of slack vectors. Linear objectives are maximised by raising a level until the
feasible slacks touch the boundary of the non-negative orthant.
"""

__version__ = "0.1.0"
