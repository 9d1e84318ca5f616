"""shiftchaos: symbolic-dynamics constructions with certified statistics.

Builds points of subshifts with prescribed statistical omega-limit structure
(the twelve non-recurrence cases), prescribed Birkhoff behavior, and DC1 /
alpha-DC1 scrambled pairing, then verifies the constructions against exact
finite-horizon inequalities.
"""

__version__ = "0.1.0"
