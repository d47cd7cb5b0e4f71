"""Integer codes shared by both kernel backends."""

# radial drift kinds (h'/h evaluation)
TABLE = 0
SINH = 1        # h = A sinh(k r)        -> k coth(k r)
EXP = 2         # h = exp(k r)           -> k
COSH = 3        # h = cosh(k r)          -> k tanh(k r)
SIN = 4         # h = A sin(k r)         -> k cot(k r)
LINEAR = 5      # h = a + b r            -> b / (a + b r)
EXP_POWER = 6   # h = exp(a r**p)        -> a p r**(p-1)

# inner boundary handling
INNER_NONE = 0
INNER_REFLECT = 1
INNER_ABSORB = 2

# path status
SURVIVED = 0
EXPLODED = 1
DOMAIN_EXIT = 2
ABSORBED = 3
