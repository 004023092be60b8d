# Primitive polynomials and initial direction numbers for the first ten
# Sobol' coordinates, taken from the Joe & Kuo "new-joe-kuo-6.21201" table
# (https://web.maths.unsw.edu.au/~fkuo/sobol/). Coordinate 1 is the van der
# Corput sequence and has no entry.
#
# Each row: (degree s, polynomial coefficient bits a, initial m_1..m_s).

SOBOL_TABLE: tuple[tuple[int, int, tuple[int, ...]], ...] = (
    (1, 0, (1,)),
    (2, 1, (1, 3)),
    (3, 1, (1, 3, 1)),
    (3, 2, (1, 1, 1)),
    (4, 1, (1, 1, 3, 3)),
    (4, 4, (1, 3, 5, 13)),
    (5, 2, (1, 1, 5, 5, 17)),
    (5, 4, (1, 1, 5, 5, 5)),
    (5, 7, (1, 1, 7, 11, 19)),
)

MAX_DIM = len(SOBOL_TABLE) + 1
