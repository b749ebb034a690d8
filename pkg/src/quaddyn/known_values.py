"""Published values used by the verification commands and the test suite."""

from fractions import Fraction as Fr

# The quadratic rational map with a rational 7-cycle through inf.
SEVEN_CYCLE_MAP = ((4655, -4826, 171), (4655, -8071, 798))
SEVEN_CYCLE = ("inf", Fr(1), Fr(0), Fr(3, 14), Fr(19, 21), Fr(1, 7), Fr(57, 35))
# for each cycle point, its rational preimage outside the cycle, in cycle order
SEVEN_CYCLE_PARTNER_PREIMAGES = (Fr(2, 19), Fr(57, 295), Fr(9, 245), Fr(563, 665), Fr(-29, 5), Fr(3, 190), Fr(27, 10))

# (c, x, canonical height, ratio) for z^2 + c with ratio below 0.015; the
# first thirteen have denominator at most 144
SMALL_HEIGHT_POLY_PAIRS = (
    (Fr(-181, 144), Fr(7, 12), 0.03433, 0.00660),
    (Fr(-1153, 576), Fr(11, 24), 0.06505, 0.00923),
    (Fr(-517, 144), Fr(17, 12), 0.06885, 0.01102),
    (Fr(-36989, 19600), Fr(153, 140), 0.12319, 0.01171),
    (Fr(-31949, 19600), Fr(27, 140), 0.12319, 0.01187),
    (Fr(-5149, 3600), Fr(23, 60), 0.10274, 0.01202),
    (Fr(-205, 144), Fr(1, 12), 0.06866, 0.01290),
    (Fr(-181, 144), Fr(11, 12), 0.06866, 0.01321),
    (Fr(-16381, 7056), Fr(97, 84), 0.13059, 0.01346),
    (Fr(-10381, 3600), Fr(121, 60), 0.12758, 0.01380),
    (Fr(-9901, 3600), Fr(131, 60), 0.12912, 0.01403),
    (Fr(-1513, 576), Fr(31, 24), 0.10590, 0.01446),
    (Fr(-373, 144), Fr(23, 12), 0.08640, 0.01459),
    (Fr(-931161001, 476985600), Fr(30379, 21840), 0.28548, 0.01382),
    (Fr(-293749, 176400), Fr(433, 420), 0.17685, 0.01405),
    (Fr(-271909, 176400), Fr(43, 420), 0.17685, 0.01413),
    (Fr(-1013082841, 476985600), Fr(10541, 21840), 0.30762, 0.01483),
    # printed with denominator 63054, which is not 252^2 = 63504; the orbit
    # listed alongside only works with 63504
    (Fr(-160021, 63504), Fr(181, 252), 0.17952, 0.01498),
)

# z^2 - 29/16 has exactly nine rational preperiodic points
NINE_POINT_POLY_C = Fr(-29, 16)

# Maps with a rational preperiodic orbit of length 8 through inf:
# (F, G, orbit, tail, period)
LENGTH_EIGHT_ORBITS = (
    ((330, -187, -143), (330, 1217, 429), (Fr(-1, 3), Fr(-11, 15), Fr(-3, 5), Fr(-55, 114), Fr(-13, 44)), 5, 3),
    # printed with -3/2 as the second cycle point; the map sends -7 to 3/2
    ((21, -84, 63), (21, -16, -21), (Fr(-3), Fr(7, 3), Fr(-1, 3), Fr(-7), Fr(3, 2)), 6, 2),
    ((52, -30, -22), (52, 245, 88), (Fr(-1, 4), Fr(-3, 8), Fr(-1), Fr(-4, 7), Fr(-9, 26)), 6, 2),
    ((120, -98, -22), (120, 749, 132), (Fr(-1, 6), Fr(-2, 9), Fr(-1, 5), Fr(-12, 65), Fr(-1, 12)), 6, 2),
    ((30, -10, -20), (30, 7, -30), (Fr(2, 3), Fr(10, 9), Fr(2, 5), Fr(6, 7), Fr(10, 3)), 6, 2),
    ((33, -429, 396), (33, -197, 132), (Fr(3), Fr(11, 3), Fr(5), Fr(33), Fr(3, 4)), 6, 2),
    ((176, 1397, -1573), (176, 500, -1144), (Fr(11, 8), Fr(-11, 2), Fr(-11, 4), Fr(55, 16), Fr(2)), 6, 2),
    ((1350, -837, -513), (1350, 5585, 1710), (Fr(-3, 10), Fr(-9, 10), Fr(-3, 5), Fr(-72, 175), Fr(-1, 6)), 6, 2),
    ((700, -95, -605), (700, 1336, 880), (Fr(-11, 16), Fr(-5, 7), Fr(-7, 11), Fr(-5, 6), Fr(-11, 70)), 6, 2),
    ((784, -416, -368), (784, 3885, 644), None, 6, 2),
    ((1428, -1668, 240), (1428, -1723, 900), None, 6, 2),
    ((308, 19292, -19600), (308, 1937, 7700), None, 6, 2),
    ((9009, -17094, 8085), (9009, -18454, -10395), None, 6, 2),
    ((5712, -5937, 225), (5712, -137612, 5400), None, 6, 2),
    ((51480, 910, -52390), (51480, 275477, -120900), None, 6, 2),
    ((24255, -277830, 253575), (24255, 314788, 65205), None, 6, 2),
)

# (triple, map, canonical height of inf, ratio) for small-height pairs (inf, phi)
SMALL_HEIGHT_RAT_PAIRS = (
    ((Fr(-1, 3), Fr(-1, 5), Fr(-3, 5)), ((10, -7, -3), (10, 37, 9)), 0.00360, 0.000466),
    ((Fr(57, 13), Fr(38, 39), Fr(76, 65)), ((48165, -54663, 6498), (48165, -49361, 1482)), 0.01425, 0.000747),
    ((Fr(7, 5), Fr(-14, 11), Fr(14, 3)), ((91, 399, -490), (91, -16, -350)), 0.01221, 0.000867),
    ((Fr(-7, 3), Fr(14, 27), Fr(14, 9)), ((1701, -427, -1274), (1701, -3222, 546)), 0.01553, 0.000919),
    ((Fr(1, 3), Fr(-1, 2), Fr(-1, 3)), ((7, -6, -1), (7, 20, -3)), 0.00721, 0.000931),
    ((Fr(-6), Fr(3, 4), Fr(3, 10)), ((60, -24, -36), (60, -143, 6)), 0.01128, 0.000935),
    ((Fr(5, 6), Fr(1, 2), Fr(2, 3)), ((42, -67, 25), (42, -75, 30)), 0.00829, 0.000958),
    ((Fr(-5, 13), Fr(-9, 13), Fr(-20, 13)), ((845, -20, -825), (845, 3302, 2145)), 0.01243, 0.001028),
)

# Multiples [n]P of P = (0, t^3 (t+1)^2) on the elliptic surface, as
# strings in t, for n = 2..6
BASE_POINT_MULTIPLES = {
    2: ("t*(t+1)**2", "t*(t+1)**4"),
    3: ("-t**2*(t+1)**2", "t**2*(t+1)**3"),
    4: ("t**2*(t+1)", "-t**2*(t+1)*(t**2+t-1)"),
    5: ("-t*(t+1)", "-t*(t+1)*(t**3+3*t**2+2*t-1)"),
    6: ("t**3*(t+1)**2*(t+2)", "-t**3*(t+1)**3*(2*t**3+6*t**2+4*t-1)"),
}
# the (x3, x4, x5, w) that [6]P gives
SIXFOLD_COORDINATES = (
    "1/(t*(t+1)*(t+2))",
    "-(t**2+t-1)/(t**2*(t+2)**2)",
    "(t+1)/(t+2)",
    "-(t+1)*(t**2+t-1)/(t*(t+2))",
)
