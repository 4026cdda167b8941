from fractions import Fraction

import ppcount
from ppcount.arith import QuadField
from ppcount.curves import get_record

pp = ppcount.api()

record_8211 = get_record("8(2,1,1)")
pair_8211 = record_8211.pi.homogenize()
record_42 = get_record("4(2)")

c_8211 = Fraction(-91, 36)
c_42 = Fraction(-7, 4)

gaussian = QuadField(-1)
root2 = QuadField(2)
