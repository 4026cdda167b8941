from ppcount.census import census_deg1, census_deg2, compare_report
from ppcount.constants import leading_constant
from ppcount.portraits import get_catalog
from ppcount.preper import portrait_Q, portrait_quad
from ppcount.verify import run_suite


class api(object):
    def __init__(self, seed=0, workers=1):
        self.seed = seed
        self.workers = workers
        self.catalog = get_catalog()

    def portrait(self, c, fld=None, method="lattice"):
        if fld is None:
            return portrait_Q(c, method)
        return portrait_quad(c, fld, method)

    def census(self, B, degree=1, mode=None, labels=None):
        if degree == 1:
            return census_deg1(B, mode or "exhaustive", self.workers)
        return census_deg2(B, labels, mode or "parametrized", self.workers)

    def constants(self, label, degree=1):
        return leading_constant(label, degree, seed=self.seed)

    def compare(self, label, degree, B_list):
        return compare_report(
            label, degree, B_list, seed=self.seed, workers=self.workers
        )

    def verify(self, suite="all"):
        return run_suite(suite, self.workers)


__all__ = [api]
