class PPParseError(Exception):
    pass


class PPFieldMismatch(Exception):
    pass


class PPNotExactQuotient(Exception):
    pass


class PPDegreeCapExceeded(Exception):
    pass


class PPCompositeModulus(Exception):
    pass


class PPInvalidPolynomial(Exception):
    pass


class PPCycleBoundExceeded(Exception):
    pass


class PPUnknownLabel(Exception):
    pass


class PPAutIdentityFailed(Exception):
    pass


class PPSym2ConventionNotFound(Exception):
    pass


class PPPadicDepthExceeded(Exception):
    pass


class PPUnsupported(Exception):
    pass


class PPReconstructionFailed(Exception):
    pass


class PPCensusRefused(Exception):
    pass


class PPUnboundedRegion(Exception):
    pass


class PPNonCoprimeForms(Exception):
    pass


class PPCatalogChecksum(Exception):
    pass
