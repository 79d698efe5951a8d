""" Errors raised by django-fixpoints. Each carries the offending
value in its message; parse errors also carry their position.
"""


class FixpointsError(Exception):
    pass


class InputError(FixpointsError, ValueError):
    pass


class ResourceError(FixpointsError):
    pass


class DimacsParseError(InputError):

    def __init__(self, line, message):
        self.line = line
        super(DimacsParseError, self).__init__(
            "line {0}: {1}".format(line, message))


class AssemblyError(InputError):

    def __init__(self, line, message):
        self.line = line
        super(AssemblyError, self).__init__(
            "line {0}: {1}".format(line, message))


class DecodeError(InputError):

    def __init__(self, offset, message):
        self.offset = offset
        super(DecodeError, self).__init__(
            "offset {0}: {1}".format(offset, message))


class ContractViolation(FixpointsError):
    pass


class ConstructionError(FixpointsError):
    pass


class BoundNotFound(FixpointsError):
    """ No self-consistent bound was found below the cap. The full
    search transcript is kept for the report.
    """

    def __init__(self, classifier_name, t_cap, transcript):
        self.classifier_name = classifier_name
        self.t_cap = t_cap
        self.transcript = list(transcript)
        super(BoundNotFound, self).__init__(
            "no self-consistent bound for {0} up to t = {1} "
            "({2} bounds tried)".format(
                classifier_name, t_cap, len(self.transcript)))


class AdapterError(FixpointsError):
    pass


class CertificateFormatError(FixpointsError):
    pass
