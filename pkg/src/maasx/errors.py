"""Exception hierarchy shared by every maasx module.

Each error carries an HTTP status so the gate can map failures onto
responses without a lookup table scattered across handlers.
"""


class MaasxError(Exception):
    status = 500


# aas core
class InvalidIdentifier(MaasxError, ValueError):
    status = 400


class InvalidElement(MaasxError, ValueError):
    status = 400


class NonSerializableValue(MaasxError, ValueError):
    status = 400


class NotFound(MaasxError, KeyError):
    status = 404

    def __str__(self):
        return Exception.__str__(self)


class StorageFailure(MaasxError, OSError):
    status = 500


class ConflictingRegistration(MaasxError):
    status = 409


class DanglingReference(MaasxError):
    status = 409


# templates
class EmptyProfile(MaasxError, ValueError):
    status = 422


class InvalidOrder(MaasxError, ValueError):
    status = 422


class DanglingResult(MaasxError, ValueError):
    status = 422


class ValidationFailed(MaasxError):
    status = 422

    def __init__(self, report):
        self.report = report
        msgs = "; ".join(f"{v.path}: {v.message}" for v in report.violations)
        super().__init__(f"{report.template}: {msgs}")


# mxport
class UnknownDataset(MaasxError):
    status = 404


class NegotiationTerminated(MaasxError):
    status = 403


class ExpiredToken(MaasxError):
    status = 401


class SignatureInvalid(MaasxError):
    status = 403


class AccessDenied(MaasxError):
    status = 403


class DiscoveryFailed(MaasxError):
    status = 502


class TransportError(MaasxError):
    status = 502


class BadRequest(MaasxError, ValueError):
    status = 400


# engines
class EmptyHistory(MaasxError, ValueError):
    status = 422


class MalformedGraph(MaasxError, ValueError):
    status = 422


class NoHistoryNoFallback(MaasxError):
    status = 422


class NoCapableMachine(MaasxError):
    status = 422

    def __init__(self, feature_id):
        self.feature_id = feature_id
        super().__init__(f"no capable machine for feature {feature_id}")


class NoToolCandidate(MaasxError):
    status = 422

    def __init__(self, feature_id):
        self.feature_id = feature_id
        super().__init__(f"no tool candidate for feature {feature_id}")


class ConstantSignal(MaasxError, ValueError):
    status = 422


class TooFewSamples(MaasxError, ValueError):
    status = 422


class TooFewRuns(MaasxError, ValueError):
    status = 422


class SegmentMismatch(MaasxError, ValueError):
    status = 422


# workflow
class IllegalTransition(MaasxError):
    status = 409


class NoEligibleSupplier(MaasxError):
    status = 404


class AllDeclined(MaasxError):
    status = 404


class ConfigError(MaasxError, ValueError):
    status = 500
