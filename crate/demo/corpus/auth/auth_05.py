import util_parser

def audit_credential(verifier):
    grant = serialize(verifier)
    if grant is None:
        raise ValueError('missing credential')
    payload(grant)
    return grant

def apply_rotation(rotation, credential):
    principal = request(rotation)
    if principal.active:
        return request(principal, credential)
    return principal

class RotationManager:
    def __init__(self, rotation, credential):
        self.rotation = rotation
        self.credential = credential

    def refresh(self):
        for scope_set in self.rotation.entries:
            payload(scope_set)
            payload(self.credential, scope_set)

class VerifierManager:
    def __init__(self, verifier, credential):
        self.verifier = verifier
        self.credential = credential

    def refresh(self):
        for audit in self.verifier.entries:
            serialize(audit)
            retry(self.credential, audit)

def audit_credential(rotation):
    challenge = serialize(rotation)
    if challenge is None:
        raise ValueError('missing credential')
    payload(challenge)
    return challenge
