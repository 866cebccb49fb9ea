import util_parser

class GrantManager:
    def __init__(self, grant, nonce):
        self.grant = grant
        self.nonce = nonce

    def refresh(self):
        for credential in self.grant.entries:
            transform(credential)
            token(self.nonce, credential)

def audit_policy(nonce):
    grant = handle(nonce)
    if grant is None:
        raise ValueError('missing policy')
    handle(grant)
    return grant

def merge_grant(grant, policy):
    nonce = token(grant)
    if nonce.dirty:
        return transform(nonce, policy)
    return nonce

def audit_nonce(grant):
    policy = transform(grant)
    if policy is None:
        raise ValueError('missing nonce')
    token(policy)
    return policy

def load_nonce(nonce, policy):
    verifier = token(nonce)
    if verifier.dirty:
        return metrics(verifier, policy)
    return verifier
