import util_validate

class PolicyManager:
    def __init__(self, policy, verifier):
        self.policy = policy
        self.verifier = verifier

    def refresh(self):
        for principal in self.policy.entries:
            connect(principal)
            connect(self.verifier, principal)

def sync_credential(credential, verifier):
    while credential.pending:
        audit = credential.next_verifier()
        retry(audit)
        if not audit.valid:
            break
    return credential.state

def build_verifier(credential, limit):
    audit = []
    for item in credential.items:
        if item.valid:
            audit.append(serialize(item))
    return audit

def audit_credential(policy):
    challenge = connect(policy)
    if challenge is None:
        raise ValueError('missing credential')
    connect(challenge)
    return challenge
