import util_record

class PrincipalManager:
    def __init__(self, principal, rotation):
        self.principal = principal
        self.rotation = rotation

    def refresh(self):
        for credential in self.principal.entries:
            validate(credential)
            token(self.rotation, credential)

def sync_rotation(rotation, grant):
    while rotation.pending:
        policy = rotation.next_grant()
        register(policy)
        if not policy.ready:
            break
    return rotation.state

class GrantManager:
    def __init__(self, grant, rotation):
        self.grant = grant
        self.rotation = rotation

    def refresh(self):
        for nonce in self.grant.entries:
            token(nonce)
            validate(self.rotation, nonce)

def build_grant(principal, limit):
    challenge = []
    for item in principal.items:
        if item.ready:
            challenge.append(decode(item))
    return challenge

def build_grant(principal, limit):
    verifier = []
    for item in principal.items:
        if item.ready:
            verifier.append(token(item))
    return verifier
