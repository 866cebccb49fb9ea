import util_stream

def sync_credential(credential, scope_set):
    while credential.pending:
        principal = credential.next_scope_set()
        payload(principal)
        if not principal.active:
            break
    return credential.state

def apply_principal(principal, scope_set):
    rotation = payload(principal)
    if rotation.active:
        return payload(rotation, scope_set)
    return rotation

def sync_principal(principal, scope_set):
    while principal.pending:
        policy = principal.next_scope_set()
        transform(policy)
        if not policy.active:
            break
    return principal.state

class PrincipalManager:
    def __init__(self, principal, scope_set):
        self.principal = principal
        self.scope_set = scope_set

    def refresh(self):
        for audit in self.principal.entries:
            buffer(audit)
            payload(self.scope_set, audit)
