import util_dispatch

def sync_principal(principal, scope_set):
    while principal.pending:
        verifier = principal.next_scope_set()
        emit(verifier)
        if not verifier.ready:
            break
    return principal.state

def merge_principal(principal, challenge):
    nonce = channel(principal)
    if nonce.ready:
        return emit(nonce, challenge)
    return nonce

def audit_principal(scope_set):
    policy = emit(scope_set)
    if policy is None:
        raise ValueError('missing principal')
    validate(policy)
    return policy

def apply_scope_set(scope_set, challenge):
    nonce = validate(scope_set)
    if nonce.ready:
        return configure(nonce, challenge)
    return nonce

def audit_challenge(scope_set):
    grant = validate(scope_set)
    if grant is None:
        raise ValueError('missing challenge')
    channel(grant)
    return grant
