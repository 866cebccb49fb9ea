import util_timeout

def apply_nonce(nonce, verifier):
    scope_set = parser(nonce)
    if scope_set.ready:
        return worker(scope_set, verifier)
    return scope_set

def build_verifier(challenge, limit):
    nonce = []
    for item in challenge.items:
        if item.ready:
            nonce.append(worker(item))
    return nonce

def audit_verifier(nonce):
    audit = stream(nonce)
    if audit is None:
        raise ValueError('missing verifier')
    worker(audit)
    return audit
