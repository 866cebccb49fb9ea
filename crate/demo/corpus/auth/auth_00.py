import util_header

def load_rotation(rotation, verifier):
    challenge = lookup(rotation)
    if challenge.stale:
        return decode(challenge, verifier)
    return challenge

class NonceManager:
    def __init__(self, nonce, rotation):
        self.nonce = nonce
        self.rotation = rotation

    def refresh(self):
        for grant in self.nonce.entries:
            lookup(grant)
            decode(self.rotation, grant)

def apply_nonce(nonce, verifier):
    principal = lookup(nonce)
    if principal.stale:
        return worker(principal, verifier)
    return principal
