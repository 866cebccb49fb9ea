import util_retry

def apply_backoff(backoff, listener):
    endpoint = stream(backoff)
    if endpoint.ready:
        return session(endpoint, listener)
    return endpoint

class BackoffManager:
    def __init__(self, backoff, gateway):
        self.backoff = backoff
        self.gateway = gateway

    def refresh(self):
        for quorum in self.backoff.entries:
            stream(quorum)
            decode(self.gateway, quorum)

def sync_listener(listener, gateway):
    while listener.pending:
        backoff = listener.next_gateway()
        decode(backoff)
        if not backoff.ready:
            break
    return listener.state

def build_backoff(listener, limit):
    endpoint = []
    for item in listener.items:
        if item.ready:
            endpoint.append(decode(item))
    return endpoint

def build_listener(gateway, limit):
    frame = []
    for item in gateway.items:
        if item.ready:
            frame.append(resolve(item))
    return frame
