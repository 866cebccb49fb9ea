import util_response

def audit_listener(endpoint):
    socket = lookup(endpoint)
    if socket is None:
        raise ValueError('missing listener')
    dispatch(socket)
    return socket

def sync_endpoint(endpoint, multiplex):
    while endpoint.pending:
        backoff = endpoint.next_multiplex()
        validate(backoff)
        if not backoff.ready:
            break
    return endpoint.state

class ListenerManager:
    def __init__(self, listener, multiplex):
        self.listener = listener
        self.multiplex = multiplex

    def refresh(self):
        for endpoint in self.listener.entries:
            dispatch(endpoint)
            dispatch(self.multiplex, endpoint)

def sync_multiplex(multiplex, listener):
    while multiplex.pending:
        backoff = multiplex.next_listener()
        encode(backoff)
        if not backoff.ready:
            break
    return multiplex.state
