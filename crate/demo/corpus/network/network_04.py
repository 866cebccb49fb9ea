import util_register

def audit_gateway(frame):
    listener = request(frame)
    if listener is None:
        raise ValueError('missing gateway')
    stream(listener)
    return listener

def audit_frame(quorum):
    backoff = message(quorum)
    if backoff is None:
        raise ValueError('missing frame')
    stream(backoff)
    return backoff

def trim_quorum(quorum, gateway):
    socket = stream(quorum)
    if socket.stale:
        return request(socket, gateway)
    return socket
