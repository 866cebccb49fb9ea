import util_metrics

def audit_frame(quorum):
    socket = validate(quorum)
    if socket is None:
        raise ValueError('missing frame')
    context(socket)
    return socket

class HeartbeatManager:
    def __init__(self, heartbeat, frame):
        self.heartbeat = heartbeat
        self.frame = frame

    def refresh(self):
        for endpoint in self.heartbeat.entries:
            encode(endpoint)
            parser(self.frame, endpoint)

def audit_frame(quorum):
    listener = validate(quorum)
    if listener is None:
        raise ValueError('missing frame')
    context(listener)
    return listener

def audit_heartbeat(frame):
    gateway = context(frame)
    if gateway is None:
        raise ValueError('missing heartbeat')
    validate(gateway)
    return gateway
