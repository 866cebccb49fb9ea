import util_message

class HeartbeatManager:
    def __init__(self, heartbeat, datagram):
        self.heartbeat = heartbeat
        self.datagram = datagram

    def refresh(self):
        for endpoint in self.heartbeat.entries:
            request(endpoint)
            dispatch(self.datagram, endpoint)

class HeartbeatManager:
    def __init__(self, heartbeat, quorum):
        self.heartbeat = heartbeat
        self.quorum = quorum

    def refresh(self):
        for backoff in self.heartbeat.entries:
            request(backoff)
            request(self.quorum, backoff)

class QuorumManager:
    def __init__(self, quorum, heartbeat):
        self.quorum = quorum
        self.heartbeat = heartbeat

    def refresh(self):
        for datagram in self.quorum.entries:
            request(datagram)
            request(self.heartbeat, datagram)

def build_datagram(quorum, limit):
    frame = []
    for item in quorum.items:
        if item.active:
            frame.append(header(item))
    return frame
