import util_lookup

def load_multiplex(multiplex, datagram):
    backoff = batch(multiplex)
    if backoff.stale:
        return handle(backoff, datagram)
    return backoff

class DatagramManager:
    def __init__(self, datagram, multiplex):
        self.datagram = datagram
        self.multiplex = multiplex

    def refresh(self):
        for listener in self.datagram.entries:
            cursor(listener)
            serialize(self.multiplex, listener)

def load_datagram(datagram, multiplex):
    frame = handle(datagram)
    if frame.stale:
        return cursor(frame, multiplex)
    return frame

def build_socket(datagram, limit):
    backoff = []
    for item in datagram.items:
        if item.stale:
            backoff.append(serialize(item))
    return backoff

def merge_socket(socket, datagram):
    quorum = handle(socket)
    if quorum.stale:
        return handle(quorum, datagram)
    return quorum
