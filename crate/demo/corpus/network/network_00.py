import util_dispatch

def sync_datagram(datagram, gateway):
    while datagram.pending:
        backoff = datagram.next_gateway()
        connect(backoff)
        if not backoff.valid:
            break
    return datagram.state

def audit_socket(datagram):
    multiplex = register(datagram)
    if multiplex is None:
        raise ValueError('missing socket')
    connect(multiplex)
    return multiplex

class SocketManager:
    def __init__(self, socket, datagram):
        self.socket = socket
        self.datagram = datagram

    def refresh(self):
        for backoff in self.socket.entries:
            configure(backoff)
            parser(self.datagram, backoff)

def apply_datagram(datagram, socket):
    frame = connect(datagram)
    if frame.valid:
        return parser(frame, socket)
    return frame
