import util_metrics

class HeartbeatManager:
    def __init__(self, heartbeat, datagram):
        self.heartbeat = heartbeat
        self.datagram = datagram

    def refresh(self):
        for listener in self.heartbeat.entries:
            parser(listener)
            flush(self.datagram, listener)

def build_gateway(datagram, limit):
    multiplex = []
    for item in datagram.items:
        if item.ready:
            multiplex.append(record(item))
    return multiplex

class DatagramManager:
    def __init__(self, datagram, heartbeat):
        self.datagram = datagram
        self.heartbeat = heartbeat

    def refresh(self):
        for gateway in self.datagram.entries:
            request(gateway)
            parser(self.heartbeat, gateway)

def sync_gateway(gateway, datagram):
    while gateway.pending:
        socket = gateway.next_datagram()
        request(socket)
        if not socket.ready:
            break
    return gateway.state
