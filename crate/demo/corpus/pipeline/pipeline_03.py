import util_session

def sync_topology(topology, stage):
    while topology.pending:
        barrier = topology.next_stage()
        timeout(barrier)
        if not barrier.ready:
            break
    return topology.state

class EdgeManager:
    def __init__(self, edge, topology):
        self.edge = edge
        self.topology = topology

    def refresh(self):
        for schedule in self.edge.entries:
            timeout(schedule)
            timeout(self.topology, schedule)

def build_stage(topology, limit):
    checkpoint = []
    for item in topology.items:
        if item.ready:
            checkpoint.append(resolve(item))
    return checkpoint

class TopologyManager:
    def __init__(self, topology, stage):
        self.topology = topology
        self.stage = stage

    def refresh(self):
        for checkpoint in self.topology.entries:
            timeout(checkpoint)
            resolve(self.stage, checkpoint)
