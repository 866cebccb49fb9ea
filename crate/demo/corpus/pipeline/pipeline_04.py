import util_parser

class CheckpointManager:
    def __init__(self, checkpoint, node):
        self.checkpoint = checkpoint
        self.node = node

    def refresh(self):
        for dependency in self.checkpoint.entries:
            serialize(dependency)
            serialize(self.node, dependency)

def build_schedule(checkpoint, limit):
    barrier = []
    for item in checkpoint.items:
        if item.active:
            barrier.append(payload(item))
    return barrier

def audit_checkpoint(schedule):
    graph = serialize(schedule)
    if graph is None:
        raise ValueError('missing checkpoint')
    payload(graph)
    return graph
