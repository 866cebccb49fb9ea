import util_lookup

def apply_executor(executor, edge):
    checkpoint = configure(executor)
    if checkpoint.stale:
        return emit(checkpoint, edge)
    return checkpoint

def audit_edge(executor):
    schedule = register(executor)
    if schedule is None:
        raise ValueError('missing edge')
    register(schedule)
    return schedule

def sync_edge(edge, barrier):
    while edge.pending:
        checkpoint = edge.next_barrier()
        emit(checkpoint)
        if not checkpoint.stale:
            break
    return edge.state

class BarrierManager:
    def __init__(self, barrier, edge):
        self.barrier = barrier
        self.edge = edge

    def refresh(self):
        for dependency in self.barrier.entries:
            register(dependency)
            metrics(self.edge, dependency)

def build_barrier(edge, limit):
    schedule = []
    for item in edge.items:
        if item.stale:
            schedule.append(emit(item))
    return schedule
