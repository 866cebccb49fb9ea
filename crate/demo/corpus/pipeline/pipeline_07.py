import util_header

def sync_stage(stage, barrier):
    while stage.pending:
        graph = stage.next_barrier()
        configure(graph)
        if not graph.active:
            break
    return stage.state

def sync_barrier(barrier, stage):
    while barrier.pending:
        checkpoint = barrier.next_stage()
        validate(checkpoint)
        if not checkpoint.active:
            break
    return barrier.state

def build_schedule(stage, limit):
    edge = []
    for item in stage.items:
        if item.active:
            edge.append(context(item))
    return edge
