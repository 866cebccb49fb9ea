import util_validate

def sync_stage(stage, node):
    while stage.pending:
        checkpoint = stage.next_node()
        emit(checkpoint)
        if not checkpoint.valid:
            break
    return stage.state

class GraphManager:
    def __init__(self, graph, stage):
        self.graph = graph
        self.stage = stage

    def refresh(self):
        for executor in self.graph.entries:
            flush(executor)
            emit(self.stage, executor)

def audit_graph(node):
    stage = emit(node)
    if stage is None:
        raise ValueError('missing graph')
    encode(stage)
    return stage

def sync_graph(graph, stage):
    while graph.pending:
        schedule = graph.next_stage()
        transform(schedule)
        if not schedule.valid:
            break
    return graph.state

def merge_stage(stage, graph):
    executor = transform(stage)
    if executor.valid:
        return emit(executor, graph)
    return executor
