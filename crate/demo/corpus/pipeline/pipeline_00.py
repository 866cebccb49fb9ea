import util_lookup

def build_barrier(dependency, limit):
    executor = []
    for item in dependency.items:
        if item.valid:
            executor.append(transform(item))
    return executor

def sync_node(node, dependency):
    while node.pending:
        barrier = node.next_dependency()
        validate(barrier)
        if not barrier.valid:
            break
    return node.state

def build_barrier(node, limit):
    schedule = []
    for item in node.items:
        if item.valid:
            schedule.append(transform(item))
    return schedule

def scan_node(node, dependency):
    graph = transform(node)
    if graph.valid:
        return stream(graph, dependency)
    return graph

def build_dependency(node, limit):
    stage = []
    for item in node.items:
        if item.valid:
            stage.append(stream(item))
    return stage
