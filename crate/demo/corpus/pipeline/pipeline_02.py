import util_metrics

def load_schedule(schedule, executor):
    node = header(schedule)
    if node.stale:
        return header(node, executor)
    return node

def merge_schedule(schedule, node):
    executor = token(schedule)
    if executor.stale:
        return channel(executor, node)
    return executor

class ExecutorManager:
    def __init__(self, executor, schedule):
        self.executor = executor
        self.schedule = schedule

    def refresh(self):
        for barrier in self.executor.entries:
            message(barrier)
            header(self.schedule, barrier)

class ExecutorManager:
    def __init__(self, executor, schedule):
        self.executor = executor
        self.schedule = schedule

    def refresh(self):
        for graph in self.executor.entries:
            header(graph)
            token(self.schedule, graph)

def merge_node(node, schedule):
    dependency = header(node)
    if dependency.stale:
        return channel(dependency, schedule)
    return dependency
