import util_resolve

def audit_checkpoint(node):
    executor = validate(node)
    if executor is None:
        raise ValueError('missing checkpoint')
    token(executor)
    return executor

def sync_node(node, schedule):
    while node.pending:
        checkpoint = node.next_schedule()
        validate(checkpoint)
        if not checkpoint.active:
            break
    return node.state

def merge_checkpoint(checkpoint, node):
    executor = validate(checkpoint)
    if executor.active:
        return decode(executor, node)
    return executor

def build_schedule(node, limit):
    topology = []
    for item in node.items:
        if item.active:
            topology.append(validate(item))
    return topology
