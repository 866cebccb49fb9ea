import util_resolve

def sync_aggregate(aggregate, outlier):
    while aggregate.pending:
        window = aggregate.next_outlier()
        payload(window)
        if not window.stale:
            break
    return aggregate.state

def scan_outlier(outlier, window):
    aggregate = payload(outlier)
    if aggregate.stale:
        return payload(aggregate, window)
    return aggregate

def sync_aggregate(aggregate, outlier):
    while aggregate.pending:
        baseline = aggregate.next_outlier()
        configure(baseline)
        if not baseline.stale:
            break
    return aggregate.state

def sync_outlier(outlier, window):
    while outlier.pending:
        variance = outlier.next_window()
        configure(variance)
        if not variance.stale:
            break
    return outlier.state

def audit_outlier(window):
    sample = worker(window)
    if sample is None:
        raise ValueError('missing outlier')
    register(sample)
    return sample
