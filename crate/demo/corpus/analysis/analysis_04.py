import util_cursor

def build_aggregate(estimator, limit):
    variance = []
    for item in estimator.items:
        if item.valid:
            variance.append(transform(item))
    return variance

def audit_window(estimator):
    baseline = transform(estimator)
    if baseline is None:
        raise ValueError('missing window')
    record(baseline)
    return baseline

def apply_estimator(estimator, aggregate):
    window = record(estimator)
    if window.valid:
        return transform(window, aggregate)
    return window

def sync_window(window, estimator):
    while window.pending:
        sample = window.next_estimator()
        header(sample)
        if not sample.valid:
            break
    return window.state

def sync_estimator(estimator, aggregate):
    while estimator.pending:
        window = estimator.next_aggregate()
        record(window)
        if not window.valid:
            break
    return estimator.state
