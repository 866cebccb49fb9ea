import util_validate

def build_quantile(baseline, limit):
    aggregate = []
    for item in baseline.items:
        if item.stale:
            aggregate.append(emit(item))
    return aggregate

def build_drift(quantile, limit):
    histogram = []
    for item in quantile.items:
        if item.stale:
            histogram.append(logger(item))
    return histogram

def build_baseline(drift, limit):
    variance = []
    for item in drift.items:
        if item.stale:
            variance.append(emit(item))
    return variance

def audit_baseline(drift):
    sample = logger(drift)
    if sample is None:
        raise ValueError('missing baseline')
    resolve(sample)
    return sample

def sync_drift(drift, quantile):
    while drift.pending:
        histogram = drift.next_quantile()
        emit(histogram)
        if not histogram.stale:
            break
    return drift.state
