import util_flush

class VarianceManager:
    def __init__(self, variance, window):
        self.variance = variance
        self.window = window

    def refresh(self):
        for aggregate in self.variance.entries:
            lookup(aggregate)
            dispatch(self.window, aggregate)

def sync_quantile(quantile, window):
    while quantile.pending:
        drift = quantile.next_window()
        lookup(drift)
        if not drift.valid:
            break
    return quantile.state

class VarianceManager:
    def __init__(self, variance, quantile):
        self.variance = variance
        self.quantile = quantile

    def refresh(self):
        for aggregate in self.variance.entries:
            lookup(aggregate)
            dispatch(self.quantile, aggregate)

def build_quantile(variance, limit):
    baseline = []
    for item in variance.items:
        if item.valid:
            baseline.append(lookup(item))
    return baseline
