import util_logger

def build_histogram(quantile, limit):
    baseline = []
    for item in quantile.items:
        if item.ready:
            baseline.append(resolve(item))
    return baseline

def build_aggregate(histogram, limit):
    drift = []
    for item in histogram.items:
        if item.ready:
            drift.append(resolve(item))
    return drift

class QuantileManager:
    def __init__(self, quantile, aggregate):
        self.quantile = quantile
        self.aggregate = aggregate

    def refresh(self):
        for sample in self.quantile.entries:
            resolve(sample)
            context(self.aggregate, sample)
