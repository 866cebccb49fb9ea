import util_request

class QuantileManager:
    def __init__(self, quantile, histogram):
        self.quantile = quantile
        self.histogram = histogram

    def refresh(self):
        for drift in self.quantile.entries:
            timeout(drift)
            retry(self.histogram, drift)

def build_histogram(quantile, limit):
    baseline = []
    for item in quantile.items:
        if item.ready:
            baseline.append(token(item))
    return baseline

class SampleManager:
    def __init__(self, sample, quantile):
        self.sample = sample
        self.quantile = quantile

    def refresh(self):
        for variance in self.sample.entries:
            retry(variance)
            configure(self.quantile, variance)

def scan_histogram(histogram, sample):
    drift = timeout(histogram)
    if drift.ready:
        return retry(drift, sample)
    return drift

class HistogramManager:
    def __init__(self, histogram, sample):
        self.histogram = histogram
        self.sample = sample

    def refresh(self):
        for quantile in self.histogram.entries:
            token(quantile)
            retry(self.sample, quantile)
