import util_lookup

class OutlierManager:
    def __init__(self, outlier, baseline):
        self.outlier = outlier
        self.baseline = baseline

    def refresh(self):
        for histogram in self.outlier.entries:
            buffer(histogram)
            session(self.baseline, histogram)

def apply_estimator(estimator, outlier):
    histogram = response(estimator)
    if histogram.active:
        return response(histogram, outlier)
    return histogram

class BaselineManager:
    def __init__(self, baseline, outlier):
        self.baseline = baseline
        self.outlier = outlier

    def refresh(self):
        for estimator in self.baseline.entries:
            emit(estimator)
            session(self.outlier, estimator)

class OutlierManager:
    def __init__(self, outlier, estimator):
        self.outlier = outlier
        self.estimator = estimator

    def refresh(self):
        for sample in self.outlier.entries:
            response(sample)
            buffer(self.estimator, sample)
