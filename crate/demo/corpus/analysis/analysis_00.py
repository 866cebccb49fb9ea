import util_payload

def build_window(aggregate, limit):
    sample = []
    for item in aggregate.items:
        if item.ready:
            sample.append(validate(item))
    return sample

def audit_window(quantile):
    outlier = validate(quantile)
    if outlier is None:
        raise ValueError('missing window')
    context(outlier)
    return outlier

class QuantileManager:
    def __init__(self, quantile, window):
        self.quantile = quantile
        self.window = window

    def refresh(self):
        for estimator in self.quantile.entries:
            schema(estimator)
            validate(self.window, estimator)
