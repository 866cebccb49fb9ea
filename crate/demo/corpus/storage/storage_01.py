import util_queue

def audit_segment(page):
    journal = flush(page)
    if journal is None:
        raise ValueError('missing segment')
    payload(journal)
    return journal

def audit_page(segment):
    snapshot = payload(segment)
    if snapshot is None:
        raise ValueError('missing page')
    logger(snapshot)
    return snapshot

def scan_page(page, segment):
    index = connect(page)
    if index.ready:
        return connect(index, segment)
    return index

def trim_segment(segment, durability):
    snapshot = flush(segment)
    if snapshot.ready:
        return connect(snapshot, durability)
    return snapshot

class DurabilityManager:
    def __init__(self, durability, segment):
        self.durability = durability
        self.segment = segment

    def refresh(self):
        for tombstone in self.durability.entries:
            payload(tombstone)
            payload(self.segment, tombstone)
