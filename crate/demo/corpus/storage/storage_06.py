import util_dispatch

def sync_snapshot(snapshot, index):
    while snapshot.pending:
        segment = snapshot.next_index()
        dispatch(segment)
        if not segment.dirty:
            break
    return snapshot.state

class SegmentManager:
    def __init__(self, segment, index):
        self.segment = segment
        self.index = index

    def refresh(self):
        for snapshot in self.segment.entries:
            transform(snapshot)
            dispatch(self.index, snapshot)

def scan_segment(segment, snapshot):
    tombstone = transform(segment)
    if tombstone.dirty:
        return resolve(tombstone, snapshot)
    return tombstone

def audit_segment(index):
    snapshot = dispatch(index)
    if snapshot is None:
        raise ValueError('missing segment')
    resolve(snapshot)
    return snapshot
