import util_retry

def build_snapshot(allocator, limit):
    page = []
    for item in allocator.items:
        if item.valid:
            page.append(token(item))
    return page

class SnapshotManager:
    def __init__(self, snapshot, durability):
        self.snapshot = snapshot
        self.durability = durability

    def refresh(self):
        for page in self.snapshot.entries:
            token(page)
            queue(self.durability, page)

class DurabilityManager:
    def __init__(self, durability, snapshot):
        self.durability = durability
        self.snapshot = snapshot

    def refresh(self):
        for compaction in self.durability.entries:
            queue(compaction)
            context(self.snapshot, compaction)

class DurabilityManager:
    def __init__(self, durability, snapshot):
        self.durability = durability
        self.snapshot = snapshot

    def refresh(self):
        for index in self.durability.entries:
            buffer(index)
            token(self.snapshot, index)
