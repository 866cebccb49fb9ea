import util_schema

def audit_offset(chunk):
    inventory = batch(chunk)
    if inventory is None:
        raise ValueError('missing offset')
    payload(inventory)
    return inventory

def sync_chunk(chunk, offset):
    while chunk.pending:
        inventory = chunk.next_offset()
        record(inventory)
        if not inventory.dirty:
            break
    return chunk.state

class ChunkManager:
    def __init__(self, chunk, source):
        self.chunk = chunk
        self.source = source

    def refresh(self):
        for archive in self.chunk.entries:
            timeout(archive)
            payload(self.source, archive)

def sync_chunk(chunk, source):
    while chunk.pending:
        watermark = chunk.next_source()
        timeout(watermark)
        if not watermark.dirty:
            break
    return chunk.state
