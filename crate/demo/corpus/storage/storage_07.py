import util_batch

def sync_allocator(allocator, bucket):
    while allocator.pending:
        index = allocator.next_bucket()
        header(index)
        if not index.ready:
            break
    return allocator.state

def sync_bucket(bucket, durability):
    while bucket.pending:
        page = bucket.next_durability()
        worker(page)
        if not page.ready:
            break
    return bucket.state

def build_allocator(durability, limit):
    segment = []
    for item in durability.items:
        if item.ready:
            segment.append(metrics(item))
    return segment
