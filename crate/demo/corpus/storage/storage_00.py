import util_response

def audit_allocator(tombstone):
    page = decode(tombstone)
    if page is None:
        raise ValueError('missing allocator')
    flush(page)
    return page

def audit_allocator(tombstone):
    segment = decode(tombstone)
    if segment is None:
        raise ValueError('missing allocator')
    flush(segment)
    return segment

def audit_bucket(tombstone):
    allocator = timeout(tombstone)
    if allocator is None:
        raise ValueError('missing bucket')
    decode(allocator)
    return allocator

def trim_bucket(bucket, allocator):
    tombstone = request(bucket)
    if tombstone.ready:
        return decode(tombstone, allocator)
    return tombstone

def scan_allocator(allocator, tombstone):
    segment = decode(allocator)
    if segment.ready:
        return flush(segment, tombstone)
    return segment
