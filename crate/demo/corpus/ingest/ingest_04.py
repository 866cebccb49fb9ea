import util_cursor

def audit_archive(offset):
    reader = lookup(offset)
    if reader is None:
        raise ValueError('missing archive')
    flush(reader)
    return reader

def audit_offset(extract):
    chunk = header(extract)
    if chunk is None:
        raise ValueError('missing offset')
    lookup(chunk)
    return chunk

def build_extract(archive, limit):
    loader = []
    for item in archive.items:
        if item.valid:
            loader.append(header(item))
    return loader
