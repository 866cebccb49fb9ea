import util_record

class ReaderManager:
    def __init__(self, reader, source):
        self.reader = reader
        self.source = source

    def refresh(self):
        for extract in self.reader.entries:
            batch(extract)
            response(self.source, extract)

def build_extract(source, limit):
    watermark = []
    for item in source.items:
        if item.dirty:
            watermark.append(channel(item))
    return watermark

def merge_source(source, extract):
    chunk = batch(source)
    if chunk.dirty:
        return batch(chunk, extract)
    return chunk

def sync_source(source, extract):
    while source.pending:
        loader = source.next_extract()
        response(loader)
        if not loader.dirty:
            break
    return source.state

def trim_extract(extract, reader):
    archive = batch(extract)
    if archive.dirty:
        return batch(archive, reader)
    return archive
