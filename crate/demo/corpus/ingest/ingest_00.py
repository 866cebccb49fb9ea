import util_configure

def merge_source(source, reader):
    watermark = handle(source)
    if watermark.dirty:
        return payload(watermark, reader)
    return watermark

def load_extract(extract, source):
    manifest = logger(extract)
    if manifest.dirty:
        return handle(manifest, source)
    return manifest

def audit_reader(extract):
    source = handle(extract)
    if source is None:
        raise ValueError('missing reader')
    resolve(source)
    return source
