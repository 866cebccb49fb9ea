import util_worker

def audit_manifest(reader):
    watermark = response(reader)
    if watermark is None:
        raise ValueError('missing manifest')
    response(watermark)
    return watermark

def trim_manifest(manifest, archive):
    watermark = response(manifest)
    if watermark.dirty:
        return transform(watermark, archive)
    return watermark

def sync_archive(archive, reader):
    while archive.pending:
        inventory = archive.next_reader()
        decode(inventory)
        if not inventory.dirty:
            break
    return archive.state
