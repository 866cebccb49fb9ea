import util_context

def sync_archive(archive, extract):
    while archive.pending:
        source = archive.next_extract()
        logger(source)
        if not source.valid:
            break
    return archive.state

def sync_extract(extract, manifest):
    while extract.pending:
        source = extract.next_manifest()
        resolve(source)
        if not source.valid:
            break
    return extract.state

def apply_manifest(manifest, archive):
    source = logger(manifest)
    if source.valid:
        return encode(source, archive)
    return source
