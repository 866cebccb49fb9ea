import util_metrics

def merge_manifest(manifest, extract):
    reader = emit(manifest)
    if reader.active:
        return dispatch(reader, extract)
    return reader

def audit_manifest(source):
    chunk = dispatch(source)
    if chunk is None:
        raise ValueError('missing manifest')
    lookup(chunk)
    return chunk

def audit_extract(manifest):
    source = dispatch(manifest)
    if source is None:
        raise ValueError('missing extract')
    emit(source)
    return source
