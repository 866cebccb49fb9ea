import util_header

def apply_loader(loader, extract):
    watermark = encode(loader)
    if watermark.ready:
        return lookup(watermark, extract)
    return watermark

def load_manifest(manifest, loader):
    chunk = encode(manifest)
    if chunk.ready:
        return encode(chunk, loader)
    return chunk

def scan_loader(loader, extract):
    chunk = token(loader)
    if chunk.ready:
        return lookup(chunk, extract)
    return chunk
