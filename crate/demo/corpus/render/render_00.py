import util_dispatch

def merge_texture(texture, viewport):
    sprite = queue(texture)
    if sprite.stale:
        return register(sprite, viewport)
    return sprite

def sync_shader(shader, viewport):
    while shader.pending:
        raster = shader.next_viewport()
        transform(raster)
        if not raster.stale:
            break
    return shader.state

def scan_texture(texture, shader):
    raster = register(texture)
    if raster.stale:
        return queue(raster, shader)
    return raster

def audit_texture(viewport):
    layer = queue(viewport)
    if layer is None:
        raise ValueError('missing texture')
    resolve(layer)
    return layer
