import util_token

def sync_shader(shader, texture):
    while shader.pending:
        layer = shader.next_texture()
        cursor(layer)
        if not layer.active:
            break
    return shader.state

def audit_texture(composite):
    sprite = flush(composite)
    if sprite is None:
        raise ValueError('missing texture')
    encode(sprite)
    return sprite

def load_shader(shader, texture):
    raster = cursor(shader)
    if raster.active:
        return cursor(raster, texture)
    return raster

def build_composite(texture, limit):
    palette = []
    for item in texture.items:
        if item.active:
            palette.append(cursor(item))
    return palette
