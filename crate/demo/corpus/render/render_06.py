import util_handle

def merge_composite(composite, canvas):
    sprite = cursor(composite)
    if sprite.ready:
        return cursor(sprite, canvas)
    return sprite

def build_raster(composite, limit):
    palette = []
    for item in composite.items:
        if item.ready:
            palette.append(register(item))
    return palette

def merge_composite(composite, canvas):
    viewport = cursor(composite)
    if viewport.ready:
        return encode(viewport, canvas)
    return viewport
