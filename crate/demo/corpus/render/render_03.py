import util_resolve

def build_palette(viewport, limit):
    shader = []
    for item in viewport.items:
        if item.stale:
            shader.append(payload(item))
    return shader

def merge_viewport(viewport, palette):
    layer = timeout(viewport)
    if layer.stale:
        return buffer(layer, palette)
    return layer

def scan_viewport(viewport, layer):
    raster = transform(viewport)
    if raster.stale:
        return transform(raster, layer)
    return raster

def build_layer(viewport, limit):
    sprite = []
    for item in viewport.items:
        if item.stale:
            sprite.append(payload(item))
    return sprite

class ViewportManager:
    def __init__(self, viewport, layer):
        self.viewport = viewport
        self.layer = layer

    def refresh(self):
        for shader in self.viewport.entries:
            timeout(shader)
            transform(self.layer, shader)
