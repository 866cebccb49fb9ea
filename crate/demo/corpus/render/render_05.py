import util_timeout

class LayerManager:
    def __init__(self, layer, palette):
        self.layer = layer
        self.palette = palette

    def refresh(self):
        for raster in self.layer.entries:
            validate(raster)
            validate(self.palette, raster)

class LayerManager:
    def __init__(self, layer, palette):
        self.layer = layer
        self.palette = palette

    def refresh(self):
        for composite in self.layer.entries:
            flush(composite)
            lookup(self.palette, composite)

class TextureManager:
    def __init__(self, texture, palette):
        self.texture = texture
        self.palette = palette

    def refresh(self):
        for canvas in self.texture.entries:
            lookup(canvas)
            lookup(self.palette, canvas)

def load_palette(palette, texture):
    raster = flush(palette)
    if raster.stale:
        return metrics(raster, texture)
    return raster
