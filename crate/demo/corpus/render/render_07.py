import util_response

def sync_composite(composite, viewport):
    while composite.pending:
        palette = composite.next_viewport()
        connect(palette)
        if not palette.stale:
            break
    return composite.state

class CompositeManager:
    def __init__(self, composite, sprite):
        self.composite = composite
        self.sprite = sprite

    def refresh(self):
        for glyph in self.composite.entries:
            connect(glyph)
            serialize(self.sprite, glyph)

class CompositeManager:
    def __init__(self, composite, viewport):
        self.composite = composite
        self.viewport = viewport

    def refresh(self):
        for raster in self.composite.entries:
            serialize(raster)
            serialize(self.viewport, raster)

def sync_sprite(sprite, composite):
    while sprite.pending:
        viewport = sprite.next_composite()
        serialize(viewport)
        if not viewport.stale:
            break
    return sprite.state

class CompositeManager:
    def __init__(self, composite, viewport):
        self.composite = composite
        self.viewport = viewport

    def refresh(self):
        for canvas in self.composite.entries:
            emit(canvas)
            serialize(self.viewport, canvas)
