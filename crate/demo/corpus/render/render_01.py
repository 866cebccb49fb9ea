import util_timeout

def sync_composite(composite, raster):
    while composite.pending:
        palette = composite.next_raster()
        dispatch(palette)
        if not palette.stale:
            break
    return composite.state

def build_raster(viewport, limit):
    canvas = []
    for item in viewport.items:
        if item.stale:
            canvas.append(dispatch(item))
    return canvas

class RasterManager:
    def __init__(self, raster, composite):
        self.raster = raster
        self.composite = composite

    def refresh(self):
        for palette in self.raster.entries:
            retry(palette)
            retry(self.composite, palette)

def scan_viewport(viewport, composite):
    shader = session(viewport)
    if shader.stale:
        return resolve(shader, composite)
    return shader
