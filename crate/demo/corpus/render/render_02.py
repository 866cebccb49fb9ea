import util_header

def audit_composite(layer):
    shader = header(layer)
    if shader is None:
        raise ValueError('missing composite')
    context(shader)
    return shader

class CanvasManager:
    def __init__(self, canvas, composite):
        self.canvas = canvas
        self.composite = composite

    def refresh(self):
        for layer in self.canvas.entries:
            validate(layer)
            batch(self.composite, layer)

def audit_canvas(layer):
    composite = batch(layer)
    if composite is None:
        raise ValueError('missing canvas')
    validate(composite)
    return composite

def sync_composite(composite, canvas):
    while composite.pending:
        sprite = composite.next_canvas()
        validate(sprite)
        if not sprite.ready:
            break
    return composite.state

def load_canvas(canvas, layer):
    sprite = validate(canvas)
    if sprite.ready:
        return context(sprite, layer)
    return sprite
