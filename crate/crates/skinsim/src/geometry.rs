//! Minimal 2D polygon helpers for spreading contact forces over taxel pads:
//! rotated rectangles clipped against axis-aligned pads, with shoelace areas.

/// A convex polygon as counter-clockwise vertices, mm.
pub type Polygon = Vec<(f64, f64)>;

/// Corners of a rectangle centered at (cx, cy), rotated by `rot` radians.
pub fn rect_polygon(cx: f64, cy: f64, width: f64, height: f64, rot: f64) -> Polygon {
    let (s, c) = rot.sin_cos();
    let hw = width / 2.0;
    let hh = height / 2.0;
    [(-hw, -hh), (hw, -hh), (hw, hh), (-hw, hh)]
        .iter()
        .map(|(x, y)| (cx + x * c - y * s, cy + x * s + y * c))
        .collect()
}

/// Shoelace area; input must be simple and counter-clockwise.
pub fn polygon_area(poly: &Polygon) -> f64 {
    if poly.len() < 3 {
        return 0.0;
    }
    let mut acc = 0.0;
    for i in 0..poly.len() {
        let (x1, y1) = poly[i];
        let (x2, y2) = poly[(i + 1) % poly.len()];
        acc += x1 * y2 - x2 * y1;
    }
    acc.abs() / 2.0
}

/// Sutherland-Hodgman clip of a convex polygon against the axis-aligned
/// rectangle [x0, x1] x [y0, y1].
pub fn clip_to_rect(poly: &Polygon, x0: f64, y0: f64, x1: f64, y1: f64) -> Polygon {
    // Each half-plane keeps points with signed_distance >= 0.
    let planes: [Box<dyn Fn(f64, f64) -> f64>; 4] = [
        Box::new(move |x, _| x - x0),
        Box::new(move |x, _| x1 - x),
        Box::new(move |_, y| y - y0),
        Box::new(move |_, y| y1 - y),
    ];
    let mut current = poly.clone();
    for plane in &planes {
        if current.is_empty() {
            break;
        }
        let mut next = Vec::with_capacity(current.len() + 2);
        for i in 0..current.len() {
            let a = current[i];
            let b = current[(i + 1) % current.len()];
            let da = plane(a.0, a.1);
            let db = plane(b.0, b.1);
            if da >= 0.0 {
                next.push(a);
            }
            if (da >= 0.0) != (db >= 0.0) {
                let t = da / (da - db);
                next.push((a.0 + t * (b.0 - a.0), a.1 + t * (b.1 - a.1)));
            }
        }
        current = next;
    }
    current
}

/// Overlap area between a rotated rectangle and an axis-aligned pad.
pub fn rect_overlap_area(poly: &Polygon, cx: f64, cy: f64, width: f64, height: f64) -> f64 {
    polygon_area(&clip_to_rect(
        poly,
        cx - width / 2.0,
        cy - height / 2.0,
        cx + width / 2.0,
        cy + height / 2.0,
    ))
}
