//! SVG floor plans per layer and OBJ meshes.

use std::fmt::Write as _;

use strip3d::rational::to_f64;
use strip3d::{Instance, Packing, Rational};

const VIEW: f64 = 1000.0;

/// One SVG per horizontal slab `[i t, (i+1) t)`, showing every box that
/// meets the slab, labelled by id and z-range. The y axis points down.
pub fn svg_layers(instance: &Instance, packing: &Packing, thickness: &Rational) -> Vec<String> {
    let height = packing.height();
    let layers = (height / thickness).ceil().to_integer();
    let layers: usize = usize::try_from(layers).unwrap_or(0).max(1);
    (0..layers)
        .map(|i| {
            let lo = thickness * Rational::from_integer(i.into());
            let hi = &lo + thickness;
            let mut s = String::new();
            let _ = writeln!(
                s,
                r#"<svg xmlns="http://www.w3.org/2000/svg" width="{VIEW}" height="{VIEW}" viewBox="0 0 {VIEW} {VIEW}">"#
            );
            let _ = writeln!(
                s,
                r#"<title>layer {i}: z in [{:.4}, {:.4})</title>"#,
                to_f64(&lo),
                to_f64(&hi)
            );
            let _ = writeln!(
                s,
                r#"<rect x="0" y="0" width="{VIEW}" height="{VIEW}" fill="white" stroke="black"/>"#
            );
            for p in packing.placements() {
                let Some(b) = instance.get(p.box_id) else { continue };
                let top = &p.z + &b.height;
                if p.z >= hi || top <= lo {
                    continue;
                }
                let (x, y) = (to_f64(&p.x) * VIEW, to_f64(&p.y) * VIEW);
                let (w, h) = (to_f64(&b.length) * VIEW, to_f64(&b.width) * VIEW);
                let hue = (b.id * 47) % 360;
                let _ = writeln!(
                    s,
                    r#"<rect x="{x:.3}" y="{y:.3}" width="{w:.3}" height="{h:.3}" fill="hsl({hue},60%,70%)" fill-opacity="0.6" stroke="black" stroke-width="1"/>"#
                );
                let _ = writeln!(
                    s,
                    r#"<text x="{:.3}" y="{:.3}" font-size="12" font-family="monospace">{} z[{:.3},{:.3})</text>"#,
                    x + 3.0,
                    y + 14.0,
                    b.id,
                    to_f64(&p.z),
                    to_f64(&top)
                );
            }
            s.push_str("</svg>\n");
            s
        })
        .collect()
}

/// Wavefront OBJ with one object of 8 vertices and 6 quads per box.
pub fn obj(instance: &Instance, packing: &Packing) -> String {
    let mut s = String::from("# strip3d packing\n");
    let mut base = 1usize;
    for p in packing.placements() {
        let Some(b) = instance.get(p.box_id) else { continue };
        let x = [to_f64(&p.x), to_f64(&(&p.x + &b.length))];
        let y = [to_f64(&p.y), to_f64(&(&p.y + &b.width))];
        let z = [to_f64(&p.z), to_f64(&(&p.z + &b.height))];
        let _ = writeln!(s, "o box_{}", b.id);
        for k in 0..8 {
            let _ = writeln!(s, "v {} {} {}", x[k & 1], y[(k >> 1) & 1], z[k >> 2]);
        }
        // Vertex k has bits (x, y, z); faces listed counter-clockwise from outside.
        for f in [[0, 2, 3, 1], [4, 5, 7, 6], [0, 1, 5, 4], [2, 6, 7, 3], [0, 4, 6, 2], [1, 3, 7, 5]] {
            let _ = writeln!(
                s,
                "f {} {} {} {}",
                base + f[0],
                base + f[1],
                base + f[2],
                base + f[3]
            );
        }
        base += 8;
    }
    s
}
