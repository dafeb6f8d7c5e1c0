use std::f64::consts::PI;

use crate::surface::{Disc, Rect};

/// Area of `{|p| <= r, p.x <= x, p.y <= y}` for a disc centred at the origin.
fn corner_area(r: f64, x: f64, y: f64) -> f64 {
    if x <= -r || y <= -r {
        return 0.0;
    }
    let xc = x.min(r);
    let prim = |t: f64| {
        let t = t.clamp(-r, r);
        0.5 * (t * (r * r - t * t).max(0.0).sqrt() + r * r * (t / r).asin())
    };
    let chord = |a: f64, b: f64| if b > a { prim(b) - prim(a) } else { 0.0 };
    if y >= r {
        return 2.0 * chord(-r, xc);
    }
    let xy = (r * r - y * y).sqrt();
    let full = |a: f64, b: f64| if y > 0.0 { 2.0 * chord(a, b) } else { 0.0 };
    let mut area = full(-r, xc.min(-xy));
    if xc > -xy {
        let b = xc.min(xy);
        area += y * (b + xy) + chord(-xy, b);
    }
    if xc > xy {
        area += full(xy, xc);
    }
    area
}

/// Exact area of a rectangle intersected with a disc.
pub fn rect_disc_area(rect: &Rect, disc: &Disc) -> f64 {
    let [cx, cy] = disc.center;
    let r = disc.radius;
    let (x0, x1) = (rect.u0 - cx, rect.u1 - cx);
    let (y0, y1) = (rect.v0 - cy, rect.v1 - cy);
    let a = corner_area(r, x1, y1) - corner_area(r, x0, y1) - corner_area(r, x1, y0)
        + corner_area(r, x0, y0);
    a.clamp(0.0, rect.area().min(PI * r * r))
}

/// Area of the part of a rectangle where `a + b (u - uc) + c (v - vc) <= 0`,
/// with `(uc, vc)` the rectangle centre.
pub fn rect_halfplane_area(rect: &Rect, a: f64, b: f64, c: f64) -> f64 {
    let (uc, vc) = rect.center();
    let phi = |p: (f64, f64)| a + b * (p.0 - uc) + c * (p.1 - vc);
    let corners = [
        (rect.u0, rect.v0),
        (rect.u1, rect.v0),
        (rect.u1, rect.v1),
        (rect.u0, rect.v1),
    ];
    let mut poly = Vec::with_capacity(8);
    for i in 0..4 {
        let (p, q) = (corners[i], corners[(i + 1) % 4]);
        let (fp, fq) = (phi(p), phi(q));
        if fp <= 0.0 {
            poly.push(p);
        }
        if (fp <= 0.0) != (fq <= 0.0) {
            let s = fp / (fp - fq);
            poly.push((p.0 + s * (q.0 - p.0), p.1 + s * (q.1 - p.1)));
        }
    }
    let n = poly.len();
    let twice: f64 = (0..n)
        .map(|i| {
            let (p, q) = (poly[i], poly[(i + 1) % n]);
            p.0 * q.1 - q.0 * p.1
        })
        .sum();
    (0.5 * twice.abs()).min(rect.area())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Coverage {
    Inside,
    Outside,
    Partial,
}

pub fn rect_vs_disc(rect: &Rect, disc: &Disc) -> Coverage {
    let [cx, cy] = disc.center;
    let dx = (cx.clamp(rect.u0, rect.u1) - cx).hypot(cy.clamp(rect.v0, rect.v1) - cy);
    if dx >= disc.radius {
        return Coverage::Outside;
    }
    let fx = (rect.u0 - cx).abs().max((rect.u1 - cx).abs());
    let fy = (rect.v0 - cy).abs().max((rect.v1 - cy).abs());
    if fx.hypot(fy) <= disc.radius {
        Coverage::Inside
    } else {
        Coverage::Partial
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn brute(rect: &Rect, disc: &Disc, n: usize) -> f64 {
        let (hx, hy) = (rect.width() / n as f64, rect.height() / n as f64);
        let mut hits = 0usize;
        for i in 0..n {
            for j in 0..n {
                let x = rect.u0 + (i as f64 + 0.5) * hx;
                let y = rect.v0 + (j as f64 + 0.5) * hy;
                if disc.contains(x, y) {
                    hits += 1;
                }
            }
        }
        hits as f64 * hx * hy
    }

    #[test]
    fn matches_grid_count() {
        let disc = Disc::new([0.3, -0.2], 1.1);
        let rects = [
            Rect::new(-2.0, 2.0, -2.0, 2.0),
            Rect::new(0.0, 1.0, 0.0, 1.0),
            Rect::new(-0.5, 0.2, -1.5, -0.9),
            Rect::new(1.0, 1.6, -0.9, 0.5),
            Rect::new(-0.1, 0.1, -0.1, 0.1),
            Rect::new(1.5, 2.0, 1.0, 2.0),
        ];
        for r in rects {
            let exact = rect_disc_area(&r, &disc);
            let approx = brute(&r, &disc, 2000);
            assert!(
                (exact - approx).abs() < 2e-3 * r.area().max(1e-3),
                "{r:?}: {exact} vs {approx}"
            );
        }
    }

    #[test]
    fn whole_disc() {
        let d = Disc::new([0.0, 0.0], 0.7);
        let a = rect_disc_area(&Rect::new(-1.0, 1.0, -1.0, 1.0), &d);
        assert!((a - PI * 0.49).abs() < 1e-14);
        let q = rect_disc_area(&Rect::new(0.0, 1.0, 0.0, 1.0), &d);
        assert!((q - PI * 0.49 / 4.0).abs() < 1e-14);
    }

    #[test]
    fn halfplane_clip() {
        let r = Rect::new(0.0, 2.0, 0.0, 1.0);
        assert!((rect_halfplane_area(&r, 0.0, 1.0, 0.0) - 1.0).abs() < 1e-15);
        assert!((rect_halfplane_area(&r, -10.0, 1.0, 1.0) - 2.0).abs() < 1e-15);
        assert_eq!(rect_halfplane_area(&r, 10.0, 1.0, 1.0), 0.0);
        // the diagonal u/2 + v <= 1 through (0, 1) and (2, 0)
        assert!((rect_halfplane_area(&r, 0.0, 0.5, 1.0) - 1.0).abs() < 1e-15);
        let approx = brute(&r, &Disc::new([0.0, 0.0], 0.0), 10);
        assert_eq!(approx, 0.0);
    }

    #[test]
    fn coverage_classes() {
        let d = Disc::new([0.0, 0.0], 1.0);
        assert_eq!(
            rect_vs_disc(&Rect::new(-0.5, 0.5, -0.5, 0.5), &d),
            Coverage::Inside
        );
        assert_eq!(
            rect_vs_disc(&Rect::new(1.0, 2.0, 0.0, 1.0), &d),
            Coverage::Outside
        );
        assert_eq!(
            rect_vs_disc(&Rect::new(0.5, 2.0, 0.0, 1.0), &d),
            Coverage::Partial
        );
    }

    fn grid_area(rect: &Rect, inside: impl Fn(f64, f64) -> bool) -> f64 {
        let n = 400;
        let (du, dv) = (rect.width() / n as f64, rect.height() / n as f64);
        let mut count = 0;
        for i in 0..n {
            for j in 0..n {
                count += inside(
                    rect.u0 + (i as f64 + 0.5) * du,
                    rect.v0 + (j as f64 + 0.5) * dv,
                ) as usize;
            }
        }
        count as f64 * du * dv
    }

    proptest::proptest! {
        #[test]
        fn disc_area_matches_grid(u0 in -1.0f64..1.0, w in 0.1f64..2.0, v0 in -1.0f64..1.0, h in 0.1f64..2.0,
                                  cx in -1.5f64..1.5, cy in -1.5f64..1.5, r in 0.05f64..2.0) {
            let rect = Rect::new(u0, u0 + w, v0, v0 + h);
            let disc = Disc::new([cx, cy], r);
            let a = rect_disc_area(&rect, &disc);
            proptest::prop_assert!(a >= 0.0 && a <= rect.area() + 1e-12);
            let g = grid_area(&rect, |u, v| disc.contains(u, v));
            proptest::prop_assert!((a - g).abs() < 0.02 * rect.area(), "{} vs {}", a, g);
            let expect = match rect_vs_disc(&rect, &disc) {
                Coverage::Inside => Some(rect.area()),
                Coverage::Outside => Some(0.0),
                Coverage::Partial => None,
            };
            if let Some(e) = expect {
                proptest::prop_assert!((a - e).abs() < 1e-12);
            }
        }

        #[test]
        fn halfplane_and_complement(a in -1.0f64..1.0, b in -3.0f64..3.0, c in -3.0f64..3.0) {
            let rect = Rect::new(0.0, 1.0, -0.5, 0.5);
            let inside = rect_halfplane_area(&rect, a, b, c);
            let outside = rect_halfplane_area(&rect, -a, -b, -c);
            proptest::prop_assert!((inside + outside - rect.area()).abs() < 1e-12);
            let (uc, vc) = rect.center();
            let g = grid_area(&rect, |u, v| a + b * (u - uc) + c * (v - vc) <= 0.0);
            proptest::prop_assert!((inside - g).abs() < 0.01);
        }
    }
}
