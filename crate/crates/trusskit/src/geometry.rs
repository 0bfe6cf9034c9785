//! Plane points and a few elementary constructions.

use serde::{Deserialize, Serialize};

use crate::scalar::Real;

#[derive(Clone, Copy, Debug, PartialEq, Default, Serialize, Deserialize)]
pub struct Point<T> {
    pub x: T,
    pub y: T,
}

impl<T: Real> Point<T> {
    pub fn new(x: T, y: T) -> Self {
        Point { x, y }
    }

    pub fn origin() -> Self {
        Point::new(T::zero(), T::zero())
    }

    pub fn sub(self, o: Self) -> Self {
        Point::new(self.x - o.x, self.y - o.y)
    }

    pub fn add(self, o: Self) -> Self {
        Point::new(self.x + o.x, self.y + o.y)
    }

    pub fn scale(self, s: T) -> Self {
        Point::new(self.x * s, self.y * s)
    }

    pub fn dot(self, o: Self) -> T {
        self.x * o.x + self.y * o.y
    }

    pub fn cross(self, o: Self) -> T {
        self.x * o.y - self.y * o.x
    }

    pub fn norm(self) -> T {
        self.dot(self).sqrt()
    }

    pub fn dist(self, o: Self) -> T {
        self.sub(o).norm()
    }

    /// Counter-clockwise rotation about the origin.
    pub fn rotate(self, theta: T) -> Self {
        let (s, c) = (theta.sin(), theta.cos());
        Point::new(c * self.x - s * self.y, s * self.x + c * self.y)
    }

    pub fn angle(self) -> T {
        self.y.atan2(self.x)
    }

    pub fn cast<U: Real>(self) -> Point<U> {
        Point::new(U::lit(self.x.as_f64()), U::lit(self.y.as_f64()))
    }
}

/// Twice the signed area of the triangle (a, b, c); positive when counter-clockwise.
pub fn signed_area2<T: Real>(a: Point<T>, b: Point<T>, c: Point<T>) -> T {
    b.sub(a).cross(c.sub(a))
}

/// Angle at `b` in the corner a-b-c, in [0, pi].
pub fn corner_angle<T: Real>(a: Point<T>, b: Point<T>, c: Point<T>) -> T {
    let u = a.sub(b);
    let v = c.sub(b);
    u.cross(v).abs().atan2(u.dot(v))
}

/// Distance from `p` to the line through `a` and `b`.
pub fn line_distance<T: Real>(p: Point<T>, a: Point<T>, b: Point<T>) -> T {
    let d = b.sub(a);
    d.cross(p.sub(a)).abs() / d.norm()
}

/// Whether segments `ab` and `cd` share a point other than a common endpoint.
pub fn segments_cross<T: Real>(a: Point<T>, b: Point<T>, c: Point<T>, d: Point<T>, tol: T) -> bool {
    let o1 = signed_area2(a, b, c);
    let o2 = signed_area2(a, b, d);
    let o3 = signed_area2(c, d, a);
    let o4 = signed_area2(c, d, b);
    let strict = |x: T, y: T| (x > tol && y < -tol) || (x < -tol && y > tol);
    if strict(o1, o2) && strict(o3, o4) {
        return true;
    }
    // touching or collinear overlap away from shared endpoints
    let on = |p: Point<T>, q: Point<T>, r: Point<T>, o: T| {
        o.abs() <= tol
            && r.sub(p).dot(r.sub(q)) < -tol * tol
            && r.dist(p) > tol
            && r.dist(q) > tol
    };
    on(a, b, c, o1) || on(a, b, d, o2) || on(c, d, a, o3) || on(c, d, b, o4)
}
