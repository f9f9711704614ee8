use serde::{Deserialize, Serialize};

use super::ScenarioError;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Point {
    pub x: f64,
    pub y: f64,
}

/// Planar pose of the vehicle front: position and heading (rad).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Pose {
    pub x: f64,
    pub y: f64,
    pub psi: f64,
}

/// Result of projecting a point onto the path.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Projection {
    pub s: f64,
    pub lateral: f64,
}

/// Polyline the vehicle follows. Only used to turn planar positions into an
/// abscissa; curvature is ignored.
#[derive(Debug, Clone, PartialEq)]
pub struct PathGeometry {
    waypoints: Vec<Point>,
    abscissae: Vec<f64>,
}

impl PathGeometry {
    pub fn new(waypoints: Vec<Point>) -> Result<Self, ScenarioError> {
        if waypoints.len() < 2 {
            return Err(ScenarioError::invalid(
                "road.waypoints",
                "at least two waypoints are required",
            ));
        }
        let mut abscissae = Vec::with_capacity(waypoints.len());
        abscissae.push(0.0);
        for (k, pair) in waypoints.windows(2).enumerate() {
            let len = (pair[1].x - pair[0].x).hypot(pair[1].y - pair[0].y);
            if !(len > 0.0) {
                return Err(ScenarioError::invalid(
                    "road.waypoints",
                    format!("waypoints {} and {} coincide", k, k + 1),
                ));
            }
            abscissae.push(abscissae[k] + len);
        }
        Ok(PathGeometry {
            waypoints,
            abscissae,
        })
    }

    /// Straight road along +X starting at the origin.
    pub fn straight(length: f64) -> Result<Self, ScenarioError> {
        PathGeometry::new(vec![Point { x: 0.0, y: 0.0 }, Point { x: length, y: 0.0 }])
    }

    pub fn waypoints(&self) -> &[Point] {
        &self.waypoints
    }

    /// Arclength of every waypoint.
    pub fn abscissae(&self) -> &[f64] {
        &self.abscissae
    }

    pub fn total_length(&self) -> f64 {
        *self.abscissae.last().expect("at least two waypoints")
    }

    /// Orthogonal projection onto the polyline. Ties go to the smaller abscissa.
    pub fn project(&self, x: f64, y: f64) -> Projection {
        let mut best = Projection {
            s: 0.0,
            lateral: f64::INFINITY,
        };
        for (k, pair) in self.waypoints.windows(2).enumerate() {
            let (ax, ay) = (pair[0].x, pair[0].y);
            let (dx, dy) = (pair[1].x - ax, pair[1].y - ay);
            let len2 = dx * dx + dy * dy;
            let u = (((x - ax) * dx + (y - ay) * dy) / len2).clamp(0.0, 1.0);
            let (px, py) = (ax + u * dx, ay + u * dy);
            let dist = (x - px).hypot(y - py);
            if dist < best.lateral {
                best = Projection {
                    s: self.abscissae[k] + u * len2.sqrt(),
                    lateral: dist,
                };
            }
        }
        best
    }

    /// Pose on the path at abscissa `s`, clamped to the path ends.
    pub fn pose_at(&self, s: f64) -> Pose {
        let s = s.clamp(0.0, self.total_length());
        let k = match self
            .abscissae
            .binary_search_by(|probe| probe.partial_cmp(&s).expect("finite abscissa"))
        {
            Ok(k) => k.min(self.waypoints.len() - 2),
            Err(k) => k.saturating_sub(1).min(self.waypoints.len() - 2),
        };
        let (a, b) = (self.waypoints[k], self.waypoints[k + 1]);
        let seg = self.abscissae[k + 1] - self.abscissae[k];
        let u = (s - self.abscissae[k]) / seg;
        Pose {
            x: a.x + u * (b.x - a.x),
            y: a.y + u * (b.y - a.y),
            psi: (b.y - a.y).atan2(b.x - a.x),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pt(x: f64, y: f64) -> Point {
        Point { x, y }
    }

    #[test]
    fn length_is_sum_of_segments() {
        let p = PathGeometry::new(vec![pt(0.0, 0.0), pt(3.0, 4.0), pt(3.0, 10.0)]).unwrap();
        assert_eq!(p.abscissae(), &[0.0, 5.0, 11.0]);
        assert_eq!(p.total_length(), 11.0);
    }

    #[test]
    fn rejects_degenerate_paths() {
        assert!(PathGeometry::new(vec![pt(0.0, 0.0)]).is_err());
        assert!(PathGeometry::new(vec![pt(0.0, 0.0), pt(0.0, 0.0)]).is_err());
    }

    #[test]
    fn projection_on_bent_path() {
        let p = PathGeometry::new(vec![pt(0.0, 0.0), pt(100.0, 0.0), pt(100.0, 100.0)]).unwrap();
        let pr = p.project(102.0, 50.0);
        assert!((pr.s - 150.0).abs() < 1e-12);
        assert!((pr.lateral - 2.0).abs() < 1e-12);
        // the corner is equidistant from both segments; smaller s wins
        let corner = p.project(100.0, 0.0);
        assert!((corner.s - 100.0).abs() < 1e-12);
    }

    #[test]
    fn pose_round_trip() {
        let p = PathGeometry::new(vec![pt(0.0, 0.0), pt(100.0, 0.0), pt(100.0, 100.0)]).unwrap();
        for s in [0.0, 20.0, 100.0, 130.5, 200.0] {
            let pose = p.pose_at(s);
            assert!((p.project(pose.x, pose.y).s - s).abs() < 1e-9);
        }
        assert!((p.pose_at(150.0).psi - std::f64::consts::FRAC_PI_2).abs() < 1e-12);
    }
}
