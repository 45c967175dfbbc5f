//! 8-connected component labeling and outer-contour tracing.

use alloc::vec;
use alloc::vec::Vec;

use crate::geom::Point;
use crate::image::ClassMap;

/// Minimum component size kept by default; smaller blobs are speckle.
pub const DEFAULT_MIN_SIZE: usize = 25;

/// Inclusive pixel bounding box.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct BBox {
    pub min_x: i32,
    pub min_y: i32,
    pub max_x: i32,
    pub max_y: i32,
}

impl BBox {
    fn at(x: i32, y: i32) -> Self {
        Self {
            min_x: x,
            min_y: y,
            max_x: x,
            max_y: y,
        }
    }

    fn include(&mut self, x: i32, y: i32) {
        self.min_x = self.min_x.min(x);
        self.min_y = self.min_y.min(y);
        self.max_x = self.max_x.max(x);
        self.max_y = self.max_y.max(y);
    }

    pub fn contains(&self, x: i32, y: i32) -> bool {
        (self.min_x..=self.max_x).contains(&x) && (self.min_y..=self.max_y).contains(&y)
    }

    pub fn width(&self) -> i32 {
        self.max_x - self.min_x + 1
    }

    pub fn height(&self) -> i32 {
        self.max_y - self.min_y + 1
    }
}

/// A connected same-class component.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Region {
    /// Matches the value written in the [`LabelMap`] for this component.
    pub label: u32,
    pub class_index: u16,
    pub pixel_count: usize,
    pub bbox: BBox,
    /// Outer contour, clockwise, as a closed 8-connected chain. Pixels on
    /// one-pixel-wide necks appear more than once.
    pub boundary: Vec<(i32, i32)>,
}

impl Region {
    pub fn boundary_points(&self) -> Vec<Point> {
        self.boundary.iter().map(|&p| Point::from(p)).collect()
    }
}

/// Per-pixel component labels; `0` marks background (class 0).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LabelMap {
    pub width: usize,
    pub height: usize,
    pub labels: Vec<u32>,
}

impl LabelMap {
    #[inline]
    pub fn get(&self, x: usize, y: usize) -> u32 {
        self.labels[y * self.width + x]
    }
}

/// Regions of at least `min_size` pixels, ordered by their first pixel in
/// raster order.
pub fn connected_components(map: &ClassMap, min_size: usize) -> Vec<Region> {
    label_components(map, min_size).1
}

/// Labels every non-background component and traces the boundary of those
/// with at least `min_size` pixels.
pub fn label_components(map: &ClassMap, min_size: usize) -> (LabelMap, Vec<Region>) {
    let (w, h) = (map.width(), map.height());
    let classes = map.classes();

    // First pass: provisional labels + union-find over W, NW, N, NE.
    let mut provisional = vec![0u32; w * h];
    let mut parent: Vec<u32> = vec![0];
    for y in 0..h {
        for x in 0..w {
            let i = y * w + x;
            let c = classes[i];
            if c == 0 {
                continue;
            }
            let mut label = 0u32;
            let merge = |n: usize, label: &mut u32, parent: &mut Vec<u32>| {
                if classes[n] != c {
                    return;
                }
                let other = provisional[n];
                if *label == 0 {
                    *label = other;
                } else {
                    union(parent, *label, other);
                }
            };
            if x > 0 {
                merge(i - 1, &mut label, &mut parent);
            }
            if y > 0 {
                if x > 0 {
                    merge(i - w - 1, &mut label, &mut parent);
                }
                merge(i - w, &mut label, &mut parent);
                if x + 1 < w {
                    merge(i - w + 1, &mut label, &mut parent);
                }
            }
            if label == 0 {
                label = parent.len() as u32;
                parent.push(label);
            }
            provisional[i] = label;
        }
    }

    // Second pass: final labels in raster order of first appearance.
    let mut final_of_root = vec![0u32; parent.len()];
    let mut stats: Vec<(u16, usize, BBox, (i32, i32))> = Vec::new();
    let mut labels = provisional;
    for y in 0..h {
        for x in 0..w {
            let i = y * w + x;
            if labels[i] == 0 {
                continue;
            }
            let root = find(&mut parent, labels[i]) as usize;
            let (xi, yi) = (x as i32, y as i32);
            if final_of_root[root] == 0 {
                stats.push((classes[i], 0, BBox::at(xi, yi), (xi, yi)));
                final_of_root[root] = stats.len() as u32;
            }
            let label = final_of_root[root];
            labels[i] = label;
            let s = &mut stats[label as usize - 1];
            s.1 += 1;
            s.2.include(xi, yi);
        }
    }

    let label_map = LabelMap {
        width: w,
        height: h,
        labels,
    };
    let regions = stats
        .into_iter()
        .enumerate()
        .filter(|(_, s)| s.1 >= min_size.max(1))
        .map(|(k, (class_index, pixel_count, bbox, start))| {
            let label = k as u32 + 1;
            Region {
                label,
                class_index,
                pixel_count,
                bbox,
                boundary: trace_outer(&label_map, label, start, pixel_count),
            }
        })
        .collect();
    (label_map, regions)
}

fn find(parent: &mut [u32], mut a: u32) -> u32 {
    while parent[a as usize] != a {
        let grand = parent[parent[a as usize] as usize];
        parent[a as usize] = grand;
        a = grand;
    }
    a
}

fn union(parent: &mut [u32], a: u32, b: u32) {
    let ra = find(parent, a);
    let rb = find(parent, b);
    if ra != rb {
        let (lo, hi) = if ra < rb { (ra, rb) } else { (rb, ra) };
        parent[hi as usize] = lo;
    }
}

/// Clockwise neighbor offsets (image y axis points down), starting west.
const DIRS: [(i32, i32); 8] = [
    (-1, 0),
    (-1, -1),
    (0, -1),
    (1, -1),
    (1, 0),
    (1, 1),
    (0, 1),
    (-1, 1),
];

fn dir_index(dx: i32, dy: i32) -> u8 {
    DIRS.iter()
        .position(|&d| d == (dx, dy))
        .expect("offset between ring neighbors is a unit step") as u8
}

#[derive(Clone, Copy, PartialEq, Eq)]
struct TraceState {
    x: i32,
    y: i32,
    /// Direction from the pixel to the background pixel we entered from.
    back: u8,
}

/// Moore-neighbor tracing of the outer contour.
///
/// `start` must be the first pixel of the component in raster order, so its
/// west neighbor is known to be outside. Tracing stops when the walk is
/// about to repeat its first move out of `start`.
fn trace_outer(
    labels: &LabelMap,
    label: u32,
    start: (i32, i32),
    pixel_count: usize,
) -> Vec<(i32, i32)> {
    let inside = |x: i32, y: i32| {
        x >= 0
            && y >= 0
            && (x as usize) < labels.width
            && (y as usize) < labels.height
            && labels.get(x as usize, y as usize) == label
    };
    let step = |s: TraceState| -> Option<TraceState> {
        for k in 1..=8u8 {
            let d = (s.back + k) % 8;
            let (dx, dy) = DIRS[d as usize];
            let (nx, ny) = (s.x + dx, s.y + dy);
            if inside(nx, ny) {
                let (px, py) = DIRS[((d + 7) % 8) as usize];
                let back = dir_index(s.x + px - nx, s.y + py - ny);
                return Some(TraceState { x: nx, y: ny, back });
            }
        }
        None
    };

    let mut boundary = vec![start];
    let initial = TraceState {
        x: start.0,
        y: start.1,
        back: 0,
    };
    let Some(first) = step(initial) else {
        return boundary;
    };
    let limit = 8 * pixel_count + 8;
    let mut state = first;
    while boundary.len() <= limit {
        if (state.x, state.y) == start {
            let next = step(state).expect("start pixel has a neighbor");
            if next == first {
                break;
            }
            boundary.push(start);
            state = next;
        } else {
            boundary.push((state.x, state.y));
            state = step(state).expect("traced pixel has a neighbor");
        }
    }
    boundary
}

#[cfg(test)]
mod tests {
    use super::*;

    fn map_from(rows: &[&str]) -> ClassMap {
        let h = rows.len();
        let w = rows[0].len();
        let classes = rows
            .iter()
            .flat_map(|r| {
                r.bytes()
                    .map(|b| if b == b'.' { 0 } else { u16::from(b - b'0') })
            })
            .collect();
        ClassMap::new(w, h, classes).unwrap()
    }

    #[test]
    fn filled_square_boundary() {
        let (w, h) = (16, 14);
        let classes = (0..w * h)
            .map(|i| {
                let (x, y) = (i % w, i / w);
                u16::from((3..13).contains(&x) && (2..12).contains(&y))
            })
            .collect();
        let map = ClassMap::new(w, h, classes).unwrap();
        let regions = connected_components(&map, 1);
        assert_eq!(regions.len(), 1);
        assert_eq!(regions[0].pixel_count, 100);
        assert_eq!(regions[0].boundary.len(), 36);
        assert_eq!(
            regions[0].bbox,
            BBox {
                min_x: 3,
                min_y: 2,
                max_x: 12,
                max_y: 11
            }
        );
    }

    #[test]
    fn background_only_is_empty() {
        let map = ClassMap::new(4, 3, vec![0; 12]).unwrap();
        assert!(connected_components(&map, 1).is_empty());
    }

    #[test]
    fn diagonal_blobs_merge() {
        let map = map_from(&["11..", "11..", "..11", "..11"]);
        let regions = connected_components(&map, 1);
        assert_eq!(regions.len(), 1);
        assert_eq!(regions[0].pixel_count, 8);
    }

    #[test]
    fn classes_do_not_merge_and_min_size_filters() {
        let map = map_from(&["1122", "1122", "....", "3..."]);
        let regions = connected_components(&map, 1);
        assert_eq!(regions.len(), 3);
        assert_eq!(
            regions.iter().map(|r| r.class_index).collect::<Vec<_>>(),
            [1, 2, 3]
        );
        assert_eq!(connected_components(&map, 2).len(), 2);
    }

    #[test]
    fn thin_shapes_trace() {
        let map = map_from(&["....", ".11.", "...."]);
        let r = &connected_components(&map, 1)[0];
        assert_eq!(r.boundary, vec![(1, 1), (2, 1)]);

        let map = map_from(&["1"]);
        assert_eq!(connected_components(&map, 1)[0].boundary, vec![(0, 0)]);

        let map = map_from(&["1...", ".1..", "..1."]);
        let r = &connected_components(&map, 1)[0];
        assert_eq!(r.boundary, vec![(0, 0), (1, 1), (2, 2), (1, 1)]);
    }

    #[test]
    fn ring_traces_outer_contour_only() {
        let map = map_from(&["11111", "1...1", "1...1", "11111"]);
        let r = &connected_components(&map, 1)[0];
        assert_eq!(r.pixel_count, 14);
        assert_eq!(r.boundary.len(), 14);
        assert_eq!(r.boundary[0], (0, 0));
        assert_eq!(r.boundary[1], (1, 0));
    }
}
