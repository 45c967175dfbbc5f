use balltrack_core::components::label_components;
use balltrack_core::image::{ClassMap, Mask};
use balltrack_core::morph::{dilate, erode, morph, MorphOp};
use proptest::prelude::*;

fn class_map() -> impl Strategy<Value = ClassMap> {
    (1usize..24, 1usize..24).prop_flat_map(|(w, h)| {
        prop::collection::vec(prop::sample::select(vec![0u16, 0, 1, 1, 2]), w * h)
            .prop_map(move |c| ClassMap::new(w, h, c).unwrap())
    })
}

fn mask() -> impl Strategy<Value = Mask> {
    (1usize..24, 1usize..24).prop_flat_map(|(w, h)| {
        prop::collection::vec(prop::bool::weighted(0.6), w * h)
            .prop_map(move |b| Mask::new(w, h, b).unwrap())
    })
}

fn neighbours(x: usize, y: usize, w: usize, h: usize) -> impl Iterator<Item = (usize, usize)> {
    (-1i64..=1)
        .flat_map(|dy| (-1i64..=1).map(move |dx| (dx, dy)))
        .filter(|&d| d != (0, 0))
        .map(move |(dx, dy)| (x as i64 + dx, y as i64 + dy))
        .filter(move |&(nx, ny)| nx >= 0 && ny >= 0 && (nx as usize) < w && (ny as usize) < h)
        .map(|(nx, ny)| (nx as usize, ny as usize))
}

proptest! {
    #[test]
    fn labels_partition_foreground(map in class_map(), min_size in 1usize..6) {
        let (w, h) = (map.width(), map.height());
        let (labels, regions) = label_components(&map, min_size);
        for y in 0..h {
            for x in 0..w {
                let (l, c) = (labels.get(x, y), map.get(x, y));
                prop_assert_eq!(l == 0, c == 0);
                for (nx, ny) in neighbours(x, y, w, h) {
                    // same class and 8-adjacent <=> same label
                    if c != 0 && map.get(nx, ny) == c {
                        prop_assert_eq!(labels.get(nx, ny), l);
                    }
                    if l != 0 && labels.get(nx, ny) == l {
                        prop_assert_eq!(map.get(nx, ny), c);
                    }
                }
            }
        }
        for r in &regions {
            let count = labels.labels.iter().filter(|&&l| l == r.label).count();
            prop_assert_eq!(count, r.pixel_count);
            prop_assert!(r.pixel_count >= min_size);
        }
        let firsts: Vec<usize> = regions
            .iter()
            .map(|r| labels.labels.iter().position(|&l| l == r.label).unwrap())
            .collect();
        prop_assert!(firsts.windows(2).all(|p| p[0] < p[1]));
    }

    #[test]
    fn boundary_is_a_closed_chain(map in class_map()) {
        let (w, h) = (map.width(), map.height());
        let (labels, regions) = label_components(&map, 1);
        for r in &regions {
            let b = &r.boundary;
            prop_assert!(!b.is_empty());
            for &(x, y) in b {
                let (xu, yu) = (x as usize, y as usize);
                prop_assert_eq!(labels.get(xu, yu), r.label);
                let on_edge = x == 0 || y == 0 || xu == w - 1 || yu == h - 1;
                prop_assert!(on_edge || neighbours(xu, yu, w, h).any(|(nx, ny)| labels.get(nx, ny) != r.label));
            }
            if r.pixel_count > 1 {
                for k in 0..b.len() {
                    let (p, q) = (b[k], b[(k + 1) % b.len()]);
                    let step = (p.0 - q.0).abs().max((p.1 - q.1).abs());
                    prop_assert_eq!(step, 1, "gap between {:?} and {:?}", p, q);
                }
            }
            let min_x = b.iter().map(|p| p.0).min().unwrap();
            let max_x = b.iter().map(|p| p.0).max().unwrap();
            let min_y = b.iter().map(|p| p.1).min().unwrap();
            let max_y = b.iter().map(|p| p.1).max().unwrap();
            prop_assert_eq!((min_x, min_y, max_x, max_y), (r.bbox.min_x, r.bbox.min_y, r.bbox.max_x, r.bbox.max_y));
        }
    }

    #[test]
    fn erosion_and_dilation_are_dual(m in mask(), radius in 1usize..3) {
        prop_assert_eq!(dilate(&m, radius), erode(&m.complement(), radius).complement());
    }

    #[test]
    fn opening_and_closing_are_idempotent_and_ordered(m in mask(), radius in 1usize..3) {
        let open = morph(&m, MorphOp::Open, radius);
        let close = morph(&m, MorphOp::Close, radius);
        prop_assert_eq!(&morph(&open, MorphOp::Open, radius), &open);
        prop_assert_eq!(&morph(&close, MorphOp::Close, radius), &close);
        for i in 0..m.bits().len() {
            prop_assert!(!open.bits()[i] || m.bits()[i]);
            prop_assert!(!m.bits()[i] || close.bits()[i]);
        }
    }
}
