use super::BinaryImage;

/// 8-connected foreground components.
///
/// Label 0 is background; components are numbered `1..=count` in raster-scan
/// order of their first pixel. `sizes[0]` is always 0.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ComponentSet {
    width: usize,
    height: usize,
    labels: Vec<u32>,
    sizes: Vec<usize>,
}

impl ComponentSet {
    pub fn count(&self) -> usize {
        self.sizes.len() - 1
    }

    pub fn label(&self, x: usize, y: usize) -> u32 {
        self.labels[y * self.width + x]
    }

    pub fn labels(&self) -> &[u32] {
        &self.labels
    }

    /// Pixel counts indexed by label.
    pub fn sizes(&self) -> &[usize] {
        &self.sizes
    }

    /// Pixel counts of the components `1..=count`.
    pub fn component_sizes(&self) -> &[usize] {
        &self.sizes[1..]
    }

    pub fn dimensions(&self) -> (usize, usize) {
        (self.width, self.height)
    }
}

struct UnionFind {
    parent: Vec<u32>,
}

impl UnionFind {
    fn new() -> Self {
        Self { parent: vec![0] }
    }

    fn make(&mut self) -> u32 {
        let id = self.parent.len() as u32;
        self.parent.push(id);
        id
    }

    fn find(&mut self, mut x: u32) -> u32 {
        while self.parent[x as usize] != x {
            let grand = self.parent[self.parent[x as usize] as usize];
            self.parent[x as usize] = grand;
            x = grand;
        }
        x
    }

    fn union(&mut self, a: u32, b: u32) -> u32 {
        let ra = self.find(a);
        let rb = self.find(b);
        let (lo, hi) = if ra < rb { (ra, rb) } else { (rb, ra) };
        self.parent[hi as usize] = lo;
        lo
    }
}

/// Two-pass union-find labeling with 8-connectivity.
pub fn connected_components(img: &BinaryImage) -> ComponentSet {
    let (w, h) = img.dimensions();
    let mut provisional = vec![0u32; w * h];
    let mut uf = UnionFind::new();

    for y in 0..h {
        for x in 0..w {
            if !img.is_fg(x, y) {
                continue;
            }
            // Already-visited neighbors: W, NW, N, NE.
            let mut label = 0u32;
            let mut visit = |nx: isize, ny: isize| {
                if nx < 0 || ny < 0 || nx as usize >= w {
                    return;
                }
                let l = provisional[ny as usize * w + nx as usize];
                if l != 0 {
                    label = if label == 0 { uf.find(l) } else { uf.union(label, l) };
                }
            };
            let (xi, yi) = (x as isize, y as isize);
            visit(xi - 1, yi);
            visit(xi - 1, yi - 1);
            visit(xi, yi - 1);
            visit(xi + 1, yi - 1);
            provisional[y * w + x] = if label == 0 { uf.make() } else { label };
        }
    }

    let mut remap = vec![0u32; uf.parent.len()];
    let mut sizes = vec![0usize];
    for l in provisional.iter_mut() {
        if *l == 0 {
            continue;
        }
        let root = uf.find(*l) as usize;
        if remap[root] == 0 {
            sizes.push(0);
            remap[root] = (sizes.len() - 1) as u32;
        }
        *l = remap[root];
        sizes[*l as usize] += 1;
    }

    ComponentSet {
        width: w,
        height: h,
        labels: provisional,
        sizes,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};

    fn flood_fill_sizes(img: &BinaryImage) -> Vec<usize> {
        let (w, h) = img.dimensions();
        let mut seen = vec![false; w * h];
        let mut sizes = Vec::new();
        for y in 0..h {
            for x in 0..w {
                if !img.is_fg(x, y) || seen[y * w + x] {
                    continue;
                }
                let mut stack = vec![(x, y)];
                seen[y * w + x] = true;
                let mut size = 0;
                while let Some((cx, cy)) = stack.pop() {
                    size += 1;
                    for dy in -1isize..=1 {
                        for dx in -1isize..=1 {
                            let (nx, ny) = (cx as isize + dx, cy as isize + dy);
                            if img.is_fg_at(nx, ny) && !seen[ny as usize * w + nx as usize] {
                                seen[ny as usize * w + nx as usize] = true;
                                stack.push((nx as usize, ny as usize));
                            }
                        }
                    }
                }
                sizes.push(size);
            }
        }
        sizes
    }

    #[test]
    fn all_background() {
        let cc = connected_components(&BinaryImage::background(5, 4).unwrap());
        assert_eq!(cc.count(), 0);
        assert!(cc.labels().iter().all(|&l| l == 0));
    }

    #[test]
    fn diagonal_touch_is_one_component() {
        let img = BinaryImage::from_fn(2, 2, |x, y| x == y).unwrap();
        let cc = connected_components(&img);
        assert_eq!(cc.count(), 1);
        assert_eq!(cc.component_sizes(), &[2]);
    }

    #[test]
    fn anti_diagonal_merge() {
        // A "V" whose arms only meet through a NE neighbor.
        let img = BinaryImage::from_fn(3, 2, |x, y| (x, y) == (0, 0) || (x, y) == (2, 0) || (x, y) == (1, 1))
            .unwrap();
        let cc = connected_components(&img);
        assert_eq!(cc.count(), 1);
    }

    #[test]
    fn raster_order_labels() {
        let img = BinaryImage::from_fn(5, 3, |x, y| (x == 4 && y == 0) || (x == 0 && y == 2)).unwrap();
        let cc = connected_components(&img);
        assert_eq!(cc.count(), 2);
        assert_eq!(cc.label(4, 0), 1);
        assert_eq!(cc.label(0, 2), 2);
    }

    #[test]
    fn sprinkled_pixels_match_flood_fill() {
        let mut rng = rand::rngs::StdRng::seed_from_u64(21);
        for _ in 0..20 {
            let mut img = BinaryImage::background(30, 30).unwrap();
            for _ in 0..100 {
                img.set(rng.gen_range(0..30), rng.gen_range(0..30), true);
            }
            let cc = connected_components(&img);
            assert_eq!(cc.component_sizes().iter().sum::<usize>(), img.fg_count());
            assert!(cc.component_sizes().iter().all(|&s| s >= 1));
            let mut expected = flood_fill_sizes(&img);
            let mut got = cc.component_sizes().to_vec();
            expected.sort_unstable();
            got.sort_unstable();
            assert_eq!(got, expected);
            assert_eq!(connected_components(&img.clone()), cc);
        }
    }

    #[test]
    fn neighbors_share_labels() {
        let mut rng = rand::rngs::StdRng::seed_from_u64(22);
        let img = BinaryImage::from_fn(40, 40, |_, _| rng.gen_bool(0.45)).unwrap();
        let cc = connected_components(&img);
        for y in 0..40 {
            for x in 0..40 {
                if !img.is_fg(x, y) {
                    assert_eq!(cc.label(x, y), 0);
                    continue;
                }
                for (dx, dy) in [(1isize, 0isize), (0, 1), (1, 1), (-1, 1)] {
                    let (nx, ny) = (x as isize + dx, y as isize + dy);
                    if img.is_fg_at(nx, ny) {
                        assert_eq!(cc.label(x, y), cc.label(nx as usize, ny as usize));
                    }
                }
            }
        }
    }
}
