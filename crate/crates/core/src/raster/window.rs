use std::collections::VecDeque;

use super::GrayImage;

/// Half-open index range `[lo, hi)` of a `window`-wide neighborhood centered at
/// `center`, clamped to `[0, len)`.
#[inline]
pub fn clamped_window(center: usize, window: usize, len: usize) -> (usize, usize) {
    let radius = window / 2;
    (center.saturating_sub(radius), (center + radius + 1).min(len))
}

/// Per-pixel minimum and maximum over the border-clamped `window x window`
/// neighborhood, as `(min, max)` planes in row-major order.
///
/// Separable: a row pass followed by a column pass, each a monotone-deque
/// sliding extremum, so the cost is independent of the window size.
pub fn window_min_max(img: &GrayImage, window: usize) -> (Vec<u8>, Vec<u8>) {
    let (w, h) = img.dimensions();
    let radius = window / 2;
    let mut row_min = vec![0u8; w * h];
    let mut row_max = vec![0u8; w * h];
    let mut line_min = vec![0u8; w.max(h)];
    let mut line_max = vec![0u8; w.max(h)];

    for y in 0..h {
        let row = &img.as_raw()[y * w..(y + 1) * w];
        sliding_extrema(row, radius, &mut line_min[..w], &mut line_max[..w]);
        row_min[y * w..(y + 1) * w].copy_from_slice(&line_min[..w]);
        row_max[y * w..(y + 1) * w].copy_from_slice(&line_max[..w]);
    }

    let mut out_min = vec![0u8; w * h];
    let mut out_max = vec![0u8; w * h];
    let mut column = vec![0u8; h];
    let mut scratch = vec![0u8; h];
    for x in 0..w {
        for y in 0..h {
            column[y] = row_min[y * w + x];
        }
        sliding_extrema(&column, radius, &mut line_min[..h], &mut scratch);
        for y in 0..h {
            column[y] = row_max[y * w + x];
        }
        sliding_extrema(&column, radius, &mut scratch, &mut line_max[..h]);
        for y in 0..h {
            out_min[y * w + x] = line_min[y];
            out_max[y * w + x] = line_max[y];
        }
    }
    (out_min, out_max)
}

fn sliding_extrema(line: &[u8], radius: usize, mins: &mut [u8], maxs: &mut [u8]) {
    let n = line.len();
    let mut lo: VecDeque<usize> = VecDeque::with_capacity(2 * radius + 2);
    let mut hi: VecDeque<usize> = VecDeque::with_capacity(2 * radius + 2);
    let mut next = 0;
    for i in 0..n {
        let end = (i + radius + 1).min(n);
        while next < end {
            let v = line[next];
            while lo.back().is_some_and(|&j| line[j] >= v) {
                lo.pop_back();
            }
            lo.push_back(next);
            while hi.back().is_some_and(|&j| line[j] <= v) {
                hi.pop_back();
            }
            hi.push_back(next);
            next += 1;
        }
        let start = i.saturating_sub(radius);
        while lo.front().is_some_and(|&j| j < start) {
            lo.pop_front();
        }
        while hi.front().is_some_and(|&j| j < start) {
            hi.pop_front();
        }
        mins[i] = line[lo[0]];
        maxs[i] = line[hi[0]];
    }
}
