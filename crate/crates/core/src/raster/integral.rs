use super::window::clamped_window;
use super::GrayImage;

/// Zero-padded prefix sums of intensities and squared intensities.
///
/// Both planes are `(width + 1) x (height + 1)`; entry `(x, y)` holds the sum
/// over the rectangle `[0, x) x [0, y)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IntegralImages {
    width: usize,
    height: usize,
    sum: Vec<u64>,
    sq_sum: Vec<u64>,
}

impl IntegralImages {
    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    #[inline]
    pub fn sum_at(&self, x: usize, y: usize) -> u64 {
        self.sum[y * (self.width + 1) + x]
    }

    #[inline]
    pub fn sq_sum_at(&self, x: usize, y: usize) -> u64 {
        self.sq_sum[y * (self.width + 1) + x]
    }

    /// `(sum, sum of squares, pixel count)` over `[x0, x1) x [y0, y1)`.
    #[inline]
    pub fn rect_sums(&self, x0: usize, y0: usize, x1: usize, y1: usize) -> (u64, u64, u64) {
        let s = self.sum_at(x1, y1) + self.sum_at(x0, y0) - self.sum_at(x1, y0) - self.sum_at(x0, y1);
        let q = self.sq_sum_at(x1, y1) + self.sq_sum_at(x0, y0)
            - self.sq_sum_at(x1, y0)
            - self.sq_sum_at(x0, y1);
        (s, q, ((x1 - x0) * (y1 - y0)) as u64)
    }

    /// Sums over the border-clamped `window x window` neighborhood of `(cx, cy)`.
    #[inline]
    pub fn window_sums(&self, cx: usize, cy: usize, window: usize) -> (u64, u64, u64) {
        let (x0, x1) = clamped_window(cx, window, self.width);
        let (y0, y1) = clamped_window(cy, window, self.height);
        self.rect_sums(x0, y0, x1, y1)
    }
}

pub fn integral(img: &GrayImage) -> IntegralImages {
    let (w, h) = img.dimensions();
    let stride = w + 1;
    let mut sum = vec![0u64; stride * (h + 1)];
    let mut sq_sum = vec![0u64; stride * (h + 1)];
    for y in 0..h {
        let mut row_sum = 0u64;
        let mut row_sq = 0u64;
        for x in 0..w {
            let v = img.get(x, y) as u64;
            row_sum += v;
            row_sq += v * v;
            let above = y * stride + x + 1;
            let here = above + stride;
            sum[here] = sum[above] + row_sum;
            sq_sum[here] = sq_sum[above] + row_sq;
        }
    }
    IntegralImages {
        width: w,
        height: h,
        sum,
        sq_sum,
    }
}

/// Population mean and standard deviation from raw window sums:
/// `m = S / n`, `s = sqrt(E[p^2] - m^2)` with the variance numerator
/// `n * Q - S^2` evaluated exactly in integers.
#[inline]
pub fn mean_std_from_sums(sum: u64, sq_sum: u64, n: u64) -> (f64, f64) {
    let mean = sum as f64 / n as f64;
    let numerator = (n as u128 * sq_sum as u128).saturating_sub(sum as u128 * sum as u128);
    let var = numerator as f64 / (n as f64 * n as f64);
    (mean, var.max(0.0).sqrt())
}

/// Mean and population standard deviation of the border-clamped window
/// centered at `center`.
pub fn local_mean_std(ii: &IntegralImages, center: (usize, usize), window: usize) -> (f64, f64) {
    let (s, q, n) = ii.window_sums(center.0, center.1, window);
    mean_std_from_sums(s, q, n)
}
