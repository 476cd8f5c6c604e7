use super::GrayImage;

/// 256-bin intensity histogram.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Histogram {
    bins: [u64; 256],
    total: u64,
}

impl Histogram {
    pub fn from_bins(bins: [u64; 256]) -> Self {
        let total = bins.iter().sum();
        Self { bins, total }
    }

    pub fn bins(&self) -> &[u64; 256] {
        &self.bins
    }

    pub fn total(&self) -> u64 {
        self.total
    }

    pub fn count(&self, value: u8) -> u64 {
        self.bins[value as usize]
    }

    /// Number of pixels with intensity `<= t`.
    pub fn count_at_most(&self, t: u8) -> u64 {
        self.bins[..=t as usize].iter().sum()
    }

    /// Number of pixels with `lo < intensity <= hi`; zero when `hi <= lo`.
    pub fn count_between(&self, lo: u8, hi: u8) -> u64 {
        if hi <= lo {
            return 0;
        }
        self.bins[lo as usize + 1..=hi as usize].iter().sum()
    }

    pub fn populated_bins(&self) -> usize {
        self.bins.iter().filter(|&&c| c > 0).count()
    }

    pub fn is_empty(&self) -> bool {
        self.total == 0
    }
}

pub fn histogram(img: &GrayImage) -> Histogram {
    let mut bins = [0u64; 256];
    for &v in img.as_raw() {
        bins[v as usize] += 1;
    }
    Histogram {
        bins,
        total: img.as_raw().len() as u64,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};

    #[test]
    fn constant_image() {
        let h = histogram(&GrayImage::filled(2, 2, 7).unwrap());
        assert_eq!(h.count(7), 4);
        assert_eq!(h.total(), 4);
        assert_eq!(h.bins().iter().filter(|&&c| c > 0).count(), 1);
    }

    #[test]
    fn extremes() {
        let h = histogram(&GrayImage::new(2, 1, vec![0, 255]).unwrap());
        assert_eq!(h.count(0), 1);
        assert_eq!(h.count(255), 1);
        assert_eq!(h.populated_bins(), 2);
    }

    #[test]
    fn random_image_counts() {
        let mut rng = rand::rngs::StdRng::seed_from_u64(3);
        let img = GrayImage::from_fn(64, 64, |_, _| rng.gen()).unwrap();
        let h = histogram(&img);
        assert_eq!(h.total(), 4096);
        assert_eq!(h.bins().iter().sum::<u64>(), 4096);
        for v in [0u8, 17, 128, 255] {
            let naive = img.as_raw().iter().filter(|&&p| p == v).count() as u64;
            assert_eq!(h.count(v), naive);
        }
    }

    #[test]
    fn range_counts() {
        let mut bins = [0u64; 256];
        bins[10] = 3;
        bins[20] = 5;
        bins[30] = 7;
        let h = Histogram::from_bins(bins);
        assert_eq!(h.count_at_most(20), 8);
        assert_eq!(h.count_between(10, 30), 12);
        assert_eq!(h.count_between(30, 10), 0);
    }
}
