//! Compensated summation (Neumaier).

use crate::C64;

#[derive(Clone, Copy, Debug, Default)]
pub(crate) struct Neumaier {
    sum: f64,
    comp: f64,
}

impl Neumaier {
    pub(crate) fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.comp += (self.sum - t) + x;
        } else {
            self.comp += (x - t) + self.sum;
        }
        self.sum = t;
    }

    pub(crate) fn value(&self) -> f64 {
        self.sum + self.comp
    }
}

pub(crate) fn sum_real<I: IntoIterator<Item = f64>>(it: I) -> f64 {
    let mut acc = Neumaier::default();
    for x in it {
        acc.add(x);
    }
    acc.value()
}

pub(crate) fn sum_complex<I: IntoIterator<Item = C64>>(it: I) -> C64 {
    let (mut re, mut im) = (Neumaier::default(), Neumaier::default());
    for z in it {
        re.add(z.re);
        im.add(z.im);
    }
    C64::new(re.value(), im.value())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn recovers_cancelled_terms() {
        let xs = [1.0, 1e100, 1.0, -1e100];
        assert_eq!(sum_real(xs), 2.0);
        assert_eq!(xs.iter().sum::<f64>(), 0.0);
    }
}
