use crate::error::{Error, Result};

/// Dense `(batch, length, channels)` array, row-major with channels fastest:
/// element `(b, t, c)` lives at `(b * length + t) * channels + c`.
#[derive(Debug, Clone, PartialEq)]
pub struct Tensor3 {
    batch: usize,
    len: usize,
    channels: usize,
    data: Vec<f64>,
}

impl Tensor3 {
    pub fn zeros(batch: usize, len: usize, channels: usize) -> Self {
        Self {
            batch,
            len,
            channels,
            data: vec![0.0; batch * len * channels],
        }
    }

    pub fn from_vec(batch: usize, len: usize, channels: usize, data: Vec<f64>) -> Result<Self> {
        if data.len() != batch * len * channels {
            return Err(Error::Validation(format!(
                "{} values cannot fill shape ({batch}, {len}, {channels})",
                data.len()
            )));
        }
        Ok(Self {
            batch,
            len,
            channels,
            data,
        })
    }

    /// Stacks equal-length single-channel sequences into `(n, len, 1)`.
    pub fn from_sequences<S: AsRef<[f64]>>(rows: &[S]) -> Result<Self> {
        let len = rows.first().map_or(0, |r| r.as_ref().len());
        let mut data = Vec::with_capacity(rows.len() * len);
        for r in rows {
            let r = r.as_ref();
            if r.len() != len {
                return Err(Error::Validation(format!(
                    "sequence of length {} among sequences of length {len}",
                    r.len()
                )));
            }
            data.extend_from_slice(r);
        }
        Self::from_vec(rows.len(), len, 1, data)
    }

    pub fn batch(&self) -> usize {
        self.batch
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    pub fn channels(&self) -> usize {
        self.channels
    }

    pub fn shape(&self) -> (usize, usize, usize) {
        (self.batch, self.len, self.channels)
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }

    pub fn data_mut(&mut self) -> &mut [f64] {
        &mut self.data
    }

    pub fn into_vec(self) -> Vec<f64> {
        self.data
    }

    #[inline]
    pub fn index(&self, b: usize, t: usize, c: usize) -> usize {
        (b * self.len + t) * self.channels + c
    }

    #[inline]
    pub fn get(&self, b: usize, t: usize, c: usize) -> f64 {
        self.data[self.index(b, t, c)]
    }

    /// All values of one batch element.
    pub fn sample(&self, b: usize) -> &[f64] {
        let n = self.len * self.channels;
        &self.data[b * n..(b + 1) * n]
    }

    pub fn sample_mut(&mut self, b: usize) -> &mut [f64] {
        let n = self.len * self.channels;
        &mut self.data[b * n..(b + 1) * n]
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn layout_is_channels_fastest() {
        let t = Tensor3::from_vec(2, 3, 2, (0..12).map(f64::from).collect()).unwrap();
        assert_eq!(t.get(1, 2, 1), 11.0);
        assert_eq!(t.get(0, 1, 0), 2.0);
        assert_eq!(t.sample(1), &[6.0, 7.0, 8.0, 9.0, 10.0, 11.0]);
        assert!(Tensor3::from_vec(2, 3, 2, vec![0.0; 11]).is_err());
    }

    #[test]
    fn stacking_sequences() {
        let t = Tensor3::from_sequences(&[vec![1.0, 2.0], vec![3.0, 4.0]]).unwrap();
        assert_eq!(t.shape(), (2, 2, 1));
        assert!(Tensor3::from_sequences(&[vec![1.0, 2.0], vec![3.0]]).is_err());
    }
}
