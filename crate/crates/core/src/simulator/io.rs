use super::Snapshot;
use crate::numerics::fmt17;

/// Rows `t,x,u`.
pub fn snapshot_csv(snapshots: &[Snapshot], xs: &[f64]) -> String {
    let mut out = String::from("t,x,u\n");
    for s in snapshots {
        let t = fmt17(s.t);
        for (x, u) in xs.iter().zip(&s.u) {
            out.push_str(&format!("{t},{},{}\n", fmt17(*x), fmt17(*u)));
        }
    }
    out
}

/// `N` (u64), `t`, `u[0..N)`, all little-endian.
pub fn snapshot_binary(s: &Snapshot) -> Vec<u8> {
    let mut out = Vec::with_capacity(16 + 8 * s.u.len());
    out.extend_from_slice(&(s.u.len() as u64).to_le_bytes());
    out.extend_from_slice(&s.t.to_le_bytes());
    for v in &s.u {
        out.extend_from_slice(&v.to_le_bytes());
    }
    out
}

/// Inverse of [`snapshot_binary`]; `None` on truncated or oversized input.
pub fn read_snapshot_binary(bytes: &[u8]) -> Option<Snapshot> {
    let word = |i: usize| -> Option<[u8; 8]> { bytes.get(8 * i..8 * i + 8)?.try_into().ok() };
    let n = u64::from_le_bytes(word(0)?) as usize;
    if bytes.len() != 16 + 8 * n {
        return None;
    }
    let t = f64::from_le_bytes(word(1)?);
    let u = (0..n).map(|i| word(2 + i).map(f64::from_le_bytes)).collect::<Option<Vec<f64>>>()?;
    Some(Snapshot { t, u })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn binary_round_trip() {
        let s = Snapshot { t: 1.25, u: vec![0.0, -1.5, f64::MIN_POSITIVE, 3.0] };
        let b = snapshot_binary(&s);
        assert_eq!(b.len(), 16 + 32);
        assert_eq!(read_snapshot_binary(&b), Some(s));
        assert_eq!(read_snapshot_binary(&b[..40]), None);
    }

    #[test]
    fn csv_rows() {
        let s = Snapshot { t: 0.5, u: vec![1.0, 2.0] };
        let csv = snapshot_csv(&[s], &[0.0, 0.1]);
        assert_eq!(csv.lines().count(), 3);
        let row: Vec<f64> = csv.lines().nth(2).unwrap().split(',').map(|v| v.parse().unwrap()).collect();
        assert_eq!(row, vec![0.5, 0.1, 2.0]);
    }
}
