//! Binary and CSV storage of sampled paths.
//!
//! Binary layout, little endian: magic `AEQ1`, `H: f64`, `dt: f64`,
//! `n: u64`, `seed: u64`, `method: u8`, then `n + 1` values as `f64`.

use std::io::{Read, Write};

use super::{FbmPath, HurstParam, Method};
use crate::error::{Error, Result};

pub const MAGIC: &[u8; 4] = b"AEQ1";

pub fn write_binary<W: Write>(path: &FbmPath, mut w: W) -> Result<()> {
    w.write_all(MAGIC)?;
    w.write_all(&path.hurst.value().to_le_bytes())?;
    w.write_all(&path.dt.to_le_bytes())?;
    w.write_all(&(path.steps() as u64).to_le_bytes())?;
    w.write_all(&path.seed.to_le_bytes())?;
    w.write_all(&[path.method.code()])?;
    for v in &path.values {
        w.write_all(&v.to_le_bytes())?;
    }
    w.flush()?;
    Ok(())
}

fn read_array<const N: usize, R: Read>(r: &mut R) -> Result<[u8; N]> {
    let mut buf = [0u8; N];
    r.read_exact(&mut buf)?;
    Ok(buf)
}

pub fn read_binary<R: Read>(mut r: R) -> Result<FbmPath> {
    let magic = read_array::<4, _>(&mut r)?;
    if &magic != MAGIC {
        return Err(Error::Format(format!("bad magic {magic:?}")));
    }
    let hurst = HurstParam::new(f64::from_le_bytes(read_array(&mut r)?))?;
    let dt = f64::from_le_bytes(read_array(&mut r)?);
    let n = u64::from_le_bytes(read_array(&mut r)?) as usize;
    let seed = u64::from_le_bytes(read_array(&mut r)?);
    let [code] = read_array::<1, _>(&mut r)?;
    let method =
        Method::from_code(code).ok_or_else(|| Error::Format(format!("unknown method code {code}")))?;
    let values = (0..=n)
        .map(|_| Ok(f64::from_le_bytes(read_array(&mut r)?)))
        .collect::<Result<Vec<f64>>>()?;
    Ok(FbmPath { hurst, dt, values, seed, method })
}

/// Columns `t,value`, shortest round-trip float formatting.
pub fn write_csv<W: Write>(path: &FbmPath, mut w: W) -> Result<()> {
    writeln!(w, "t,value")?;
    for (i, v) in path.values.iter().enumerate() {
        writeln!(w, "{},{}", path.time(i), v)?;
    }
    w.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fbm::generate_fbm;

    #[test]
    fn binary_round_trip() {
        let p = generate_fbm(HurstParam::new(0.35).unwrap(), 17, 0.25, 4, Method::Cholesky).unwrap();
        let mut buf = Vec::new();
        write_binary(&p, &mut buf).unwrap();
        assert_eq!(buf.len(), 4 + 8 * 4 + 1 + 8 * 18);
        assert_eq!(read_binary(&buf[..]).unwrap(), p);
        buf[0] = b'X';
        assert!(matches!(read_binary(&buf[..]), Err(Error::Format(_))));
    }

    #[test]
    fn truncated_input_is_an_error() {
        let p = generate_fbm(HurstParam::new(0.5).unwrap(), 4, 1.0, 4, Method::Cholesky).unwrap();
        let mut buf = Vec::new();
        write_binary(&p, &mut buf).unwrap();
        assert!(read_binary(&buf[..buf.len() - 3]).is_err());
    }

    #[test]
    fn csv_header_and_rows() {
        let p = generate_fbm(HurstParam::new(0.5).unwrap(), 2, 0.5, 1, Method::Cholesky).unwrap();
        let mut buf = Vec::new();
        write_csv(&p, &mut buf).unwrap();
        let s = String::from_utf8(buf).unwrap();
        let lines: Vec<_> = s.lines().collect();
        assert_eq!(lines[0], "t,value");
        assert_eq!(lines.len(), 4);
        assert!(lines[1].starts_with("0,0"));
    }
}
