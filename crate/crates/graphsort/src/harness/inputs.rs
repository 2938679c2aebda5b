//! Initial-array generators and file loading.

use super::HarnessError;
use rand::Rng;
use std::path::{Path, PathBuf};

/// Which initial arrays the trials start from.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum InputKind {
    /// `(n, n-1, ..., 1)` — every pair inverted.
    Reverse,
    /// `(2, 1, 4, 3, ...)` — the coupon-collector lower-bound input.
    Alternating,
    /// A uniform permutation of `1..=n`, drawn from the trial's stream.
    RandomPermutation,
    /// A block of ones then a block of zeros: the worst balanced 0-1 input.
    ZeroOneWorst,
    /// One integer per line.
    File(PathBuf),
}

impl InputKind {
    pub fn parse(text: &str) -> Result<Self, HarnessError> {
        Ok(match text {
            "reverse" => InputKind::Reverse,
            "alternating" => InputKind::Alternating,
            "random" | "random-permutation" => InputKind::RandomPermutation,
            "zero-one-worst" | "zero-one-balanced-worst" => InputKind::ZeroOneWorst,
            other => match other.strip_prefix("file:") {
                Some(path) if !path.is_empty() => InputKind::File(PathBuf::from(path)),
                _ => return Err(HarnessError::BadInputKind(other.to_string())),
            },
        })
    }

    pub fn label(&self) -> String {
        match self {
            InputKind::Reverse => "reverse".into(),
            InputKind::Alternating => "alternating".into(),
            InputKind::RandomPermutation => "random".into(),
            InputKind::ZeroOneWorst => "zero-one-worst".into(),
            InputKind::File(path) => format!("file:{}", path.display()),
        }
    }
}

pub fn load_input_file(path: &Path) -> Result<Vec<u64>, HarnessError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| HarnessError::BadInputFile(format!("{}: {e}", path.display())))?;
    let mut values = Vec::new();
    for (lineno, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        let v: u64 = line.parse().map_err(|_| {
            HarnessError::BadInputFile(format!("{}:{}: bad integer {line:?}", path.display(), lineno + 1))
        })?;
        values.push(v);
    }
    if values.is_empty() {
        return Err(HarnessError::BadInputFile(format!("{}: empty", path.display())));
    }
    Ok(values)
}

/// Materializes the initial array for one trial. Only `RandomPermutation`
/// consumes randomness.
pub fn generate_input<R: Rng + ?Sized>(
    kind: &InputKind,
    n: usize,
    rng: &mut R,
) -> Result<Vec<u64>, HarnessError> {
    match kind {
        InputKind::Reverse => Ok((1..=n as u64).rev().collect()),
        InputKind::Alternating => {
            let mut x: Vec<u64> = (1..=n as u64).collect();
            for k in (0..n.saturating_sub(1)).step_by(2) {
                x.swap(k, k + 1);
            }
            Ok(x)
        }
        InputKind::RandomPermutation => {
            let mut x: Vec<u64> = (1..=n as u64).collect();
            for i in (1..n).rev() {
                let j = rng.gen_range(0..=i);
                x.swap(i, j);
            }
            Ok(x)
        }
        InputKind::ZeroOneWorst => {
            if !n.is_multiple_of(2) {
                return Err(HarnessError::BadConfig(format!(
                    "zero-one-worst input needs even n, got {n}"
                )));
            }
            let mut x = vec![1_u64; n / 2];
            x.extend(std::iter::repeat_n(0, n / 2));
            Ok(x)
        }
        InputKind::File(path) => {
            let values = load_input_file(path)?;
            if values.len() != n {
                return Err(HarnessError::BadInputFile(format!(
                    "{}: holds {} values but n = {n}",
                    path.display(),
                    values.len()
                )));
            }
            Ok(values)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn generators() {
        let mut rng = ChaCha8Rng::seed_from_u64(60);
        assert_eq!(
            generate_input(&InputKind::Reverse, 4, &mut rng).unwrap(),
            vec![4, 3, 2, 1]
        );
        assert_eq!(
            generate_input(&InputKind::Alternating, 6, &mut rng).unwrap(),
            vec![2, 1, 4, 3, 6, 5]
        );
        assert_eq!(
            generate_input(&InputKind::Alternating, 5, &mut rng).unwrap(),
            vec![2, 1, 4, 3, 5]
        );
        assert_eq!(
            generate_input(&InputKind::ZeroOneWorst, 6, &mut rng).unwrap(),
            vec![1, 1, 1, 0, 0, 0]
        );
        assert!(generate_input(&InputKind::ZeroOneWorst, 5, &mut rng).is_err());

        let mut perm = generate_input(&InputKind::RandomPermutation, 50, &mut rng).unwrap();
        perm.sort_unstable();
        assert_eq!(perm, (1..=50).collect::<Vec<u64>>());
    }

    #[test]
    fn parsing() {
        assert_eq!(InputKind::parse("reverse").unwrap(), InputKind::Reverse);
        assert_eq!(InputKind::parse("random").unwrap(), InputKind::RandomPermutation);
        assert_eq!(
            InputKind::parse("file:/tmp/x.txt").unwrap(),
            InputKind::File(PathBuf::from("/tmp/x.txt"))
        );
        assert!(InputKind::parse("bogus").is_err());
        assert!(InputKind::parse("file:").is_err());
    }

    #[test]
    fn file_loading() {
        let dir = std::env::temp_dir().join("graphsort-input-test");
        std::fs::create_dir_all(&dir).unwrap();
        let path = dir.join("input.txt");
        std::fs::write(&path, "3\n\n1\n2\n").unwrap();
        assert_eq!(load_input_file(&path).unwrap(), vec![3, 1, 2]);
        let mut rng = ChaCha8Rng::seed_from_u64(61);
        assert!(generate_input(&InputKind::File(path.clone()), 4, &mut rng).is_err());
        std::fs::write(&path, "1\nx\n").unwrap();
        assert!(load_input_file(&path).is_err());
    }
}
