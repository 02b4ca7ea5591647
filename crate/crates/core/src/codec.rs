//! Fixed binary layout for chromosomes stored in record values.
//!
//! ```text
//! pop_id  u32 LE
//! n       u32 LE
//! genes   n x u32 LE
//! length  u64 LE
//! ```

use thiserror::Error;

use crate::ga::Chromosome;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum CodecError {
    #[error("buffer truncated: need {needed} bytes, have {available}")]
    Truncated { needed: usize, available: usize },
    #[error("{extra} trailing bytes after chromosome")]
    TrailingBytes { extra: usize },
    #[error("gene {gene} at position {position} is out of range for {n} cities")]
    GeneOutOfRange { position: usize, gene: u32, n: u32 },
    #[error("city {gene} appears more than once")]
    DuplicateGene { gene: u32 },
    #[error("tour of {0} cities does not fit the 32-bit layout")]
    TooLarge(usize),
}

pub fn encoded_len(n: usize) -> usize {
    4 + 4 + 4 * n + 8
}

pub fn encode(chromosome: &Chromosome) -> Result<Vec<u8>, CodecError> {
    let n = chromosome.genes.len();
    let n32 = u32::try_from(n).map_err(|_| CodecError::TooLarge(n))?;
    let mut out = Vec::with_capacity(encoded_len(n));
    out.extend_from_slice(&chromosome.pop_id.to_le_bytes());
    out.extend_from_slice(&n32.to_le_bytes());
    for &g in &chromosome.genes {
        let g = u32::try_from(g).map_err(|_| CodecError::TooLarge(g))?;
        out.extend_from_slice(&g.to_le_bytes());
    }
    out.extend_from_slice(&chromosome.length.to_le_bytes());
    Ok(out)
}

pub fn decode(bytes: &[u8]) -> Result<Chromosome, CodecError> {
    let header = 8;
    if bytes.len() < header {
        return Err(CodecError::Truncated {
            needed: header,
            available: bytes.len(),
        });
    }
    let pop_id = u32::from_le_bytes(bytes[0..4].try_into().unwrap());
    let n = u32::from_le_bytes(bytes[4..8].try_into().unwrap());
    let needed = encoded_len(n as usize);
    if bytes.len() < needed {
        return Err(CodecError::Truncated {
            needed,
            available: bytes.len(),
        });
    }
    if bytes.len() > needed {
        return Err(CodecError::TrailingBytes {
            extra: bytes.len() - needed,
        });
    }
    let mut seen = vec![false; n as usize];
    let mut genes = Vec::with_capacity(n as usize);
    for (position, chunk) in bytes[8..8 + 4 * n as usize].chunks_exact(4).enumerate() {
        let gene = u32::from_le_bytes(chunk.try_into().unwrap());
        if gene >= n {
            return Err(CodecError::GeneOutOfRange { position, gene, n });
        }
        if std::mem::replace(&mut seen[gene as usize], true) {
            return Err(CodecError::DuplicateGene { gene });
        }
        genes.push(gene as usize);
    }
    let length = u64::from_le_bytes(bytes[needed - 8..needed].try_into().unwrap());
    Ok(Chromosome {
        genes,
        length,
        fitness: 0.0,
        pop_id,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn chrom(genes: Vec<usize>, length: u64, pop_id: u32) -> Chromosome {
        Chromosome {
            genes,
            length,
            fitness: 0.0,
            pop_id,
        }
    }

    #[test]
    fn two_city_layout() {
        let c = chrom(vec![0, 1], 10, 0);
        let bytes = encode(&c).unwrap();
        assert_eq!(bytes.len(), 24);
        assert_eq!(
            bytes,
            [0, 0, 0, 0, 2, 0, 0, 0, 0, 0, 0, 0, 1, 0, 0, 0, 10, 0, 0, 0, 0, 0, 0, 0]
        );
        assert_eq!(decode(&bytes).unwrap(), c);
    }

    #[test]
    fn rejects_corruption() {
        let bytes = encode(&chrom(vec![2, 0, 1], 77, 5)).unwrap();
        assert!(matches!(
            decode(&bytes[..bytes.len() - 1]),
            Err(CodecError::Truncated { .. })
        ));
        assert!(matches!(decode(&bytes[..3]), Err(CodecError::Truncated { .. })));

        let mut dup = bytes.clone();
        dup[12..16].copy_from_slice(&2u32.to_le_bytes());
        assert_eq!(decode(&dup), Err(CodecError::DuplicateGene { gene: 2 }));

        let mut range = bytes.clone();
        range[8..12].copy_from_slice(&3u32.to_le_bytes());
        assert!(matches!(decode(&range), Err(CodecError::GeneOutOfRange { gene: 3, .. })));

        let mut long = bytes;
        long.push(0);
        assert_eq!(decode(&long), Err(CodecError::TrailingBytes { extra: 1 }));
    }
}
