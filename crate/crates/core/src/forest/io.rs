//! Binary model file.
//!
//! All integers are little-endian; strings are a `u32` byte length followed
//! by UTF-8 bytes.
//!
//! ```text
//! magic        8 bytes  "HFTMLENS"
//! version      u32
//! n_trees      u32
//! min_split    u32
//! method       u8       0 = extra, 1 = forest
//! k_features   u32
//! multi_target u8
//! seed         u64
//! fingerprint  string
//! n_features   u32, then that many strings
//! n_targets    u32, then that many strings
//! n_members    u32
//! member       n_member_targets u32, target indices u32 each, n_trees u32, trees
//! tree         n_nodes u32, nodes, n_values u32, values f64 each
//! node         tag u8 (0 internal, 1 leaf)
//!   internal   feature u32, threshold f64, left u32, right u32, n_samples u64, gain f64
//!   leaf       n_samples u64, value_start u32
//! ```

use super::{Ensemble, EnsembleParams, ForestError, Member, Method, Tree, TreeNode};

pub const MODEL_MAGIC: &[u8; 8] = b"HFTMLENS";
pub const MODEL_VERSION: u32 = 1;

struct Writer(Vec<u8>);

impl Writer {
    fn u8(&mut self, v: u8) {
        self.0.push(v);
    }
    fn u32(&mut self, v: usize) {
        self.0.extend_from_slice(&u32::try_from(v).expect("fits in u32").to_le_bytes());
    }
    fn u64(&mut self, v: u64) {
        self.0.extend_from_slice(&v.to_le_bytes());
    }
    fn f64(&mut self, v: f64) {
        self.0.extend_from_slice(&v.to_le_bytes());
    }
    fn str(&mut self, s: &str) {
        self.u32(s.len());
        self.0.extend_from_slice(s.as_bytes());
    }
}

pub(crate) fn encode(e: &Ensemble) -> Vec<u8> {
    let mut w = Writer(Vec::new());
    w.0.extend_from_slice(MODEL_MAGIC);
    w.u32(MODEL_VERSION as usize);
    let p = &e.params;
    w.u32(p.n_trees);
    w.u32(p.min_split_samples);
    w.u8(match p.method {
        Method::Extra => 0,
        Method::Forest => 1,
    });
    w.u32(p.k_features.unwrap_or(0));
    w.u8(p.multi_target as u8);
    w.u64(p.seed);
    w.str(&e.fingerprint);
    w.u32(e.feature_names.len());
    e.feature_names.iter().for_each(|s| w.str(s));
    w.u32(e.target_names.len());
    e.target_names.iter().for_each(|s| w.str(s));
    w.u32(e.members.len());
    for m in &e.members {
        w.u32(m.targets.len());
        m.targets.iter().for_each(|&t| w.u32(t));
        w.u32(m.trees.len());
        for t in &m.trees {
            w.u32(t.nodes().len());
            for n in t.nodes() {
                match *n {
                    TreeNode::Internal { feature, threshold, left, right, n_samples, gain } => {
                        w.u8(0);
                        w.u32(feature);
                        w.f64(threshold);
                        w.u32(left);
                        w.u32(right);
                        w.u64(n_samples as u64);
                        w.f64(gain);
                    }
                    TreeNode::Leaf { n_samples, value_start } => {
                        w.u8(1);
                        w.u64(n_samples as u64);
                        w.u32(value_start);
                    }
                }
            }
            w.u32(t.leaf_values().len());
            t.leaf_values().iter().for_each(|&v| w.f64(v));
        }
    }
    w.0
}

struct Reader<'a> {
    buf: &'a [u8],
    pos: usize,
}

impl<'a> Reader<'a> {
    fn take(&mut self, n: usize) -> Result<&'a [u8], ForestError> {
        let end = self.pos.checked_add(n).filter(|&e| e <= self.buf.len()).ok_or_else(|| ForestError::Format(format!("truncated at byte {}", self.pos)))?;
        let s = &self.buf[self.pos..end];
        self.pos = end;
        Ok(s)
    }
    fn u8(&mut self) -> Result<u8, ForestError> {
        Ok(self.take(1)?[0])
    }
    fn u32(&mut self) -> Result<usize, ForestError> {
        Ok(u32::from_le_bytes(self.take(4)?.try_into().expect("4 bytes")) as usize)
    }
    fn u64(&mut self) -> Result<u64, ForestError> {
        Ok(u64::from_le_bytes(self.take(8)?.try_into().expect("8 bytes")))
    }
    fn f64(&mut self) -> Result<f64, ForestError> {
        Ok(f64::from_le_bytes(self.take(8)?.try_into().expect("8 bytes")))
    }
    fn str(&mut self) -> Result<String, ForestError> {
        let n = self.u32()?;
        String::from_utf8(self.take(n)?.to_vec()).map_err(|_| ForestError::Format("invalid UTF-8 string".into()))
    }
    /// Count prefix, bounded by the bytes left so corrupt files cannot
    /// trigger huge allocations.
    fn count(&mut self) -> Result<usize, ForestError> {
        let n = self.u32()?;
        if n > self.buf.len() - self.pos {
            return Err(ForestError::Format(format!("implausible count {n}")));
        }
        Ok(n)
    }
}

pub(crate) fn decode(bytes: &[u8]) -> Result<Ensemble, ForestError> {
    let mut r = Reader { buf: bytes, pos: 0 };
    if r.take(8)? != MODEL_MAGIC {
        return Err(ForestError::Format("not a model file".into()));
    }
    let version = r.u32()?;
    if version != MODEL_VERSION as usize {
        return Err(ForestError::Format(format!("unsupported version {version}")));
    }
    let n_trees = r.u32()?;
    let min_split_samples = r.u32()?;
    let method = match r.u8()? {
        0 => Method::Extra,
        1 => Method::Forest,
        m => return Err(ForestError::Format(format!("unknown method tag {m}"))),
    };
    let k = r.u32()?;
    let multi_target = r.u8()? != 0;
    let seed = r.u64()?;
    let params = EnsembleParams { n_trees, min_split_samples, method, k_features: (k > 0).then_some(k), multi_target, seed };
    let fingerprint = r.str()?;
    let n_features = r.count()?;
    let feature_names = (0..n_features).map(|_| r.str()).collect::<Result<Vec<_>, _>>()?;
    let n_targets = r.count()?;
    let target_names = (0..n_targets).map(|_| r.str()).collect::<Result<Vec<_>, _>>()?;
    let n_members = r.count()?;
    let mut members = Vec::with_capacity(n_members);
    for _ in 0..n_members {
        let nt = r.count()?;
        let targets = (0..nt).map(|_| r.u32()).collect::<Result<Vec<_>, _>>()?;
        if targets.is_empty() || targets.iter().any(|&t| t >= n_targets) {
            return Err(ForestError::Format("member target index out of range".into()));
        }
        let n_member_trees = r.count()?;
        let mut trees = Vec::with_capacity(n_member_trees);
        for _ in 0..n_member_trees {
            let n_nodes = r.count()?;
            let mut nodes = Vec::with_capacity(n_nodes);
            for _ in 0..n_nodes {
                nodes.push(match r.u8()? {
                    0 => {
                        let feature = r.u32()?;
                        if feature >= n_features {
                            return Err(ForestError::Format("split feature out of range".into()));
                        }
                        TreeNode::Internal {
                            feature,
                            threshold: r.f64()?,
                            left: r.u32()?,
                            right: r.u32()?,
                            n_samples: r.u64()? as usize,
                            gain: r.f64()?,
                        }
                    }
                    1 => TreeNode::Leaf { n_samples: r.u64()? as usize, value_start: r.u32()? },
                    t => return Err(ForestError::Format(format!("unknown node tag {t}"))),
                });
            }
            let nv = r.count()?;
            let values = (0..nv).map(|_| r.f64()).collect::<Result<Vec<_>, _>>()?;
            trees.push(Tree::from_parts(targets.len(), nodes, values).map_err(ForestError::Format)?);
        }
        if trees.len() != n_trees {
            return Err(ForestError::Format("member tree count differs from n_trees".into()));
        }
        members.push(Member { targets, trees });
    }
    if r.pos != bytes.len() {
        return Err(ForestError::Format("trailing bytes".into()));
    }
    Ok(Ensemble { params, feature_names, fingerprint, target_names, members })
}
