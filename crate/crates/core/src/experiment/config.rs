//! Experiment parameters and their plain-text file format.
//!
//! ```text
//! [experiment]
//! group = sl
//! n = 2
//! l = 1
//! v0 = 1.4142135623730951, 1.7320508075688772
//! t_grid = 250, 500, 1000, 2000
//! seed = 1
//!
//! [regions]
//! annulus 1 2
//! box 0 1 0 1
//! ```
//!
//! `covolume`, `cap`, `height` and `tol` are optional keys of
//! `[experiment]`. Lines starting with `#` or `;` are comments.

use crate::enumerate::{Group, DEFAULT_CAP};
use crate::error::{Error, Result};
use crate::geometry::Frame;
use crate::measures::Region;

pub const DEFAULT_SEED: u64 = 20_240_601;
pub const DEFAULT_TOL: f64 = 1e-9;

/// Certificate height used when none is configured: the search costs
/// `(2h+1)^l` candidates, so three-column frames get a lower bound.
pub fn default_height(l: usize) -> u64 {
    if l <= 2 {
        1000
    } else {
        100
    }
}

#[derive(Debug, Clone)]
pub struct ExperimentConfig {
    pub group: Group,
    /// Matrix size for SL, half of it for Sp.
    pub n: usize,
    /// Frame length; always `n` for Sp.
    pub l: usize,
    pub v0: Frame,
    pub regions: Vec<Region>,
    pub t_grid: Vec<f64>,
    pub covolume: Option<f64>,
    pub seed: u64,
    pub cap: u64,
    pub height: u64,
    pub tol: f64,
}

impl ExperimentConfig {
    /// Config with defaults for everything but the essentials. `v0` holds
    /// the frame entries column by column.
    pub fn new(group: Group, n: usize, l: usize, v0: &[f64], t_grid: Vec<f64>) -> Result<Self> {
        let ambient = match group {
            Group::Sl => n,
            Group::Sp => 2 * n,
        };
        if l == 0 || v0.len() != ambient * l {
            return Err(Error::Config(format!(
                "v0 needs {} entries for n = {n}, l = {l}, got {}",
                ambient * l,
                v0.len()
            )));
        }
        let cfg = Self {
            group,
            n,
            l,
            v0: Frame::new(ambient, l, v0.to_vec())?,
            regions: Vec::new(),
            t_grid,
            covolume: None,
            seed: DEFAULT_SEED,
            cap: DEFAULT_CAP,
            height: default_height(l),
            tol: DEFAULT_TOL,
        };
        Ok(cfg)
    }

    pub fn with_regions(mut self, regions: Vec<Region>) -> Self {
        self.regions = regions;
        self
    }

    pub fn ambient_dim(&self) -> usize {
        self.v0.ambient_dim()
    }

    pub fn validate(&self) -> Result<()> {
        match self.group {
            Group::Sl if self.n < 2 || self.l >= self.n => {
                return Err(Error::Config(format!("SL needs 1 <= l < n, got n = {}, l = {}", self.n, self.l)))
            }
            Group::Sp if self.l != self.n => {
                return Err(Error::Config(format!("Sp frames have l = n, got n = {}, l = {}", self.n, self.l)))
            }
            _ => {}
        }
        if self.t_grid.is_empty() {
            return Err(Error::Config("T grid is empty".into()));
        }
        if self.t_grid.iter().any(|t| !(t.is_finite() && *t > 0.0)) {
            return Err(Error::Config("T values must be positive and finite".into()));
        }
        if self.t_grid.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::Config("T grid must be strictly increasing".into()));
        }
        if let Some(c) = self.covolume {
            if !(c.is_finite() && c > 0.0) {
                return Err(Error::Config(format!("covolume must be positive, got {c}")));
            }
        }
        if !(self.tol > 0.0) {
            return Err(Error::Config("certificate tolerance must be positive".into()));
        }
        self.v0.volume()?;
        Ok(())
    }

    /// Parses the sectioned `key = value` format described above.
    pub fn parse(text: &str) -> Result<Self> {
        let mut section = String::new();
        let mut keys: Vec<(String, String)> = Vec::new();
        let mut regions = Vec::new();
        for (no, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') || line.starts_with(';') {
                continue;
            }
            if let Some(name) = line.strip_prefix('[').and_then(|s| s.strip_suffix(']')) {
                section = name.trim().to_ascii_lowercase();
                if section != "experiment" && section != "regions" {
                    return Err(Error::Config(format!("line {}: unknown section [{section}]", no + 1)));
                }
                continue;
            }
            match section.as_str() {
                "regions" => regions.push(Region::parse_line(line)?),
                "experiment" => {
                    let (k, v) = line
                        .split_once('=')
                        .ok_or_else(|| Error::Config(format!("line {}: expected key = value", no + 1)))?;
                    let k = k.trim().to_ascii_lowercase();
                    if keys.iter().any(|(x, _)| *x == k) {
                        return Err(Error::Config(format!("line {}: duplicate key '{k}'", no + 1)));
                    }
                    keys.push((k, v.trim().to_string()));
                }
                _ => return Err(Error::Config(format!("line {}: entry outside a section", no + 1))),
            }
        }

        let get = |k: &str| keys.iter().find(|(x, _)| x == k).map(|(_, v)| v.as_str());
        let need = |k: &str| get(k).ok_or_else(|| Error::Config(format!("missing key '{k}'")));
        const KNOWN: [&str; 11] = ["group", "n", "l", "v0", "t_grid", "seed", "covolume", "cap", "height", "tol", "t"];
        if let Some((k, _)) = keys.iter().find(|(k, _)| !KNOWN.contains(&k.as_str())) {
            return Err(Error::Config(format!("unknown key '{k}'")));
        }

        let group: Group = need("group")?.parse().map_err(|_| Error::Config("group must be sl or sp".into()))?;
        let n: usize = parse_num(need("n")?, "n")?;
        let l: usize = match (group, get("l")) {
            (_, Some(v)) => parse_num(v, "l")?,
            (Group::Sp, None) => n,
            (Group::Sl, None) => return Err(Error::Config("missing key 'l'".into())),
        };
        let v0 = parse_list(need("v0")?, "v0")?;
        let t_grid = match (get("t_grid"), get("t")) {
            (Some(v), None) => parse_list(v, "t_grid")?,
            (None, Some(v)) => vec![parse_num(v, "t")?],
            (Some(_), Some(_)) => return Err(Error::Config("give either t or t_grid".into())),
            (None, None) => return Err(Error::Config("missing key 't_grid'".into())),
        };
        let mut cfg = Self::new(group, n, l, &v0, t_grid)?.with_regions(regions);
        if let Some(v) = get("seed") {
            cfg.seed = parse_num(v, "seed")?;
        }
        if let Some(v) = get("covolume") {
            cfg.covolume = Some(parse_num(v, "covolume")?);
        }
        if let Some(v) = get("cap") {
            cfg.cap = parse_num(v, "cap")?;
        }
        if let Some(v) = get("height") {
            cfg.height = parse_num(v, "height")?;
        }
        if let Some(v) = get("tol") {
            cfg.tol = parse_num(v, "tol")?;
        }
        cfg.validate()?;
        Ok(cfg)
    }

    /// The resolved configuration as `key = value` lines, in the order the
    /// parser accepts them.
    pub fn describe(&self) -> Vec<String> {
        let list = |xs: &[f64]| xs.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(", ");
        let mut out = vec![
            format!("group = {}", self.group),
            format!("n = {}", self.n),
            format!("l = {}", self.l),
            format!("v0 = {}", list(self.v0.coords())),
            format!("t_grid = {}", list(&self.t_grid)),
            format!("seed = {}", self.seed),
        ];
        if let Some(c) = self.covolume {
            out.push(format!("covolume = {c}"));
        }
        out.push(format!("cap = {}", self.cap));
        out.push(format!("height = {}", self.height));
        out.push(format!("tol = {:e}", self.tol));
        out.extend(self.regions.iter().enumerate().map(|(i, r)| format!("region {i} = {}", describe_region(r))));
        out
    }
}

pub(crate) fn describe_region(r: &Region) -> String {
    match r {
        Region::Boxes(b) => b
            .iter()
            .map(|b| {
                let pairs: Vec<String> = b.lo.iter().zip(&b.hi).map(|(a, z)| format!("{a} {z}")).collect();
                format!("box {}", pairs.join(" "))
            })
            .collect::<Vec<_>>()
            .join(" | "),
        Region::Annulus { r_min, r_max } => format!("annulus {r_min} {r_max}"),
        Region::Predicate { bounds, .. } => format!("predicate within {:?}..{:?}", bounds.lo, bounds.hi),
    }
}

fn parse_num<T: std::str::FromStr>(s: &str, key: &str) -> Result<T> {
    s.trim()
        .parse()
        .map_err(|_| Error::Config(format!("bad value '{s}' for '{key}'")))
}

/// Comma or whitespace separated numbers.
pub fn parse_list(s: &str, key: &str) -> Result<Vec<f64>> {
    s.split(|c: char| c == ',' || c.is_whitespace())
        .filter(|p| !p.is_empty())
        .map(|p| parse_num(p, key))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    const LEDRAPPIER: &str = "
# four annuli
[experiment]
group = sl
n = 2
l = 1
v0 = 1.4142135623730951, 1.7320508075688772
t_grid = 250, 500, 1000, 2000
seed = 11

[regions]
annulus 1 2
annulus 2 3
annulus 3 4
box 0 1 0 1
";

    #[test]
    fn parses_and_describes() {
        let cfg = ExperimentConfig::parse(LEDRAPPIER).unwrap();
        assert_eq!(cfg.group, Group::Sl);
        assert_eq!((cfg.n, cfg.l, cfg.seed), (2, 1, 11));
        assert_eq!(cfg.t_grid, vec![250.0, 500.0, 1000.0, 2000.0]);
        assert_eq!(cfg.regions.len(), 4);
        assert_eq!(cfg.height, 1000);
        let text = cfg.describe();
        assert!(text.contains(&"region 3 = box 0 1 0 1".to_string()));
        // Everything but the region lines reparses to the same config.
        let mut again = String::from("[experiment]\n");
        for line in text.iter().filter(|l| !l.starts_with("region")) {
            again.push_str(line);
            again.push('\n');
        }
        let back = ExperimentConfig::parse(&again).unwrap();
        assert_eq!(back.describe()[..9], text[..9]);
    }

    #[test]
    fn rejects_bad_input() {
        let bad = [
            "[experiment]\ngroup = sl\nn = 2\nl = 1\nv0 = 1, 2\nt_grid = 5, 3\n",
            "[experiment]\ngroup = sl\nn = 2\nl = 1\nv0 = 1\nt_grid = 5\n",
            "[experiment]\ngroup = sl\nn = 2\nl = 2\nv0 = 1, 2, 3, 4\nt_grid = 5\n",
            "[experiment]\ngroup = sl\nn = 2\nl = 1\nv0 = 0, 0\nt_grid = 5\n",
            "[experiment]\ngroup = sl\nn = 2\nv0 = 1, 2\nt_grid = 5\n",
            "[experiment]\ngroup = sl\nn = 2\nl = 1\nv0 = 1, 2\nt_grid = 5\ncolour = red\n",
            "[experiment]\ngroup = sl\nn = 2\nl = 1\nl = 1\nv0 = 1, 2\nt_grid = 5\n",
            "[misc]\n",
            "group = sl\n",
            "[experiment]\ngroup = gl\nn = 2\nl = 1\nv0 = 1, 2\nt_grid = 5\n",
            "[experiment]\ngroup = sl\nn = 2\nl = 1\nv0 = 1, 2\nt_grid = 5\ncovolume = -1\n",
        ];
        for text in bad {
            assert!(matches!(ExperimentConfig::parse(text), Err(Error::Config(_)) | Err(Error::DegenerateFrame(_))), "{text}");
        }
    }

    #[test]
    fn symplectic_defaults_l_to_n() {
        let cfg = ExperimentConfig::parse("[experiment]\ngroup = sp\nn = 1\nv0 = 1, 2\nt = 10\n").unwrap();
        assert_eq!((cfg.n, cfg.l, cfg.ambient_dim()), (1, 1, 2));
        assert_eq!(cfg.t_grid, vec![10.0]);
    }
}
