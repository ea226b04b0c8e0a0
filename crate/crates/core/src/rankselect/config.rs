use core::fmt;
use core::str::FromStr;

/// How the sample rates `a` (and `b`) are chosen.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum APolicy {
    /// Space-optimal closed form (`a*`, `b*`).
    Star,
    /// Denser top samples for faster queries on uniform inputs.
    Fast,
    /// Smallest measured tree over a grid around `(a*, b*)`.
    Min,
    /// Fixed rates. The two-level tree ignores `b`.
    Explicit { a: usize, b: usize },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum TreeKind {
    ThreeStar,
    TwoStar,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct RsConfig {
    /// L0-block size in bits: 512, 1024 or 2048.
    pub l0: usize,
    /// Summary tree depth, 2 or 3.
    pub levels: u8,
    /// Scan threshold: a select reads at most `alpha` superblock prefixes.
    pub alpha: usize,
    pub a_policy: APolicy,
    pub tree: TreeKind,
    pub select0: bool,
}

/// Named configurations tuned for different trade-offs.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Preset {
    /// L0 = 512, fast rates, alpha = 2, two levels.
    Small,
    /// L0 = 2048, optimal rates, alpha = 16, two levels.
    Robust,
    /// L0 = 2048, fast rates, alpha = 8, three levels.
    Large,
    /// L0 = 2048, grid-minimal rates, alpha = 32, two levels.
    Compact,
}

impl Preset {
    pub const ALL: [Preset; 4] = [
        Preset::Small,
        Preset::Robust,
        Preset::Large,
        Preset::Compact,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Preset::Small => "small",
            Preset::Robust => "robust",
            Preset::Large => "large",
            Preset::Compact => "compact",
        }
    }
}

impl FromStr for Preset {
    type Err = UnknownPreset;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Preset::ALL
            .into_iter()
            .find(|p| p.name().eq_ignore_ascii_case(s))
            .ok_or(UnknownPreset)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct UnknownPreset;

impl fmt::Display for UnknownPreset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("unknown preset (expected small, robust, large or compact)")
    }
}

impl core::error::Error for UnknownPreset {}

impl RsConfig {
    pub fn preset(p: Preset) -> Self {
        let (l0, a_policy, alpha, levels) = match p {
            Preset::Small => (512, APolicy::Fast, 2, 2),
            Preset::Robust => (2048, APolicy::Star, 16, 2),
            Preset::Large => (2048, APolicy::Fast, 8, 3),
            Preset::Compact => (2048, APolicy::Min, 32, 2),
        };
        Self {
            l0,
            levels,
            alpha,
            a_policy,
            tree: TreeKind::ThreeStar,
            select0: true,
        }
    }

    pub fn with_tree(mut self, tree: TreeKind) -> Self {
        self.tree = tree;
        self
    }

    pub fn with_select0(mut self, on: bool) -> Self {
        self.select0 = on;
        self
    }

    pub fn with_policy(mut self, a_policy: APolicy) -> Self {
        self.a_policy = a_policy;
        self
    }
}

impl fmt::Display for APolicy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            APolicy::Star => f.write_str("star"),
            APolicy::Fast => f.write_str("fast"),
            APolicy::Min => f.write_str("min"),
            APolicy::Explicit { a, b } => write!(f, "{a}/{b}"),
        }
    }
}

impl fmt::Display for TreeKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            TreeKind::ThreeStar => "3star",
            TreeKind::TwoStar => "2star",
        })
    }
}

/// `L0=2048;k=2;alpha=16;a=star;tree=3star`
impl fmt::Display for RsConfig {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "L0={};k={};alpha={};a={};tree={}",
            self.l0, self.levels, self.alpha, self.a_policy, self.tree
        )
    }
}
