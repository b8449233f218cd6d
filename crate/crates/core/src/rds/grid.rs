use std::fmt::Write as _;

use crate::error::{ensure_finite, Error, Result};

/// One χ⁽²⁾ domain: a length in meters and the sign of the nonlinearity.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Domain {
    pub length: f64,
    pub sign: i8,
}

/// Ordered domains along the propagation axis, starting at `z = 0`.
#[derive(Debug, Clone, PartialEq)]
pub struct DomainGrid {
    domains: Vec<Domain>,
    total_length: f64,
}

impl DomainGrid {
    pub fn new(domains: Vec<Domain>) -> Result<Self> {
        if domains.is_empty() {
            return Err(Error::param("domains", "grid is empty"));
        }
        for d in &domains {
            if !(d.length.is_finite() && d.length > 0.0) {
                return Err(Error::param(
                    "length",
                    format!("domain length must be > 0, got {}", d.length),
                ));
            }
            if d.sign != 1 && d.sign != -1 {
                return Err(Error::param(
                    "sign",
                    format!("domain sign must be ±1, got {}", d.sign),
                ));
            }
        }
        let total_length = domains.iter().map(|d| d.length).sum();
        Ok(DomainGrid {
            domains,
            total_length,
        })
    }

    /// A single unpoled domain.
    pub fn uniform(length: f64) -> Result<Self> {
        Self::new(vec![Domain { length, sign: 1 }])
    }

    pub fn domains(&self) -> &[Domain] {
        &self.domains
    }

    pub fn total_length(&self) -> f64 {
        self.total_length
    }

    pub fn len(&self) -> usize {
        self.domains.len()
    }

    pub fn is_empty(&self) -> bool {
        self.domains.is_empty()
    }

    pub fn max_domain_length(&self) -> f64 {
        self.domains.iter().map(|d| d.length).fold(0.0, f64::max)
    }

    /// Equal lengths and strictly alternating signs.
    pub fn is_periodic(&self) -> bool {
        let first = self.domains[0].length;
        self.domains.iter().all(|d| d.length == first)
            && self.domains.windows(2).all(|w| w[0].sign == -w[1].sign)
    }

    /// Mirror image: domain order reversed and every sign flipped.
    pub fn reversed(&self) -> DomainGrid {
        let domains = self
            .domains
            .iter()
            .rev()
            .map(|d| Domain {
                length: d.length,
                sign: -d.sign,
            })
            .collect();
        DomainGrid::new(domains).expect("reversal keeps a valid grid")
    }

    /// Plain-text form, one `length sign` pair per line.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for d in &self.domains {
            let _ = writeln!(out, "{} {}", crate::fmt_f64(d.length), d.sign);
        }
        out
    }

    /// Parses the `length sign` format. Blank lines and `#` comments are
    /// ignored.
    pub fn from_text(text: &str) -> Result<Self> {
        let mut domains = Vec::new();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let bad = |reason: String| Error::GridFormat {
                line: i + 1,
                reason,
            };
            let mut parts = line.split_whitespace();
            let (Some(len), Some(sign), None) = (parts.next(), parts.next(), parts.next()) else {
                return Err(bad(format!("expected `length sign`, got {line:?}")));
            };
            let length: f64 = len
                .parse()
                .map_err(|_| bad(format!("bad length {len:?}")))?;
            let sign: i8 = match sign {
                "1" | "+1" | "+" => 1,
                "-1" | "-" => -1,
                other => return Err(bad(format!("bad sign {other:?}"))),
            };
            if !(length.is_finite() && length > 0.0) {
                return Err(bad(format!("length must be > 0, got {length}")));
            }
            domains.push(Domain { length, sign });
        }
        Self::new(domains)
    }

    /// Sign of the domain containing `z` (right-continuous at boundaries).
    pub fn sign_at(&self, z: f64) -> i8 {
        let mut start = 0.0;
        for d in &self.domains {
            if z < start + d.length {
                return d.sign;
            }
            start += d.length;
        }
        self.domains.last().map(|d| d.sign).unwrap_or(1)
    }
}

/// Outcome of the first-order QPM period calculation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum QpmPeriod {
    /// Sign flips every `domain_length = π/|Δk|`.
    Poled { domain_length: f64 },
    /// `Δk = 0`; the crystal needs no poling.
    PhaseMatched,
}

pub fn qpm_domain_length(dk: f64) -> Result<QpmPeriod> {
    ensure_finite("dk", dk)?;
    if dk == 0.0 {
        return Ok(QpmPeriod::PhaseMatched);
    }
    Ok(QpmPeriod::Poled {
        domain_length: std::f64::consts::PI / dk.abs(),
    })
}

/// Alternating-sign grid; a final partial domain is truncated to fit.
pub fn make_periodic_grid(
    total_length: f64,
    domain_length: f64,
    first_sign: i8,
) -> Result<DomainGrid> {
    ensure_finite("total_length", total_length)?;
    ensure_finite("domain_length", domain_length)?;
    if !(domain_length > 0.0) {
        return Err(Error::param("domain_length", "must be > 0"));
    }
    if total_length < domain_length {
        return Err(Error::param(
            "total_length",
            format!("{total_length} is shorter than one domain ({domain_length})"),
        ));
    }
    if first_sign != 1 && first_sign != -1 {
        return Err(Error::param("first_sign", "must be ±1"));
    }
    // Snap near-integer ratios so that 1.0 / 0.25 gives exactly four domains.
    let ratio = total_length / domain_length;
    let rounded = ratio.round();
    let (full, remainder) = if (ratio - rounded).abs() <= 1e-9 * ratio.max(1.0) {
        (rounded as usize, 0.0)
    } else {
        let full = ratio.floor() as usize;
        (full, total_length - full as f64 * domain_length)
    };
    let mut domains = Vec::with_capacity(full + 1);
    let mut sign = first_sign;
    for _ in 0..full {
        domains.push(Domain {
            length: domain_length,
            sign,
        });
        sign = -sign;
    }
    if remainder > 0.0 {
        domains.push(Domain {
            length: remainder,
            sign,
        });
    }
    DomainGrid::new(domains)
}
