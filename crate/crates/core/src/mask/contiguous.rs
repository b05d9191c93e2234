//! Slide, bars and grid: geometry built from whole columns or cells with a
//! single partially filled column/cell to land on the exact target.

use super::{KindParams, OcclusionMask};
use crate::rng::SplitMix64;

/// Occludes `order[..target / h]` fully and the first `target % h` rows of the next column.
fn fill_columns(w: u32, h: u32, target: usize, order: &[u32]) -> OcclusionMask {
    let mut mask = OcclusionMask::empty(w, h);
    let full = target / h as usize;
    let rem = (target % h as usize) as u32;
    for &x in &order[..full] {
        for y in 0..h {
            mask.set(x, y);
        }
    }
    if rem > 0 {
        let x = order[full];
        for y in 0..rem {
            mask.set(x, y);
        }
    }
    mask
}

pub(super) fn slide(w: u32, h: u32, target: usize) -> OcclusionMask {
    let order: Vec<u32> = (0..w).collect();
    fill_columns(w, h, target, &order)
}

pub(super) fn bars(w: u32, h: u32, target: usize, bar_count: u32) -> OcclusionMask {
    fill_columns(w, h, target, &bar_column_order(w, bar_count))
}

#[derive(Debug)]
struct Bar {
    center: u32,
    lo: u32,
    hi: u32,
    placed: bool,
    grow_right: bool,
}

impl Bar {
    /// Claims this bar's next column, walking across columns other bars already hold.
    fn claim(&mut self, occupied: &mut [bool]) -> Option<u32> {
        if !self.placed {
            self.placed = true;
            self.lo = self.center;
            self.hi = self.center;
            if !occupied[self.center as usize] {
                occupied[self.center as usize] = true;
                return Some(self.center);
            }
        }
        let sides = if self.grow_right {
            [true, false]
        } else {
            [false, true]
        };
        for right in sides {
            let col = if right {
                (self.hi as usize + 1..occupied.len()).find(|&c| !occupied[c])
            } else {
                (0..self.lo as usize).rev().find(|&c| !occupied[c])
            };
            if let Some(c) = col {
                occupied[c] = true;
                if right {
                    self.hi = c as u32;
                } else {
                    self.lo = c as u32;
                }
                self.grow_right = !right;
                return Some(c as u32);
            }
        }
        None
    }
}

/// Every column of the canvas in the order the bars claim them.
///
/// Bar `i` starts on the column holding `(i + 0.5) * w / bar_count`, then
/// widens right, left, right, ... one column per turn, bars taking turns in
/// index order. A bar that runs into a neighbour keeps extending past it.
pub(crate) fn bar_column_order(w: u32, bar_count: u32) -> Vec<u32> {
    let n = u64::from(bar_count);
    let mut bars: Vec<Bar> = (0..n)
        .map(|i| {
            let center = ((2 * i + 1) * u64::from(w) / (2 * n)).min(u64::from(w) - 1) as u32;
            Bar {
                center,
                lo: center,
                hi: center,
                placed: false,
                grow_right: true,
            }
        })
        .collect();
    let mut occupied = vec![false; w as usize];
    let mut order = Vec::with_capacity(w as usize);
    while order.len() < w as usize {
        for bar in bars.iter_mut() {
            if order.len() == w as usize {
                break;
            }
            if let Some(c) = bar.claim(&mut occupied) {
                order.push(c);
            }
        }
    }
    order
}

/// Cell edges at `round(i * extent / cells)`, rounded half away from zero.
pub(crate) fn cell_edges(extent: u32, cells: u32) -> Vec<u32> {
    let (e, c) = (u64::from(extent), u64::from(cells));
    (0..=c)
        .map(|i| ((2 * i * e + c) / (2 * c)) as u32)
        .collect()
}

pub(super) fn grid(w: u32, h: u32, target: usize, params: &KindParams, seed: u64) -> OcclusionMask {
    let xs = cell_edges(w, params.grid_cols);
    let ys = cell_edges(h, params.grid_rows);
    let cols = params.grid_cols as usize;
    let mut cells: Vec<usize> = (0..cols * params.grid_rows as usize).collect();
    SplitMix64::new(seed).shuffle(&mut cells);

    let mut mask = OcclusionMask::empty(w, h);
    for cell in cells {
        let (r, c) = (cell / cols, cell % cols);
        let (x0, x1, y0, y1) = (xs[c], xs[c + 1], ys[r], ys[r + 1]);
        let area = (x1 - x0) as usize * (y1 - y0) as usize;
        let room = target - mask.occluded_count();
        if area <= room {
            for y in y0..y1 {
                for x in x0..x1 {
                    mask.set(x, y);
                }
            }
            if area == room {
                break;
            }
        } else {
            for (x, y) in (y0..y1)
                .flat_map(|y| (x0..x1).map(move |x| (x, y)))
                .take(room)
            {
                mask.set(x, y);
            }
            break;
        }
    }
    mask
}
