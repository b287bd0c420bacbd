use std::cmp::Reverse;
use std::collections::BinaryHeap;

use crate::align::alignment::MultiAlignment;

/// Renders the alignment as a fixed-width grid, one line per row.
///
/// Each line starts with the row label padded to a common width, followed by
/// two spaces and the grid. Every column and every unmatched occurrence owns
/// one cell; matched symbols share a character offset. The New row is first,
/// the Old rows follow by the offset of their first matched cell, then by
/// pattern id. Trailing spaces are trimmed.
pub fn render_alignment(a: &MultiAlignment) -> String {
    let map = a.column_map();
    let ncols = a.column_count();

    // cells: 0..ncols are columns, the rest are unmatched occurrences
    let mut cell_of: Vec<Vec<usize>> = Vec::with_capacity(a.row_count());
    let mut cell_first: Vec<(usize, usize)> = a
        .columns()
        .iter()
        .map(|c| (c.entries()[0].row, c.entries()[0].pos))
        .collect();
    for (ri, row) in map.iter().enumerate() {
        let mut ids = Vec::with_capacity(row.len());
        for (pos, col) in row.iter().enumerate() {
            match col {
                Some(c) => ids.push(*c),
                None => {
                    ids.push(cell_first.len());
                    cell_first.push((ri, pos));
                }
            }
        }
        cell_of.push(ids);
    }
    let n = cell_first.len();
    let mut succ = vec![Vec::new(); n];
    let mut indeg = vec![0usize; n];
    let mut link = |u: usize, v: usize| {
        succ[u].push(v);
        indeg[v] += 1;
    };
    for w in (0..ncols).collect::<Vec<_>>().windows(2) {
        link(w[0], w[1]);
    }
    for ids in &cell_of {
        for w in ids.windows(2) {
            link(w[0], w[1]);
        }
    }
    // ties broken by the (row, pos) of the cell's first occurrence
    let mut ready: BinaryHeap<Reverse<((usize, usize), usize)>> = (0..n)
        .filter(|&c| indeg[c] == 0)
        .map(|c| Reverse((cell_first[c], c)))
        .collect();
    let mut slot = vec![0usize; n];
    let mut order = Vec::with_capacity(n);
    while let Some(Reverse((_, c))) = ready.pop() {
        slot[c] = order.len();
        order.push(c);
        for &s in &succ[c] {
            indeg[s] -= 1;
            if indeg[s] == 0 {
                ready.push(Reverse((cell_first[s], s)));
            }
        }
    }
    debug_assert_eq!(order.len(), n);

    let mut width = vec![0usize; n];
    for (ri, row) in a.rows().iter().enumerate() {
        for (pos, name) in row.names().iter().enumerate() {
            let c = cell_of[ri][pos];
            width[c] = width[c].max(name.chars().count());
        }
    }
    let mut offset = vec![0usize; n];
    let mut at = 0;
    for &c in &order {
        offset[c] = at;
        at += width[c] + 1;
    }

    let labels: Vec<String> = a.rows().iter().map(|r| r.display_label()).collect();
    let label_width = labels.iter().map(|l| l.chars().count()).max().unwrap_or(0);

    let mut line_order: Vec<usize> = (1..a.row_count()).collect();
    line_order.sort_by_key(|&ri| {
        let first = map[ri]
            .iter()
            .flatten()
            .map(|&c| slot[c])
            .min()
            .unwrap_or(usize::MAX);
        (first, a.rows()[ri].pattern(), ri)
    });
    line_order.insert(0, 0);

    let mut out = String::new();
    for ri in line_order {
        let mut line = format!("{:<w$}  ", labels[ri], w = label_width);
        let base = line.chars().count();
        for (pos, name) in a.rows()[ri].names().iter().enumerate() {
            let target = base + offset[cell_of[ri][pos]];
            let have = line.chars().count();
            line.extend(std::iter::repeat_n(' ', target - have));
            line.push_str(name);
        }
        out.push_str(line.trim_end());
        out.push('\n');
    }
    out
}
