use std::collections::BTreeSet;
use std::fmt::Write as _;

use super::grid::Cell;
use crate::{Error, Result};

/// Static layout of the pick-up and delivery gridworld: size, blocked edges
/// between adjacent cells, the home cell of each of the three items and the
/// station.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GridMap {
    width: u8,
    height: u8,
    walls: BTreeSet<(Cell, Cell)>,
    item_homes: [Cell; 3],
    station: Cell,
}

fn ordered(a: Cell, b: Cell) -> (Cell, Cell) {
    if a <= b {
        (a, b)
    } else {
        (b, a)
    }
}

impl GridMap {
    pub fn new(
        width: u8,
        height: u8,
        walls: impl IntoIterator<Item = (Cell, Cell)>,
        item_homes: [Cell; 3],
        station: Cell,
    ) -> Result<Self> {
        if width == 0 || height == 0 || width as usize * height as usize > 4000 {
            return Err(Error::validation("map", format!("unsupported size {width}x{height}")));
        }
        let mut map = GridMap { width, height, walls: BTreeSet::new(), item_homes, station };
        for (a, b) in walls {
            if !map.in_bounds(a) || !map.in_bounds(b) {
                return Err(Error::validation("map", format!("wall {a:?}-{b:?} leaves the grid")));
            }
            if a.x.abs_diff(b.x) + a.y.abs_diff(b.y) != 1 {
                return Err(Error::validation("map", format!("wall {a:?}-{b:?} joins non-adjacent cells")));
            }
            map.walls.insert(ordered(a, b));
        }
        let special = [item_homes[0], item_homes[1], item_homes[2], station];
        for (i, c) in special.iter().enumerate() {
            if !map.in_bounds(*c) {
                return Err(Error::validation("map", format!("{c:?} is out of bounds")));
            }
            if special[..i].contains(c) {
                return Err(Error::validation("map", format!("{c:?} used twice among items and station")));
            }
        }
        Ok(map)
    }

    pub fn width(&self) -> u8 {
        self.width
    }

    pub fn height(&self) -> u8 {
        self.height
    }

    pub fn station(&self) -> Cell {
        self.station
    }

    /// Home cell of item `1..=3`.
    pub fn item_home(&self, item: u8) -> Cell {
        self.item_homes[item as usize - 1]
    }

    pub fn in_bounds(&self, c: Cell) -> bool {
        c.x < self.width && c.y < self.height
    }

    pub fn walls(&self) -> impl Iterator<Item = (Cell, Cell)> + '_ {
        self.walls.iter().copied()
    }

    /// Whether a unit step from `from` to `to` is possible. `to` is `None`
    /// when the step would leave the grid.
    pub fn passable(&self, from: Cell, to: Option<Cell>) -> bool {
        match to {
            Some(to) => self.in_bounds(to) && !self.walls.contains(&ordered(from, to)),
            None => false,
        }
    }

    pub fn cells(&self) -> impl Iterator<Item = Cell> + '_ {
        (0..self.height).flat_map(move |y| (0..self.width).map(move |x| Cell { x, y }))
    }

    pub fn cell_index(&self, c: Cell) -> usize {
        c.y as usize * self.width as usize + c.x as usize
    }
}

/// Parses the map format:
///
/// ```text
/// size 9 7
/// wall x1 y1 x2 y2
/// item <1..3> x y
/// station x y
/// ```
pub fn parse_map(text: &str, origin: &str) -> Result<GridMap> {
    let mut size = None;
    let mut walls = Vec::new();
    let mut items: [Option<Cell>; 3] = [None; 3];
    let mut station = None;
    for (lineno, raw) in text.lines().enumerate() {
        let lineno = lineno + 1;
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split_whitespace().collect();
        let nums = |from: usize, count: usize| -> Result<Vec<u8>> {
            if fields.len() != from + count {
                return Err(Error::parse(origin, lineno, format!("`{}` takes {count} numbers", fields[0])));
            }
            fields[from..]
                .iter()
                .map(|t| t.parse::<u8>().map_err(|_| Error::parse(origin, lineno, format!("bad number `{t}`"))))
                .collect()
        };
        match fields[0] {
            "size" => {
                let v = nums(1, 2)?;
                size = Some((v[0], v[1]));
            }
            "wall" => {
                let v = nums(1, 4)?;
                walls.push((Cell::new(v[0], v[1]), Cell::new(v[2], v[3])));
            }
            "item" => {
                let v = nums(1, 3)?;
                if !(1..=3).contains(&v[0]) {
                    return Err(Error::parse(origin, lineno, "item id must be 1, 2 or 3"));
                }
                let slot = &mut items[v[0] as usize - 1];
                if slot.is_some() {
                    return Err(Error::parse(origin, lineno, format!("item {} placed twice", v[0])));
                }
                *slot = Some(Cell::new(v[1], v[2]));
            }
            "station" => {
                let v = nums(1, 2)?;
                station = Some(Cell::new(v[0], v[1]));
            }
            other => return Err(Error::parse(origin, lineno, format!("unknown directive `{other}`"))),
        }
    }
    let (w, h) = size.ok_or_else(|| Error::parse(origin, 0, "missing `size`"))?;
    let station = station.ok_or_else(|| Error::parse(origin, 0, "missing `station`"))?;
    let mut homes = [Cell::new(0, 0); 3];
    for (i, it) in items.iter().enumerate() {
        homes[i] = it.ok_or_else(|| Error::parse(origin, 0, format!("missing `item {}`", i + 1)))?;
    }
    GridMap::new(w, h, walls, homes, station).map_err(|e| Error::parse(origin, 0, e.to_string()))
}

/// Wall list followed by an ASCII drawing (north up). `|` and `---` are
/// walls, `S` the station, digits item homes.
pub fn render_map(map: &GridMap) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "size {} {}", map.width(), map.height());
    let _ = writeln!(out, "station {} {}", map.station().x, map.station().y);
    for i in 1..=3 {
        let c = map.item_home(i);
        let _ = writeln!(out, "item {i} {} {}", c.x, c.y);
    }
    for (a, b) in map.walls() {
        let _ = writeln!(out, "wall {} {} {} {}", a.x, a.y, b.x, b.y);
    }
    out.push('\n');
    let w = map.width();
    let border: String = std::iter::once("+".to_string()).chain((0..w).map(|_| "---+".to_string())).collect();
    let _ = writeln!(out, "{border}");
    for y in (0..map.height()).rev() {
        let mut row = String::from("|");
        for x in 0..w {
            let c = Cell::new(x, y);
            let mark = if c == map.station() {
                'S'
            } else if let Some(i) = (1..=3).find(|&i| map.item_home(i) == c) {
                char::from(b'0' + i)
            } else {
                ' '
            };
            row.push(' ');
            row.push(mark);
            row.push(' ');
            let east = (x + 1 < w).then(|| Cell::new(x + 1, y));
            row.push(if map.passable(c, east) { ' ' } else { '|' });
        }
        let _ = writeln!(out, "{row}");
        let mut sep = String::from("+");
        for x in 0..w {
            let c = Cell::new(x, y);
            let south = y.checked_sub(1).map(|sy| Cell::new(x, sy));
            sep.push_str(if map.passable(c, south) { "   +" } else { "---+" });
        }
        let _ = writeln!(out, "{sep}");
    }
    out
}
