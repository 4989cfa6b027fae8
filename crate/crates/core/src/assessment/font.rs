/// The ten Sloan optotypes.
pub const SLOAN_LETTERS: [char; 10] = ['C', 'D', 'H', 'K', 'N', 'O', 'R', 'S', 'V', 'Z'];

#[rustfmt::skip]
const GLYPHS: [[&str; 5]; 10] = [
    ["#####", "#....", "#....", "#....", "#####"], // C
    ["####.", "#...#", "#...#", "#...#", "####."], // D
    ["#...#", "#...#", "#####", "#...#", "#...#"], // H
    ["#...#", "#..#.", "###..", "#..#.", "#...#"], // K
    ["#...#", "##..#", "#.#.#", "#..##", "#...#"], // N
    ["#####", "#...#", "#...#", "#...#", "#####"], // O
    ["####.", "#...#", "####.", "#..#.", "#...#"], // R
    ["#####", "#....", "#####", "....#", "#####"], // S
    ["#...#", "#...#", "#...#", ".#.#.", "..#.."], // V
    ["#####", "...#.", "..#..", ".#...", "#####"], // Z
];

/// 5x5 bitmap of a Sloan letter, row-major, `true` for ink.
pub fn sloan_glyph(letter: char) -> Option<[[bool; 5]; 5]> {
    let i = SLOAN_LETTERS.iter().position(|&c| c == letter)?;
    let mut out = [[false; 5]; 5];
    for (r, row) in GLYPHS[i].iter().enumerate() {
        for (c, ch) in row.chars().enumerate() {
            out[r][c] = ch == '#';
        }
    }
    Some(out)
}
