//! Stroke font used to rasterize text. Glyphs are polylines on a 5 x 7 grid
//! (x 0..=4, y 0..=6 from the cap line down to the baseline); each point is
//! written as two digits and polylines are separated by `|`.

fn uppercase(c: char) -> Option<&'static str> {
    Some(match c {
        'A' => "06 20 46|13 33",
        'B' => "00 30 41 42 33 03|33 44 45 36 06 00",
        'C' => "41 30 10 01 05 16 36 45",
        'D' => "00 30 41 45 36 06 00",
        'E' => "40 00 06 46|03 33",
        'F' => "40 00 06|03 33",
        'G' => "41 30 10 01 05 16 36 45 43 23",
        'H' => "00 06|40 46|03 43",
        'I' => "10 30|20 26|16 36",
        'J' => "40 45 36 16 05",
        'K' => "00 06|40 03 46",
        'L' => "00 06 46",
        'M' => "06 00 23 40 46",
        'N' => "06 00 46 40",
        'O' => "10 30 41 45 36 16 05 01 10",
        'P' => "06 00 30 41 42 33 03",
        'Q' => "10 30 41 45 36 16 05 01 10|24 46",
        'R' => "06 00 30 41 42 33 03|23 46",
        'S' => "41 30 10 01 02 13 33 44 45 36 16 05",
        'T' => "00 40|20 26",
        'U' => "00 05 16 36 45 40",
        'V' => "00 26 40",
        'W' => "00 16 23 36 40",
        'X' => "00 46|40 06",
        'Y' => "00 23 40|23 26",
        'Z' => "00 40 06 46",
        '0' => "10 30 41 45 36 16 05 01 10|15 31",
        '1' => "11 20 26|16 36",
        '2' => "01 10 30 41 42 06 46",
        '3' => "01 10 30 41 42 33 13|33 44 45 36 16 05",
        '4' => "36 30 04 44",
        '5' => "40 00 02 32 43 45 36 06",
        '6' => "41 30 10 01 05 16 36 45 44 33 03",
        '7' => "00 40 16",
        '8' => "10 30 41 42 33 13 04 05 16 36 45 44 33|13 02 01 10",
        '9' => "05 16 36 45 41 30 10 01 02 13 43",
        '(' => "20 11 15 26",
        ')' => "20 31 35 26",
        '[' => "30 10 16 36",
        ']' => "10 30 36 16",
        '{' => "30 20 12 03 14 26 36",
        '}' => "10 20 32 43 34 26 16",
        '-' => "13 33",
        '+' => "13 33|22 24",
        '=' => "02 42|04 44",
        '#' => "02 42|04 44|10 16|30 36",
        ',' => "24 25 16",
        '.' => "25 26",
        ':' => "22 23|25 26",
        ';' => "22 23|25 16",
        '/' => "06 40",
        '\\' => "00 46",
        '*' => "21 25|12 34|14 32",
        '\'' => "20 21",
        '"' => "10 11|30 31",
        '<' => "31 13 35",
        '>' => "11 33 15",
        '%' => "06 40|00 01|45 46",
        '$' => "41 30 10 01 02 13 33 44 45 36 16 05|20 26",
        '|' => "20 26",
        '_' => "06 46",
        '?' => "01 10 30 41 42 23 24|26 26",
        '!' => "20 24|26 26",
        '~' => "03 12 23 32 43",
        '^' => "12 20 32",
        '`' => "10 21",
        ' ' => "",
        _ => return None,
    })
}

const UNKNOWN: &str = "00 40 46 06 00";

/// Polylines of one glyph in unit coordinates: x in [0, 1] across the
/// glyph body, y in [0, 1] from cap line to baseline. Lowercase letters are
/// drawn as small capitals.
pub fn glyph(c: char) -> Vec<Vec<(f64, f64)>> {
    let (spec, small) = match uppercase(c) {
        Some(s) => (s, false),
        None if c.is_ascii_lowercase() => (uppercase(c.to_ascii_uppercase()).expect("letters covered"), true),
        None => (UNKNOWN, false),
    };
    spec.split('|')
        .filter(|s| !s.trim().is_empty())
        .map(|poly| {
            poly.split_whitespace()
                .map(|p| {
                    let b = p.as_bytes();
                    let x = (b[0] - b'0') as f64 / 4.0;
                    let y = (b[1] - b'0') as f64 / 6.0;
                    if small {
                        (x, 1.0 - (1.0 - y) * 0.7)
                    } else {
                        (x, y)
                    }
                })
                .collect()
        })
        .collect()
}
