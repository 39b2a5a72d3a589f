//! Element symbols and the valence table.

const SYMBOLS: &[&str] = &[
    "H", "He", "Li", "Be", "B", "C", "N", "O", "F", "Ne", "Na", "Mg", "Al", "Si", "P", "S", "Cl",
    "Ar", "K", "Ca", "Sc", "Ti", "V", "Cr", "Mn", "Fe", "Co", "Ni", "Cu", "Zn", "Ga", "Ge", "As",
    "Se", "Br", "Kr", "Rb", "Sr", "Y", "Zr", "Nb", "Mo", "Tc", "Ru", "Rh", "Pd", "Ag", "Cd", "In",
    "Sn", "Sb", "Te", "I", "Xe", "Cs", "Ba", "La", "Ce", "Pr", "Nd", "Pm", "Sm", "Eu", "Gd", "Tb",
    "Dy", "Ho", "Er", "Tm", "Yb", "Lu", "Hf", "Ta", "W", "Re", "Os", "Ir", "Pt", "Au", "Hg", "Tl",
    "Pb", "Bi", "Po", "At", "Rn", "Fr", "Ra", "Ac", "Th", "Pa", "U", "Np", "Pu", "Am", "Cm", "Bk",
    "Cf", "Es", "Fm", "Md", "No", "Lr", "Rf", "Db", "Sg", "Bh", "Hs", "Mt", "Ds", "Rg", "Cn", "Nh",
    "Fl", "Mc", "Lv", "Ts", "Og",
];

/// Atoms writable without brackets.
pub const ORGANIC_SUBSET: &[&str] = &["B", "C", "N", "O", "P", "S", "F", "Cl", "Br", "I"];

/// Elements that may be written in lowercase (aromatic) form.
pub const AROMATIC_CAPABLE: &[&str] = &["B", "C", "N", "O", "P", "S", "Se", "As", "Te"];

pub fn is_element(symbol: &str) -> bool {
    SYMBOLS.contains(&symbol)
}

pub fn is_organic(symbol: &str) -> bool {
    ORGANIC_SUBSET.contains(&symbol)
}

pub fn atomic_number(symbol: &str) -> Option<u8> {
    SYMBOLS.iter().position(|s| *s == symbol).map(|i| i as u8 + 1)
}

/// Allowed neutral valences, ascending.
pub fn default_valences(symbol: &str) -> Option<&'static [u8]> {
    Some(match symbol {
        "H" => &[1],
        "B" => &[3],
        "C" => &[4],
        "N" => &[3, 5],
        "O" => &[2],
        "P" => &[3, 5],
        "S" => &[2, 4, 6],
        "F" | "Cl" | "Br" | "I" => &[1],
        "Si" => &[4],
        "Se" => &[2, 4, 6],
        "As" => &[3, 5],
        "Te" => &[2, 4, 6],
        _ => return None,
    })
}

/// Allowed valences adjusted for formal charge.
pub fn charged_valences(symbol: &str, charge: i8) -> Option<Vec<u8>> {
    let base = default_valences(symbol)?;
    if charge == 0 {
        return Some(base.to_vec());
    }
    let shifted = |delta: i32| -> Vec<u8> {
        base.iter()
            .map(|&v| v as i32 + delta)
            .filter(|&v| v >= 0)
            .map(|v| v as u8)
            .collect()
    };
    Some(match symbol {
        "N" | "P" | "As" | "O" | "S" | "Se" | "Te" => shifted(charge as i32),
        "C" | "Si" => vec![3],
        "B" => shifted(-(charge as i32)),
        "F" | "Cl" | "Br" | "I" | "H" => shifted(-(charge as i32).abs()),
        _ => base.to_vec(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn charge_adjustment() {
        assert_eq!(charged_valences("N", 1).unwrap(), vec![4, 6]);
        assert_eq!(charged_valences("O", -1).unwrap(), vec![1]);
        assert_eq!(charged_valences("C", -1).unwrap(), vec![3]);
        assert_eq!(charged_valences("Cl", -1).unwrap(), vec![0]);
        assert!(charged_valences("Na", 1).is_none());
    }

    #[test]
    fn symbol_lookup() {
        assert!(is_element("Cl"));
        assert!(!is_element("R1"));
        assert_eq!(atomic_number("C"), Some(6));
    }
}
