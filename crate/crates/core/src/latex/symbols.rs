//! Supported command vocabulary.

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SymbolClass {
    /// Rendered as `mi`.
    Ident,
    /// Rendered as `mo`.
    Op,
    Open,
    Close,
    /// Big operators (`\sum`, `\int`), rendered as `mo`.
    Large,
}

pub fn symbol(cmd: &str) -> Option<(&'static str, SymbolClass)> {
    use SymbolClass::*;
    let hit = match cmd {
        r"\alpha" => ("α", Ident),
        r"\beta" => ("β", Ident),
        r"\gamma" => ("γ", Ident),
        r"\delta" => ("δ", Ident),
        r"\epsilon" => ("ϵ", Ident),
        r"\varepsilon" => ("ε", Ident),
        r"\zeta" => ("ζ", Ident),
        r"\eta" => ("η", Ident),
        r"\theta" => ("θ", Ident),
        r"\vartheta" => ("ϑ", Ident),
        r"\iota" => ("ι", Ident),
        r"\kappa" => ("κ", Ident),
        r"\lambda" => ("λ", Ident),
        r"\mu" => ("μ", Ident),
        r"\nu" => ("ν", Ident),
        r"\xi" => ("ξ", Ident),
        r"\pi" => ("π", Ident),
        r"\varpi" => ("ϖ", Ident),
        r"\rho" => ("ρ", Ident),
        r"\varrho" => ("ϱ", Ident),
        r"\sigma" => ("σ", Ident),
        r"\varsigma" => ("ς", Ident),
        r"\tau" => ("τ", Ident),
        r"\upsilon" => ("υ", Ident),
        r"\phi" => ("ϕ", Ident),
        r"\varphi" => ("φ", Ident),
        r"\chi" => ("χ", Ident),
        r"\psi" => ("ψ", Ident),
        r"\omega" => ("ω", Ident),
        r"\Gamma" => ("Γ", Ident),
        r"\Delta" => ("Δ", Ident),
        r"\Theta" => ("Θ", Ident),
        r"\Lambda" => ("Λ", Ident),
        r"\Xi" => ("Ξ", Ident),
        r"\Pi" => ("Π", Ident),
        r"\Sigma" => ("Σ", Ident),
        r"\Upsilon" => ("Υ", Ident),
        r"\Phi" => ("Φ", Ident),
        r"\Psi" => ("Ψ", Ident),
        r"\Omega" => ("Ω", Ident),
        r"\Re" => ("ℜ", Ident),
        r"\Im" => ("ℑ", Ident),
        r"\infty" => ("∞", Ident),
        r"\partial" => ("∂", Ident),
        r"\nabla" => ("∇", Ident),
        r"\hbar" => ("ℏ", Ident),
        r"\ell" => ("ℓ", Ident),
        r"\aleph" => ("ℵ", Ident),
        r"\emptyset" => ("∅", Ident),

        r"\Rightarrow" => ("⇒", Op),
        r"\implies" => ("⟹", Op),
        r"\Leftarrow" => ("⇐", Op),
        r"\Leftrightarrow" => ("⇔", Op),
        r"\iff" => ("⟺", Op),
        r"\to" => ("→", Op),
        r"\rightarrow" => ("→", Op),
        r"\mapsto" => ("↦", Op),
        r"\lor" => ("∨", Op),
        r"\vee" => ("∨", Op),
        r"\land" => ("∧", Op),
        r"\wedge" => ("∧", Op),
        r"\neg" => ("¬", Op),
        r"\lnot" => ("¬", Op),
        r"\forall" => ("∀", Op),
        r"\exists" => ("∃", Op),
        r"\leq" | r"\le" => ("≤", Op),
        r"\geq" | r"\ge" => ("≥", Op),
        r"\neq" | r"\ne" => ("≠", Op),
        r"\equiv" => ("≡", Op),
        r"\approx" => ("≈", Op),
        r"\sim" => ("∼", Op),
        r"\simeq" => ("≃", Op),
        r"\cong" => ("≅", Op),
        r"\propto" => ("∝", Op),
        r"\ll" => ("≪", Op),
        r"\gg" => ("≫", Op),
        r"\in" => ("∈", Op),
        r"\notin" => ("∉", Op),
        r"\subset" => ("⊂", Op),
        r"\subseteq" => ("⊆", Op),
        r"\supset" => ("⊃", Op),
        r"\cup" => ("∪", Op),
        r"\cap" => ("∩", Op),
        r"\setminus" => ("∖", Op),
        r"\perp" => ("⊥", Op),
        r"\parallel" => ("∥", Op),
        r"\mid" => ("∣", Op),
        r"\pm" => ("±", Op),
        r"\mp" => ("∓", Op),
        r"\cdot" => ("⋅", Op),
        r"\times" => ("×", Op),
        r"\div" => ("÷", Op),
        r"\ast" => ("∗", Op),
        r"\star" => ("⋆", Op),
        r"\circ" => ("∘", Op),
        r"\bullet" => ("∙", Op),
        r"\otimes" => ("⊗", Op),
        r"\oplus" => ("⊕", Op),
        r"\dagger" => ("†", Op),
        r"\prime" => ("′", Op),
        r"\ldots" | r"\dots" => ("…", Op),
        r"\cdots" => ("⋯", Op),
        r"\vert" => ("|", Op),
        r"\|" | r"\Vert" => ("‖", Op),

        r"\{" | r"\lbrace" => ("{", Open),
        r"\}" | r"\rbrace" => ("}", Close),
        r"\langle" => ("⟨", Open),
        r"\rangle" => ("⟩", Close),
        r"\lfloor" => ("⌊", Open),
        r"\rfloor" => ("⌋", Close),
        r"\lceil" => ("⌈", Open),
        r"\rceil" => ("⌉", Close),

        r"\sum" => ("∑", Large),
        r"\prod" => ("∏", Large),
        r"\int" => ("∫", Large),
        r"\iint" => ("∬", Large),
        r"\oint" => ("∮", Large),
        r"\bigcup" => ("⋃", Large),
        r"\bigcap" => ("⋂", Large),
        _ => return None,
    };
    Some(hit)
}

/// Upright operator names such as `\sin`, rendered as multi-letter `mi`.
pub fn operator_name(cmd: &str) -> Option<&'static str> {
    const NAMES: &[&str] = &[
        "sin", "cos", "tan", "cot", "sec", "csc", "sinh", "cosh", "tanh", "coth", "arcsin",
        "arccos", "arctan", "log", "ln", "lg", "exp", "det", "dim", "ker", "lim", "liminf",
        "limsup", "max", "min", "sup", "inf", "arg", "gcd", "deg", "hom", "Pr",
    ];
    let name = cmd.strip_prefix('\\')?;
    NAMES.iter().copied().find(|n| *n == name)
}

/// Spacing commands; they carry no semantics.
pub fn is_spacing(cmd: &str) -> bool {
    matches!(
        cmd,
        r"\," | r"\!" | r"\>" | r"\:" | r"\;" | r"\ " | r"\quad" | r"\qquad" | r"\enspace"
            | r"\thinspace" | r"\medspace" | r"\thickspace" | r"\negthinspace"
    )
}

/// Display-only commands: delimiter scaling and style switches.
pub fn is_display_only(cmd: &str) -> bool {
    matches!(
        cmd,
        r"\left" | r"\right" | r"\middle" | r"\big" | r"\Big" | r"\bigg" | r"\Bigg" | r"\bigl"
            | r"\bigr" | r"\Bigl" | r"\Bigr" | r"\biggl" | r"\biggr" | r"\Biggl" | r"\Biggr"
            | r"\displaystyle" | r"\textstyle" | r"\scriptstyle" | r"\limits" | r"\nolimits"
            | r"\nonumber" | r"\notag"
    )
}

/// Font switches taking one math argument, with their `mathvariant`.
pub fn font_variant(cmd: &str) -> Option<&'static str> {
    Some(match cmd {
        r"\mathbf" | r"\boldsymbol" | r"\bm" => "bold",
        r"\mathbb" => "double-struck",
        r"\mathcal" => "script",
        r"\mathfrak" => "fraktur",
        r"\mathsf" => "sans-serif",
        r"\mathit" => "italic",
        r"\mathtt" => "monospace",
        _ => return None,
    })
}

/// Plain TeX font switches and their LaTeX command equivalents.
pub fn font_switch(cmd: &str) -> Option<&'static str> {
    Some(match cmd {
        r"\rm" => r"\mathrm",
        r"\bf" => r"\mathbf",
        r"\it" => r"\mathit",
        r"\cal" => r"\mathcal",
        r"\sf" => r"\mathsf",
        r"\tt" => r"\mathtt",
        _ => return None,
    })
}

pub fn is_text_command(cmd: &str) -> bool {
    matches!(
        cmd,
        r"\text" | r"\textrm" | r"\textit" | r"\textbf" | r"\textsf" | r"\texttt" | r"\mbox"
    )
}

pub const ENVIRONMENTS: &[&str] = &[
    "cases", "matrix", "pmatrix", "bmatrix", "vmatrix", "Bmatrix", "aligned", "align",
    "align*", "gathered", "split",
];
