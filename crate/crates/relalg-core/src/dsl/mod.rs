//! The `.ral` specification language.
