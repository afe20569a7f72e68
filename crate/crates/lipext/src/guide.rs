//! Book chapters, compiled as doctests.
