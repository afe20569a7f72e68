//! Numerical certification of the structural theorems.
