//! Text formats: field CSV and boundary-data CSV.
