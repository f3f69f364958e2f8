#pragma once

// Configuration files, binary snapshots, monitor CSV and event logs.
//
// Configuration is INI-style:
//
//   [grid]
//   nx = 64
//   ny = 64
//   [initial]
//   n = gaussian_bump
//
// Sections: grid, coefficients, fluid, transport, initial, monitors, output.
// Unknown sections or keys and duplicate keys are errors; everything except
// grid.nx / grid.ny has a default.
//
// Snapshot layout (all little-endian):
//   "CTNS", u32 version, u32 dim, u32 nx, u32 ny, u32 nz,
//   f64 hx, f64 hy, f64 hz (0 in 2D), f64 time,
//   f64 n[cells], f64 c[cells], f64 u_x[faces_x], f64 u_y[faces_y], [f64 u_z[faces_z]],
//   f64 P[cells]
// Cell and face arrays are row-major with x slowest; face arrays include the
// boundary faces.

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "ctns/sim.hpp"

namespace ctns {

inline constexpr std::uint32_t kSnapshotVersion = 1;

/// Throws ParseError (line/column) for syntax problems and unknown or
/// duplicate keys, ConfigError (naming the key) for invalid values.
SimConfig parse_config(std::string_view text);
SimConfig read_config(const std::filesystem::path& path);
/// Every key with its resolved value; parse_config(serialize_config(c)) == c.
std::string serialize_config(const SimConfig& config);

std::vector<unsigned char> encode_snapshot(const State& state);
/// Throws FormatError: "bad magic", "unsupported version N",
/// "unexpected EOF at offset N", "trailing bytes after offset N".
State decode_snapshot(const std::vector<unsigned char>& bytes);
void write_snapshot(const std::filesystem::path& path, const State& state);
State read_snapshot(const std::filesystem::path& path);

/// Column names of the monitor CSV, standard columns first.
const std::vector<std::string>& csv_columns();
std::string csv_header();
/// Numbers with 17 significant digits; NaN as "nan".
std::string csv_row(const MonitorRecord& record);
std::string format_csv(const std::vector<MonitorRecord>& records);
/// Parses a file produced by format_csv (used by tests and tools).
std::vector<std::vector<double>> parse_csv_numbers(const std::string& text);

/// Writes to `path` via a temporary file in the same directory and rename.
void atomic_write(const std::filesystem::path& path, std::string_view content);
void atomic_write(const std::filesystem::path& path, const std::vector<unsigned char>& content);

}  // namespace ctns
