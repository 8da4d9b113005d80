#pragma once

#include <filesystem>
#include <string>
#include <string_view>

#include "nlsrep/grid.hpp"

namespace nlsrep {

/// Writes `bytes` to a sibling temporary file and renames it over `path`, so
/// readers never observe a partial file. Throws Error(resource).
void write_file_atomic(const std::filesystem::path& path, std::string_view bytes);
std::string read_file(const std::filesystem::path& path);

/// Field checkpoint: `header` is a UTF-8 JSON document
///   {"format":"nlsrep-field","version":1,"d":..,"mode":"cartesian",
///    "n":..,"L":.. | "n_r":..,"r_max":.., "time":..,"endianness":"little",
///    "payload":"<file>.bin","config_hash":".."}
/// and the payload holds interleaved little-endian IEEE-754 doubles
/// (re, im) in row-major node order.
void write_checkpoint(const Field& f, const std::filesystem::path& header, std::string_view config_hash = {});

struct Checkpoint {
  Field field;
  std::string config_hash;
};

/// Throws Error(resource) on I/O failures and Error(invalid_field) on
/// malformed headers or payload size mismatches.
Checkpoint read_checkpoint(const std::filesystem::path& header);

}  // namespace nlsrep
