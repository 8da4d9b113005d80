#include "nlsrep/field_io.hpp"

#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "nlsrep/error.hpp"

namespace nlsrep {

namespace fs = std::filesystem;
using nlohmann::json;

void write_file_atomic(const fs::path& path, std::string_view bytes) {
  fs::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorCode::resource, "cannot open " + tmp.string() + " for writing");
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    out.flush();
    if (!out) throw Error(ErrorCode::resource, "short write to " + tmp.string());
  }
  std::error_code ec;
  fs::rename(tmp, path, ec);
  if (ec) {
    fs::remove(tmp, ec);
    throw Error(ErrorCode::resource, "cannot rename into " + path.string());
  }
}

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::resource, "cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

namespace {

std::uint64_t to_little(std::uint64_t v) {
  if constexpr (std::endian::native == std::endian::little) return v;
  std::uint64_t out = 0;
  for (int i = 0; i < 8; ++i) out |= ((v >> (8 * i)) & 0xffu) << (8 * (7 - i));
  return out;
}

void put_double(std::string& buf, double x) {
  const std::uint64_t bits = to_little(std::bit_cast<std::uint64_t>(x));
  char raw[8];
  std::memcpy(raw, &bits, 8);
  buf.append(raw, 8);
}

double get_double(const char* p) {
  std::uint64_t bits;
  std::memcpy(&bits, p, 8);
  return std::bit_cast<double>(to_little(bits));
}

}  // namespace

void write_checkpoint(const Field& f, const fs::path& header, std::string_view config_hash) {
  const Grid& g = *f.grid;
  fs::path payload = header;
  payload.replace_extension(".bin");

  std::string bytes;
  bytes.reserve(16 * f.size());
  for (const cplx& z : f.values) {
    put_double(bytes, z.real());
    put_double(bytes, z.imag());
  }

  json h;
  h["format"] = "nlsrep-field";
  h["version"] = 1;
  h["d"] = g.dim();
  h["mode"] = std::string(to_string(g.mode()));
  if (g.radial()) {
    h["n_r"] = g.n();
    h["r_max"] = g.extent();
  } else {
    h["n"] = g.n();
    h["L"] = g.extent();
  }
  h["time"] = f.time;
  h["endianness"] = "little";
  h["payload"] = payload.filename().string();
  h["config_hash"] = std::string(config_hash);

  // Payload first: a header on disk always points at a complete payload.
  write_file_atomic(payload, bytes);
  write_file_atomic(header, h.dump(2) + "\n");
}

Checkpoint read_checkpoint(const fs::path& header) {
  json h;
  try {
    h = json::parse(read_file(header));
  } catch (const json::exception& e) {
    throw Error(ErrorCode::invalid_field, "malformed checkpoint header: " + std::string(e.what()));
  }
  try {
    if (h.at("format") != "nlsrep-field") throw Error(ErrorCode::invalid_field, "not an nlsrep field header");
    if (h.at("endianness") != "little") throw Error(ErrorCode::invalid_field, "unsupported endianness tag");
    const int d = h.at("d").get<int>();
    const GridMode mode = parse_grid_mode(h.at("mode").get<std::string>());
    GridPtr grid = mode == GridMode::radial
                       ? make_grid(d, h.at("n_r").get<std::size_t>(), h.at("r_max").get<double>(), mode)
                       : make_grid(d, h.at("n").get<std::size_t>(), h.at("L").get<double>(), mode);
    const std::string bytes = read_file(header.parent_path() / h.at("payload").get<std::string>());
    if (bytes.size() != 16 * grid->size())
      throw Error(ErrorCode::invalid_field, "payload size does not match the grid");
    std::vector<cplx> values(grid->size());
    for (std::size_t i = 0; i < values.size(); ++i)
      values[i] = cplx(get_double(bytes.data() + 16 * i), get_double(bytes.data() + 16 * i + 8));
    Checkpoint out{Field(grid, std::move(values), h.at("time").get<double>()),
                   h.value("config_hash", std::string())};
    out.field.require_finite("checkpoint payload");
    return out;
  } catch (const json::exception& e) {
    throw Error(ErrorCode::invalid_field, "incomplete checkpoint header: " + std::string(e.what()));
  }
}

}  // namespace nlsrep
