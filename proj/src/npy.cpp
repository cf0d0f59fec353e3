#include "vidcut/npy.hpp"

#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <iterator>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>

#include <json.hpp>

#include "vidcut/error.hpp"

namespace vidcut {
namespace {

constexpr char kMagic[] = "\x93NUMPY";
constexpr std::size_t kMagicLen = 6;

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\n'))
    s.remove_suffix(1);
  return s;
}

// Returns the raw text following `'key':` up to the next top-level comma.
std::optional<std::string_view> dict_value(std::string_view header,
                                           std::string_view key) {
  for (char quote : {'\'', '"'}) {
    std::string needle;
    needle += quote;
    needle += key;
    needle += quote;
    auto pos = header.find(needle);
    if (pos == std::string_view::npos) continue;
    pos = header.find(':', pos + needle.size());
    if (pos == std::string_view::npos) return std::nullopt;
    std::string_view rest = header.substr(pos + 1);
    int depth = 0;
    std::size_t end = 0;
    for (; end < rest.size(); ++end) {
      const char c = rest[end];
      if (c == '(' || c == '[') ++depth;
      if (c == ')' || c == ']') --depth;
      if ((c == ',' && depth == 0) || (c == '}' && depth == 0)) break;
    }
    return trim(rest.substr(0, end));
  }
  return std::nullopt;
}

struct Header {
  char byte_order = '<';
  int word_size = 8;
  std::vector<std::size_t> shape;
};

Header parse_header(std::string_view text, const std::string& where) {
  Header h;
  auto descr = dict_value(text, "descr");
  auto fortran = dict_value(text, "fortran_order");
  auto shape = dict_value(text, "shape");
  if (!descr || !fortran || !shape) {
    throw IoError(where + ": malformed header");
  }
  std::string_view d = *descr;
  if (d.size() < 2 || (d.front() != '\'' && d.front() != '"')) {
    throw IoError(where + ": malformed header (descr)");
  }
  d = d.substr(1, d.size() - 2);
  if (d.size() != 3 || d[1] != 'f' || (d[2] != '4' && d[2] != '8')) {
    throw IoError(where + ": unsupported dtype '" + std::string(d) + "'");
  }
  h.byte_order = d[0];
  if (h.byte_order == '|' || h.byte_order == '=') h.byte_order = '<';
  if (h.byte_order != '<' && h.byte_order != '>') {
    throw IoError(where + ": unsupported byte order");
  }
  h.word_size = d[2] - '0';
  if (*fortran != "False") {
    throw IoError(where + ": Fortran-ordered arrays are not supported");
  }
  std::string_view s = *shape;
  if (s.size() < 2 || s.front() != '(' || s.back() != ')') {
    throw IoError(where + ": malformed header (shape)");
  }
  s = s.substr(1, s.size() - 2);
  while (!s.empty()) {
    auto comma = s.find(',');
    std::string_view tok = trim(s.substr(0, comma));
    if (!tok.empty()) {
      std::size_t v = 0;
      for (char c : tok) {
        if (c < '0' || c > '9') throw IoError(where + ": malformed shape");
        v = v * 10 + static_cast<std::size_t>(c - '0');
      }
      h.shape.push_back(v);
    }
    if (comma == std::string_view::npos) break;
    s.remove_prefix(comma + 1);
  }
  return h;
}

template <typename Word>
Word swap_bytes(Word w) {
  Word out = 0;
  for (std::size_t i = 0; i < sizeof(Word); ++i) {
    out = static_cast<Word>((out << 8) | (w & 0xff));
    w >>= 8;
  }
  return out;
}

template <typename Word, typename Float>
void decode_values(const std::string& raw, bool swap,
                   std::vector<double>& out) {
  const std::size_t n = out.size();
  for (std::size_t i = 0; i < n; ++i) {
    Word w;
    std::memcpy(&w, raw.data() + i * sizeof(Word), sizeof(Word));
    if (swap) w = swap_bytes(w);
    out[i] = static_cast<double>(std::bit_cast<Float>(w));
  }
}

int json_int(const nlohmann::json& doc, const char* key,
             const std::string& where) {
  if (!doc.contains(key) || !doc[key].is_number_integer()) {
    throw ConfigError(where + ": sidecar lacks integer '" + key + "'");
  }
  return doc[key].get<int>();
}

}  // namespace

NpyArray read_npy(const std::filesystem::path& path) {
  const std::string where = path.string();
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + where);
  std::string bytes((std::istreambuf_iterator<char>(in)),
                    std::istreambuf_iterator<char>());
  if (bytes.size() < kMagicLen + 4 ||
      std::memcmp(bytes.data(), kMagic, kMagicLen) != 0) {
    throw IoError(where + ": malformed header (bad magic)");
  }
  const auto major = static_cast<unsigned char>(bytes[6]);
  std::size_t header_len = 0;
  std::size_t offset = 0;
  if (major == 1) {
    header_len = static_cast<unsigned char>(bytes[8]) |
                 (static_cast<std::size_t>(static_cast<unsigned char>(bytes[9])) << 8);
    offset = 10;
  } else if (major == 2 || major == 3) {
    if (bytes.size() < 12) throw IoError(where + ": malformed header");
    for (int i = 0; i < 4; ++i) {
      header_len |= static_cast<std::size_t>(
                        static_cast<unsigned char>(bytes[8 + i]))
                    << (8 * i);
    }
    offset = 12;
  } else {
    throw IoError(where + ": unsupported NPY version " + std::to_string(major));
  }
  if (bytes.size() < offset + header_len) {
    throw IoError(where + ": malformed header (truncated)");
  }
  const Header h =
      parse_header(std::string_view(bytes).substr(offset, header_len), where);

  NpyArray arr;
  arr.shape = h.shape;
  arr.word_size = h.word_size;
  std::size_t count = 1;
  for (std::size_t d : h.shape) count *= d;
  const std::size_t data_offset = offset + header_len;
  if (bytes.size() - data_offset != count * h.word_size) {
    throw IoError(where + ": data size does not match shape");
  }
  arr.values.resize(count);
  const std::string raw = bytes.substr(data_offset);
  const bool swap = (h.byte_order == '>') != (std::endian::native == std::endian::big);
  if (h.word_size == 8) {
    decode_values<std::uint64_t, double>(raw, swap, arr.values);
  } else {
    decode_values<std::uint32_t, float>(raw, swap, arr.values);
  }
  return arr;
}

void write_npy(const std::filesystem::path& path,
               const std::vector<std::size_t>& shape,
               const std::vector<double>& values, bool as_float32) {
  std::ostringstream dict;
  dict << "{'descr': '<f" << (as_float32 ? 4 : 8)
       << "', 'fortran_order': False, 'shape': (";
  for (std::size_t i = 0; i < shape.size(); ++i) {
    dict << shape[i];
    if (shape.size() == 1 || i + 1 < shape.size()) dict << ", ";
  }
  dict << "), }";
  std::string header = dict.str();
  // Pad so the data starts on a 64-byte boundary; the header ends in '\n'.
  const std::size_t unpadded = kMagicLen + 4 + header.size() + 1;
  header.append((64 - unpadded % 64) % 64, ' ');
  header += '\n';

  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path.string());
  out.write(kMagic, kMagicLen);
  const char version[2] = {1, 0};
  out.write(version, 2);
  const char len[2] = {static_cast<char>(header.size() & 0xff),
                       static_cast<char>((header.size() >> 8) & 0xff)};
  out.write(len, 2);
  out.write(header.data(), static_cast<std::streamsize>(header.size()));
  static_assert(std::endian::native == std::endian::little);
  if (as_float32) {
    for (double v : values) {
      const float f = static_cast<float>(v);
      out.write(reinterpret_cast<const char*>(&f), sizeof f);
    }
  } else {
    out.write(reinterpret_cast<const char*>(values.data()),
              static_cast<std::streamsize>(values.size() * sizeof(double)));
  }
  if (!out) throw IoError("failed writing " + path.string());
}

std::filesystem::path sidecar_path(const std::filesystem::path& npy_path) {
  auto p = npy_path;
  p.replace_extension(".json");
  return p;
}

FeatureMap load_feature_map(const std::filesystem::path& path) {
  const auto side = sidecar_path(path);
  if (!std::filesystem::exists(side)) {
    throw ConfigError("missing sidecar " + side.string());
  }
  NpyArray arr = read_npy(path);
  if (arr.shape.size() != 3) {
    throw IoError(path.string() + ": expected a rank-3 tensor, got rank " +
                  std::to_string(arr.shape.size()));
  }
  nlohmann::json doc;
  {
    std::ifstream in(side);
    if (!in) throw IoError("cannot open " + side.string());
    try {
      doc = nlohmann::json::parse(in);
    } catch (const nlohmann::json::exception& e) {
      throw ConfigError(side.string() + ": " + e.what());
    }
  }
  FeatureMap fm;
  fm.rows = static_cast<int>(arr.shape[0]);
  fm.cols = static_cast<int>(arr.shape[1]);
  fm.dim = static_cast<int>(arr.shape[2]);
  fm.data = std::move(arr.values);
  fm.patch_size = json_int(doc, "patch_size", side.string());
  fm.image_height = json_int(doc, "image_height", side.string());
  fm.image_width = json_int(doc, "image_width", side.string());
  for (double v : fm.data) {
    if (!std::isfinite(v)) throw NumericError("non-finite feature in " + path.string());
  }
  try {
    fm.validate();
  } catch (const MismatchError& e) {
    throw ConfigError(side.string() + ": " + e.what());
  }
  return fm;
}

void save_feature_map(const FeatureMap& fm, const std::filesystem::path& path,
                      bool as_float32) {
  write_npy(path,
            {static_cast<std::size_t>(fm.rows), static_cast<std::size_t>(fm.cols),
             static_cast<std::size_t>(fm.dim)},
            fm.data, as_float32);
  nlohmann::json doc = {{"patch_size", fm.patch_size},
                        {"image_height", fm.image_height},
                        {"image_width", fm.image_width}};
  std::ofstream out(sidecar_path(path));
  if (!out) throw IoError("cannot write " + sidecar_path(path).string());
  out << doc.dump() << '\n';
}

}  // namespace vidcut
