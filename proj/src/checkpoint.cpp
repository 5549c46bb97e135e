#include "pvi/checkpoint.hpp"

#include <openssl/sha.h>

#include <bit>
#include <cstdio>
#include <cstring>
#include <fstream>

#include "pvi/errors.hpp"

namespace pvi {

namespace {

constexpr char kMagic[4] = {'P', 'V', 'I', '1'};

void put_u64_le(std::uint64_t v, unsigned char out[8]) {
  for (int i = 0; i < 8; ++i) out[i] = static_cast<unsigned char>((v >> (8 * i)) & 0xff);
}

std::uint64_t get_u64_le(const unsigned char in[8]) {
  std::uint64_t v = 0;
  for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(in[i]) << (8 * i);
  return v;
}

}  // namespace

Fingerprint sha256_fingerprint(std::string_view material) {
  Fingerprint fp{};
  SHA256(reinterpret_cast<const unsigned char*>(material.data()), material.size(), fp.data());
  return fp;
}

std::string fingerprint_hex(const Fingerprint& fp) {
  static const char* digits = "0123456789abcdef";
  std::string out;
  out.reserve(64);
  for (std::uint8_t b : fp) {
    out.push_back(digits[b >> 4]);
    out.push_back(digits[b & 0xf]);
  }
  return out;
}

void save_checkpoint(const std::filesystem::path& path, std::span<const double> values,
                     std::uint64_t iteration, const Fingerprint& fingerprint) {
  const std::filesystem::path tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot open checkpoint file for writing: " + tmp.string());

    unsigned char header[4 + 8 + 32 + 8];
    std::memcpy(header, kMagic, 4);
    put_u64_le(iteration, header + 4);
    std::memcpy(header + 12, fingerprint.data(), 32);
    put_u64_le(values.size(), header + 44);
    out.write(reinterpret_cast<const char*>(header), sizeof(header));

    // Serialise doubles through their bit patterns so the on-disk layout is
    // little-endian regardless of host order.
    std::vector<unsigned char> buf(8 * 8192);
    std::size_t i = 0;
    while (i < values.size()) {
      const std::size_t n = std::min<std::size_t>(8192, values.size() - i);
      for (std::size_t k = 0; k < n; ++k)
        put_u64_le(std::bit_cast<std::uint64_t>(values[i + k]), buf.data() + 8 * k);
      out.write(reinterpret_cast<const char*>(buf.data()), 8 * n);
      i += n;
    }
    if (!out) throw IoError("failed writing checkpoint: " + tmp.string());
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) throw IoError("failed to move checkpoint into place: " + ec.message());
}

Checkpoint load_checkpoint(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open checkpoint file: " + path.string());

  unsigned char header[4 + 8 + 32 + 8];
  in.read(reinterpret_cast<char*>(header), sizeof(header));
  if (!in || std::memcmp(header, kMagic, 4) != 0)
    throw FormatError("not a checkpoint file (bad magic): " + path.string());

  Checkpoint ck;
  ck.iteration = get_u64_le(header + 4);
  std::memcpy(ck.fingerprint.data(), header + 12, 32);
  const std::uint64_t count = get_u64_le(header + 44);

  ck.values.resize(count);
  std::vector<unsigned char> buf(8 * 8192);
  std::size_t i = 0;
  while (i < count) {
    const std::size_t n = std::min<std::size_t>(8192, count - i);
    in.read(reinterpret_cast<char*>(buf.data()), 8 * n);
    if (!in) throw FormatError("checkpoint truncated: " + path.string());
    for (std::size_t k = 0; k < n; ++k)
      ck.values[i + k] = std::bit_cast<double>(get_u64_le(buf.data() + 8 * k));
    i += n;
  }
  return ck;
}

Checkpoint load_checkpoint(const std::filesystem::path& path, const Fingerprint& expected) {
  Checkpoint ck = load_checkpoint(path);
  if (ck.fingerprint != expected)
    throw FingerprintMismatch("checkpoint fingerprint " + fingerprint_hex(ck.fingerprint) +
                              " does not match model fingerprint " + fingerprint_hex(expected));
  return ck;
}

}  // namespace pvi
