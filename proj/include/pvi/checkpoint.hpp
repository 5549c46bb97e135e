#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace pvi {

using Fingerprint = std::array<std::uint8_t, 32>;

Fingerprint sha256_fingerprint(std::string_view material);
std::string fingerprint_hex(const Fingerprint& fp);

struct Checkpoint {
  std::vector<double> values;
  std::uint64_t iteration = 0;
  Fingerprint fingerprint{};
};

// Layout: magic "PVI1" | iteration u64 LE | fingerprint (32 bytes) |
// state count u64 LE | values as little-endian IEEE f64.
// The file is written to a temporary sibling and renamed into place, so a
// crashed run never leaves a truncated checkpoint that load accepts.
void save_checkpoint(const std::filesystem::path& path, std::span<const double> values,
                     std::uint64_t iteration, const Fingerprint& fingerprint);

Checkpoint load_checkpoint(const std::filesystem::path& path);

// As above, but refuses (with both fingerprints in the message) when the
// stored fingerprint does not match `expected`.
Checkpoint load_checkpoint(const std::filesystem::path& path, const Fingerprint& expected);

}  // namespace pvi
