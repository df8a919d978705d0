#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>

namespace sentistack {

/// Incremental SHA-256 (FIPS 180-4). Self-contained so digests never depend
/// on system crypto libraries.
class Sha256 {
public:
    Sha256() { reset(); }

    void reset();
    void update(const void* data, std::size_t len);
    void update(std::string_view s) { update(s.data(), s.size()); }

    /// Finalizes and returns the lowercase hex digest. The object must be
    /// reset before reuse.
    std::string hex_digest();

private:
    void process_block(const std::uint8_t* block);

    std::uint32_t state_[8];
    std::uint64_t bit_count_ = 0;
    std::uint8_t buffer_[64];
    std::size_t buffer_len_ = 0;
};

std::string sha256_hex(std::string_view data);

/// Digest of a file's raw bytes. Throws IoError if unreadable.
std::string sha256_file(const std::filesystem::path& path);

}  // namespace sentistack
