#pragma once

#include <cstdint>
#include <cstddef>
#include <string>

namespace physvid {

// FNV-1a over raw bytes; used for cheap file checksums.
uint64_t fnv1a64(const void* data, size_t nbytes, uint64_t seed = 0xcbf29ce484222325ULL);

// Hex-encoded SHA-256; used for frozen-parameter and manifest hashes.
std::string sha256_hex(const void* data, size_t nbytes);

class Sha256 {
public:
    Sha256();
    ~Sha256();
    Sha256(const Sha256&) = delete;
    Sha256& operator=(const Sha256&) = delete;
    void update(const void* data, size_t nbytes);
    std::string hex();  // finalizes; call once

private:
    void* ctx_;
};

}  // namespace physvid
