#include "physvid/hash.hpp"

#include <openssl/evp.h>

#include <stdexcept>

namespace physvid {

uint64_t fnv1a64(const void* data, size_t nbytes, uint64_t seed) {
    const auto* p = static_cast<const unsigned char*>(data);
    uint64_t h = seed;
    for (size_t i = 0; i < nbytes; ++i) {
        h ^= p[i];
        h *= 0x100000001b3ULL;
    }
    return h;
}

Sha256::Sha256() {
    auto* ctx = EVP_MD_CTX_new();
    if (!ctx || EVP_DigestInit_ex(ctx, EVP_sha256(), nullptr) != 1)
        throw std::runtime_error("sha256 init failed");
    ctx_ = ctx;
}

Sha256::~Sha256() {
    if (ctx_) EVP_MD_CTX_free(static_cast<EVP_MD_CTX*>(ctx_));
}

void Sha256::update(const void* data, size_t nbytes) {
    if (EVP_DigestUpdate(static_cast<EVP_MD_CTX*>(ctx_), data, nbytes) != 1)
        throw std::runtime_error("sha256 update failed");
}

std::string Sha256::hex() {
    unsigned char digest[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    if (EVP_DigestFinal_ex(static_cast<EVP_MD_CTX*>(ctx_), digest, &len) != 1)
        throw std::runtime_error("sha256 final failed");
    static const char* k = "0123456789abcdef";
    std::string out(size_t(len) * 2, '0');
    for (unsigned int i = 0; i < len; ++i) {
        out[2 * i] = k[digest[i] >> 4];
        out[2 * i + 1] = k[digest[i] & 0xf];
    }
    return out;
}

std::string sha256_hex(const void* data, size_t nbytes) {
    Sha256 h;
    h.update(data, nbytes);
    return h.hex();
}

}  // namespace physvid
