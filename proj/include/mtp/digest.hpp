// mtp :: content digests (SHA-256, hex-encoded)
#ifndef MTP_DIGEST_HPP
#define MTP_DIGEST_HPP

#include <openssl/evp.h>

#include <stdexcept>
#include <string>

namespace mtp {

inline std::string sha256_hex(const std::string& data) {
  unsigned char out[EVP_MAX_MD_SIZE];
  unsigned int out_len = 0;
  EVP_MD_CTX* ctx = EVP_MD_CTX_new();
  if (!ctx || EVP_DigestInit_ex(ctx, EVP_sha256(), nullptr) != 1 ||
      EVP_DigestUpdate(ctx, data.data(), data.size()) != 1 ||
      EVP_DigestFinal_ex(ctx, out, &out_len) != 1) {
    EVP_MD_CTX_free(ctx);
    throw std::runtime_error("sha256 digest failed");
  }
  EVP_MD_CTX_free(ctx);
  static const char* hexd = "0123456789abcdef";
  std::string hex;
  hex.reserve(out_len * 2);
  for (unsigned int i = 0; i < out_len; ++i) {
    hex.push_back(hexd[out[i] >> 4]);
    hex.push_back(hexd[out[i] & 0xf]);
  }
  return hex;
}

}  // namespace mtp

#endif
