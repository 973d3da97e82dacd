#include "aquaaug/checksum.hpp"

#include <openssl/evp.h>

#include <array>
#include <memory>

#include "aquaaug/dataio.hpp"
#include "aquaaug/errors.hpp"

namespace aquaaug {

namespace {

class Sha256 {
 public:
  Sha256() : ctx_(EVP_MD_CTX_new(), &EVP_MD_CTX_free) {
    if (!ctx_ || EVP_DigestInit_ex(ctx_.get(), EVP_sha256(), nullptr) != 1)
      throw Error("SHA-256 initialisation failed");
  }

  void update(const void* data, std::size_t n) {
    if (EVP_DigestUpdate(ctx_.get(), data, n) != 1) throw Error("SHA-256 update failed");
  }

  std::string hex() {
    std::array<unsigned char, EVP_MAX_MD_SIZE> md{};
    unsigned int len = 0;
    if (EVP_DigestFinal_ex(ctx_.get(), md.data(), &len) != 1) throw Error("SHA-256 final failed");
    static constexpr char digits[] = "0123456789abcdef";
    std::string out;
    out.reserve(2 * len);
    for (unsigned int i = 0; i < len; ++i) {
      out.push_back(digits[md[i] >> 4]);
      out.push_back(digits[md[i] & 0xF]);
    }
    return out;
  }

 private:
  std::unique_ptr<EVP_MD_CTX, decltype(&EVP_MD_CTX_free)> ctx_;
};

void put_u32(Sha256& h, std::uint32_t v) {
  const unsigned char b[4] = {static_cast<unsigned char>(v >> 24), static_cast<unsigned char>(v >> 16),
                              static_cast<unsigned char>(v >> 8), static_cast<unsigned char>(v)};
  h.update(b, 4);
}

}  // namespace

std::string sha256_hex(std::span<const std::uint8_t> bytes) {
  Sha256 h;
  h.update(bytes.data(), bytes.size());
  return h.hex();
}

std::string sha256_hex(std::string_view bytes) {
  Sha256 h;
  h.update(bytes.data(), bytes.size());
  return h.hex();
}

std::string sample_checksum(const ImageBuffer& img, const AnnotationSet& ann) {
  const ImageBuffer q = to_u8(img);
  Sha256 h;
  h.update("aquaaug-sample-v1", 17);
  put_u32(h, static_cast<std::uint32_t>(q.width()));
  put_u32(h, static_cast<std::uint32_t>(q.height()));
  put_u32(h, static_cast<std::uint32_t>(q.channels()));
  h.update(q.u8().data(), q.u8().size());
  const std::string labels = format_labels(ann);
  put_u32(h, static_cast<std::uint32_t>(labels.size()));
  h.update(labels.data(), labels.size());
  return h.hex();
}

}  // namespace aquaaug
