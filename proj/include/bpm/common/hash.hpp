#pragma once

#include <span>
#include <string>
#include <string_view>

namespace bpm {

// Lower-case hex SHA-256 digest.
std::string sha256_hex(std::string_view bytes);
std::string sha256_hex(std::span<const unsigned char> bytes);

// Incremental SHA-256 for content that is produced piecewise.
class Sha256 {
 public:
  Sha256();
  ~Sha256();
  Sha256(const Sha256&) = delete;
  Sha256& operator=(const Sha256&) = delete;

  void update(const void* data, std::size_t size);
  template <typename T>
  void update_value(const T& v) {
    update(&v, sizeof(T));
  }
  std::string hex_digest();

 private:
  void* ctx_;
};

}  // namespace bpm
