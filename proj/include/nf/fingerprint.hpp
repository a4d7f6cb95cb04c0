#pragma once

#include <cstdint>
#include <cstdio>
#include <string>
#include <vector>

namespace nf {

// FNV-1a 64-bit running hash used for config and model fingerprints.
class Fingerprint {
 public:
  void add_bytes(const void* data, std::size_t len) {
    const auto* p = static_cast<const unsigned char*>(data);
    for (std::size_t i = 0; i < len; ++i) {
      h_ ^= p[i];
      h_ *= 0x100000001B3ULL;
    }
  }
  void add(const std::string& s) { add_bytes(s.data(), s.size()); }
  void add(double v) { add_bytes(&v, sizeof v); }
  void add(std::uint64_t v) { add_bytes(&v, sizeof v); }
  void add(int v) { add(static_cast<std::uint64_t>(v)); }
  void add(const std::vector<double>& v) { add_bytes(v.data(), v.size() * sizeof(double)); }

  std::uint64_t value() const { return h_; }
  std::string hex() const {
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h_));
    return buf;
  }

 private:
  std::uint64_t h_ = 0xCBF29CE484222325ULL;
};

}  // namespace nf
