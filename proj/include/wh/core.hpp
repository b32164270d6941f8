#pragma once

#include <complex>
#include <numbers>
#include <stdexcept>
#include <string>

namespace wh {

using cplx = std::complex<double>;

inline constexpr double pi = std::numbers::pi;
inline constexpr cplx I{0.0, 1.0};

/// Error carrying a short machine-readable code next to the message.
class Error : public std::runtime_error {
 public:
  Error(std::string code, const std::string& what)
      : std::runtime_error(code + ": " + what), code_(std::move(code)) {}
  const std::string& code() const noexcept { return code_; }

 private:
  std::string code_;
};

inline void require(bool ok, const char* code, const std::string& what) {
  if (!ok) throw Error(code, what);
}

inline bool is_power_of_two(std::size_t n) { return n != 0 && (n & (n - 1)) == 0; }

}  // namespace wh
