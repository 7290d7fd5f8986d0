#pragma once

// Minimal CSV writing: comma-separated, header first, doubles printed with 17
// significant digits so every value round-trips exactly.

#include <charconv>
#include <cstdint>
#include <ostream>
#include <string>
#include <string_view>
#include <system_error>
#include <type_traits>
#include <vector>

namespace orf {

inline std::string format_double(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v, std::chars_format::general, 17);
  return std::string(buf, res.ptr);
}

/// RFC 4180 quoting, applied only when the field needs it.
inline std::string csv_escape(std::string_view s) {
  if (s.find_first_of(",\"\r\n") == std::string_view::npos) return std::string(s);
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

class CsvWriter {
 public:
  explicit CsvWriter(std::ostream& os) : os_(os) {}

  CsvWriter& field(std::string_view s) {
    sep();
    os_ << csv_escape(s);
    return *this;
  }
  CsvWriter& field(const char* s) { return field(std::string_view(s)); }
  CsvWriter& field(const std::string& s) { return field(std::string_view(s)); }
  CsvWriter& field(double v) {
    sep();
    os_ << format_double(v);
    return *this;
  }
  template <typename I>
    requires std::is_integral_v<I>
  CsvWriter& field(I v) {
    sep();
    os_ << v;
    return *this;
  }

  void end_row() {
    os_ << '\n';
    first_ = true;
  }

  void header(const std::vector<std::string>& names) {
    for (const auto& n : names) field(n);
    end_row();
  }

 private:
  void sep() {
    if (!first_) os_ << ',';
    first_ = false;
  }

  std::ostream& os_;
  bool first_ = true;
};

}  // namespace orf
