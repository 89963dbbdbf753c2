#pragma once

// Minimal JSON value for report output. Numbers are written with 17
// significant digits so that doubles round-trip.

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <ostream>
#include <sstream>
#include <string>
#include <utility>
#include <variant>
#include <vector>

namespace traptail {

class Json {
 public:
  using Array = std::vector<Json>;
  using Object = std::vector<std::pair<std::string, Json>>;

  Json() : v_(nullptr) {}
  Json(std::nullptr_t) : v_(nullptr) {}
  Json(bool b) : v_(b) {}
  Json(double d) : v_(d) {}
  Json(int i) : v_(static_cast<std::int64_t>(i)) {}
  Json(long i) : v_(static_cast<std::int64_t>(i)) {}
  Json(long long i) : v_(static_cast<std::int64_t>(i)) {}
  Json(unsigned i) : v_(static_cast<std::int64_t>(i)) {}
  Json(unsigned long i) : v_(static_cast<std::uint64_t>(i)) {}
  Json(unsigned long long i) : v_(static_cast<std::uint64_t>(i)) {}
  Json(const char* s) : v_(std::string(s)) {}
  Json(std::string s) : v_(std::move(s)) {}
  Json(Array a) : v_(std::move(a)) {}
  Json(Object o) : v_(std::move(o)) {}

  static Json object() { return Json(Object{}); }
  static Json array() { return Json(Array{}); }

  // Appends a key to an object (keys keep insertion order).
  Json& set(std::string key, Json value) {
    auto& o = std::get<Object>(v_);
    o.emplace_back(std::move(key), std::move(value));
    return *this;
  }
  Json& push(Json value) {
    std::get<Array>(v_).push_back(std::move(value));
    return *this;
  }

  void dump(std::ostream& os, int indent = 2) const { write(os, indent, 0); }
  std::string dump(int indent = 2) const {
    std::ostringstream os;
    dump(os, indent);
    return os.str();
  }

 private:
  static void write_string(std::ostream& os, const std::string& s) {
    os << '"';
    for (char c : s) {
      switch (c) {
        case '"': os << "\\\""; break;
        case '\\': os << "\\\\"; break;
        case '\n': os << "\\n"; break;
        case '\t': os << "\\t"; break;
        case '\r': os << "\\r"; break;
        default:
          if (static_cast<unsigned char>(c) < 0x20) {
            char buf[8];
            std::snprintf(buf, sizeof buf, "\\u%04x", c);
            os << buf;
          } else {
            os << c;
          }
      }
    }
    os << '"';
  }

  static void newline(std::ostream& os, int indent, int depth) {
    if (indent <= 0) return;
    os << '\n' << std::string(static_cast<std::size_t>(indent * depth), ' ');
  }

  void write(std::ostream& os, int indent, int depth) const {
    if (std::holds_alternative<std::nullptr_t>(v_)) {
      os << "null";
    } else if (auto b = std::get_if<bool>(&v_)) {
      os << (*b ? "true" : "false");
    } else if (auto i = std::get_if<std::int64_t>(&v_)) {
      os << *i;
    } else if (auto u = std::get_if<std::uint64_t>(&v_)) {
      os << *u;
    } else if (auto d = std::get_if<double>(&v_)) {
      if (!std::isfinite(*d)) {
        os << "null";
      } else {
        char buf[40];
        std::snprintf(buf, sizeof buf, "%.17g", *d);
        os << buf;
      }
    } else if (auto s = std::get_if<std::string>(&v_)) {
      write_string(os, *s);
    } else if (auto a = std::get_if<Array>(&v_)) {
      if (a->empty()) {
        os << "[]";
        return;
      }
      os << '[';
      for (std::size_t k = 0; k < a->size(); ++k) {
        if (k) os << ',';
        newline(os, indent, depth + 1);
        (*a)[k].write(os, indent, depth + 1);
      }
      newline(os, indent, depth);
      os << ']';
    } else if (auto o = std::get_if<Object>(&v_)) {
      if (o->empty()) {
        os << "{}";
        return;
      }
      os << '{';
      for (std::size_t k = 0; k < o->size(); ++k) {
        if (k) os << ',';
        newline(os, indent, depth + 1);
        write_string(os, (*o)[k].first);
        os << (indent > 0 ? ": " : ":");
        (*o)[k].second.write(os, indent, depth + 1);
      }
      newline(os, indent, depth);
      os << '}';
    }
  }

  std::variant<std::nullptr_t, bool, std::int64_t, std::uint64_t, double, std::string, Array, Object> v_;
};

}  // namespace traptail
