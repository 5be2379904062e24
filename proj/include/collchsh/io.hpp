#pragma once

// Deterministic output helpers for the CLI: fixed 7-decimal number rendering,
// FNV-1a checksums, a small insertion-ordered JSON emitter, and the run
// manifest that accompanies every payload.

#include <cstdint>
#include <cstdio>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace collchsh {

// Fixed-point rendering with 7 decimals; negative zero normalizes to zero so
// equal values always produce equal bytes.
inline std::string fixed7(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.7f", v);
  std::string s(buf);
  if (s == "-0.0000000") s.erase(s.begin());
  return s;
}

inline std::uint64_t fnv1a64(std::string_view bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

inline std::string to_hex(std::uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
  return std::string(buf);
}

// Insertion-ordered JSON emitter; enough for the CLI's flat reports.
class JsonWriter {
 public:
  JsonWriter& begin_object() {
    comma();
    out_ += '{';
    fresh_.push_back(true);
    return *this;
  }
  JsonWriter& begin_object(std::string_view key) {
    comma();
    quote(key);
    out_ += ":{";
    fresh_.push_back(true);
    return *this;
  }
  JsonWriter& end_object() {
    out_ += '}';
    fresh_.pop_back();
    return *this;
  }
  JsonWriter& begin_array(std::string_view key) {
    comma();
    quote(key);
    out_ += ":[";
    fresh_.push_back(true);
    return *this;
  }
  JsonWriter& end_array() {
    out_ += ']';
    fresh_.pop_back();
    return *this;
  }

  JsonWriter& field(std::string_view key, std::string_view value) {
    key_(key);
    quote(value);
    return *this;
  }
  JsonWriter& field(std::string_view key, const char* value) {
    return field(key, std::string_view(value));
  }
  JsonWriter& field(std::string_view key, double value) {
    key_(key);
    out_ += fixed7(value);
    return *this;
  }
  JsonWriter& field(std::string_view key, bool value) {
    key_(key);
    out_ += value ? "true" : "false";
    return *this;
  }
  JsonWriter& field(std::string_view key, long long value) {
    key_(key);
    out_ += std::to_string(value);
    return *this;
  }
  JsonWriter& field(std::string_view key, int value) {
    return field(key, static_cast<long long>(value));
  }
  JsonWriter& field(std::string_view key, std::uint64_t value) {
    key_(key);
    out_ += std::to_string(value);
    return *this;
  }

  JsonWriter& element(double value) {
    comma();
    out_ += fixed7(value);
    return *this;
  }
  JsonWriter& element(std::string_view value) {
    comma();
    quote(value);
    return *this;
  }

  const std::string& str() const { return out_; }

 private:
  void key_(std::string_view key) {
    comma();
    quote(key);
    out_ += ':';
  }
  void comma() {
    if (!fresh_.empty()) {
      if (!fresh_.back()) out_ += ',';
      fresh_.back() = false;
    }
  }
  void quote(std::string_view s) {
    out_ += '"';
    for (char c : s) {
      switch (c) {
        case '"': out_ += "\\\""; break;
        case '\\': out_ += "\\\\"; break;
        case '\n': out_ += "\\n"; break;
        case '\r': out_ += "\\r"; break;
        case '\t': out_ += "\\t"; break;
        default:
          if (static_cast<unsigned char>(c) < 0x20) {
            char buf[8];
            std::snprintf(buf, sizeof buf, "\\u%04x", c);
            out_ += buf;
          } else {
            out_ += c;
          }
      }
    }
    out_ += '"';
  }

  std::string out_;
  std::vector<bool> fresh_;
};

// Provenance record attached to every CLI payload: the stdout payload gets it
// on stderr, file payloads get a sibling .manifest.json.
struct RunManifest {
  std::string command;
  std::vector<std::pair<std::string, std::string>> parameters;
  std::uint64_t seed = 0;
  std::string version;
  double wall_time_ms = 0.0;
  std::string output_checksum;
  std::string note;

  std::string to_json() const {
    JsonWriter w;
    w.begin_object();
    w.field("command", command);
    w.begin_object("parameters");
    for (const auto& [k, v] : parameters) w.field(k, v);
    w.end_object();
    w.field("seed", seed);
    w.field("version", version);
    w.field("wall_time_ms", wall_time_ms);
    w.field("output_checksum", output_checksum);
    if (!note.empty()) w.field("note", note);
    w.end_object();
    return w.str();
  }
};

}  // namespace collchsh
