#pragma once
// Small helpers for hand-validated JSON documents. Every error names the
// JSON path of the offending value.

#include <mscr/common.hpp>

#include <json.hpp>

#include <initializer_list>
#include <optional>
#include <string>
#include <string_view>

namespace mscr {

class SchemaError : public DomainError {
 public:
  SchemaError(std::string path, const std::string& what)
      : DomainError(path + ": " + what), path_(std::move(path)), message_(what) {}
  const std::string& path() const { return path_; }
  const std::string& message() const { return message_; }

 private:
  std::string path_;
  std::string message_;
};

/// Read-only cursor into a JSON value that remembers where it is.
class JsonView {
 public:
  JsonView(const nlohmann::json& j, std::string path = "$") : j_(&j), path_(std::move(path)) {}

  const nlohmann::json& raw() const { return *j_; }
  const std::string& path() const { return path_; }
  bool has(std::string_view key) const { return j_->is_object() && j_->contains(key); }

  JsonView at(std::string_view key) const {
    if (!has(key)) throw SchemaError(child_path(key), "required field missing");
    return {(*j_)[std::string(key)], child_path(key)};
  }
  JsonView at(std::size_t i) const { return {(*j_)[i], path_ + "[" + std::to_string(i) + "]"}; }
  std::size_t size() const { return j_->size(); }

  const JsonView& object(std::initializer_list<std::string_view> allowed) const {
    if (!j_->is_object()) throw SchemaError(path_, "expected an object");
    for (const auto& [k, v] : j_->items()) {
      bool ok = false;
      for (auto a : allowed) ok = ok || a == k;
      if (!ok) throw SchemaError(child_path(k), "unknown key");
    }
    return *this;
  }

  const JsonView& array() const {
    if (!j_->is_array()) throw SchemaError(path_, "expected an array");
    return *this;
  }

  double number() const {
    if (!j_->is_number()) throw SchemaError(path_, "expected a number");
    return j_->get<double>();
  }
  long integer() const {
    if (!j_->is_number_integer()) throw SchemaError(path_, "expected an integer");
    return j_->get<long>();
  }
  bool boolean() const {
    if (!j_->is_boolean()) throw SchemaError(path_, "expected a boolean");
    return j_->get<bool>();
  }
  std::string string() const {
    if (!j_->is_string()) throw SchemaError(path_, "expected a string");
    return j_->get<std::string>();
  }

  double number(std::string_view key, double fallback) const { return has(key) ? at(key).number() : fallback; }
  long integer(std::string_view key, long fallback) const { return has(key) ? at(key).integer() : fallback; }
  bool boolean(std::string_view key, bool fallback) const { return has(key) ? at(key).boolean() : fallback; }
  std::string string(std::string_view key, std::string fallback) const {
    return has(key) ? at(key).string() : fallback;
  }

  /// Throws a SchemaError at this path when cond is false.
  void check(bool cond, const std::string& what) const {
    if (!cond) throw SchemaError(path_, what);
  }

  [[noreturn]] void fail(const std::string& what) const { throw SchemaError(path_, what); }

 private:
  std::string child_path(std::string_view key) const { return path_ + "." + std::string(key); }

  const nlohmann::json* j_;
  std::string path_;
};

/// Parses text, turning syntax errors into a SchemaError at the root.
inline nlohmann::json parse_json(std::string_view text) {
  try {
    return nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw SchemaError("$", std::string("malformed JSON: ") + e.what());
  }
}

}  // namespace mscr
