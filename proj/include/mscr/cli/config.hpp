#pragma once
// Layered configuration for the batch tools. Every parameter has one dotted
// key ("balloon.r_in_mm"); the same key is the JSON path in a config file and
// the long flag name (--balloon.r_in_mm). Resolution order, lowest first:
// built-in default, config file, environment variable (if the parameter has
// one), command-line flag.

#include <mscr/json_check.hpp>

#include <algorithm>
#include <charconv>
#include <cstdlib>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

namespace mscr::cli {

enum class ParamType { number, integer, string, boolean, integer_list };

inline std::string_view type_name(ParamType t) {
  switch (t) {
    case ParamType::number: return "number";
    case ParamType::integer: return "integer";
    case ParamType::string: return "string";
    case ParamType::boolean: return "boolean";
    case ParamType::integer_list: return "integer list";
  }
  return "?";
}

struct Param {
  std::string key;
  ParamType type = ParamType::number;
  nlohmann::json fallback;
  std::string help;
  std::optional<double> min;
  std::optional<double> max;
  bool exclusive_min = false;
  std::vector<std::string> choices;
  std::string env;  // environment variable that overrides the file value

  std::string section() const {
    const auto dot = key.find('.');
    return dot == std::string::npos ? std::string{} : key.substr(0, dot);
  }
  nlohmann::json::json_pointer pointer() const {
    std::string p = "/" + key;
    for (auto& c : p)
      if (c == '.') c = '/';
    return nlohmann::json::json_pointer(p);
  }
};

class ConfigSchema {
 public:
  ConfigSchema& add(Param p) {
    require(!index_.count(p.key), "duplicate config key '" + p.key + "'");
    index_[p.key] = params_.size();
    params_.push_back(std::move(p));
    return *this;
  }

  const std::vector<Param>& params() const { return params_; }
  Param& last() { return params_.back(); }

  const Param* find(const std::string& key) const {
    const auto it = index_.find(key);
    return it == index_.end() ? nullptr : &params_[it->second];
  }

  nlohmann::json defaults() const {
    nlohmann::json out = nlohmann::json::object();
    for (const auto& p : params_) out[p.pointer()] = p.fallback;
    return out;
  }

  /// Checks a value against its parameter and returns it in canonical form.
  /// `where` names the source for error messages (JSON path or flag).
  nlohmann::json check(const Param& p, const nlohmann::json& v, const std::string& where) const {
    const auto bounds = [&](double x, const std::string& at) {
      if (!std::isfinite(x)) throw SchemaError(at, "must be finite");
      if (p.min && (p.exclusive_min ? !(x > *p.min) : !(x >= *p.min)))
        throw SchemaError(at, std::string("must be ") + (p.exclusive_min ? "> " : ">= ") + fmt(*p.min));
      if (p.max && !(x <= *p.max)) throw SchemaError(at, "must be <= " + fmt(*p.max));
    };
    switch (p.type) {
      case ParamType::number:
        if (!v.is_number()) throw SchemaError(where, "expected a number");
        bounds(v.get<double>(), where);
        return v.get<double>();
      case ParamType::integer:
        if (!v.is_number_integer()) throw SchemaError(where, "expected an integer");
        bounds(static_cast<double>(v.get<long>()), where);
        return v.get<long>();
      case ParamType::boolean:
        if (!v.is_boolean()) throw SchemaError(where, "expected a boolean");
        return v;
      case ParamType::string: {
        if (!v.is_string()) throw SchemaError(where, "expected a string");
        const auto s = v.get<std::string>();
        if (!p.choices.empty() && std::find(p.choices.begin(), p.choices.end(), s) == p.choices.end())
          throw SchemaError(where, "must be one of " + join(p.choices));
        return s;
      }
      case ParamType::integer_list: {
        if (!v.is_array()) throw SchemaError(where, "expected an array of integers");
        if (v.empty()) throw SchemaError(where, "must not be empty");
        nlohmann::json out = nlohmann::json::array();
        for (std::size_t i = 0; i < v.size(); ++i) {
          const std::string at = where + "[" + std::to_string(i) + "]";
          if (!v[i].is_number_integer()) throw SchemaError(at, "expected an integer");
          bounds(static_cast<double>(v[i].get<long>()), at);
          out.push_back(v[i].get<long>());
        }
        return out;
      }
    }
    return v;
  }

  /// Merges a config document into `cfg`. Unknown keys are rejected.
  void overlay(nlohmann::json& cfg, const nlohmann::json& doc) const {
    if (!doc.is_object()) throw SchemaError("$", "config must be a JSON object");
    overlay_at(cfg, doc, "", "$");
  }

  /// Parses a flag's text according to the parameter type.
  nlohmann::json parse_text(const Param& p, const std::vector<std::string>& texts) const {
    const std::string where = "--" + p.key;
    const auto as_long = [&](const std::string& s, const std::string& at) {
      long x = 0;
      const auto r = std::from_chars(s.data(), s.data() + s.size(), x);
      if (r.ec != std::errc() || r.ptr != s.data() + s.size()) throw SchemaError(at, "expected an integer, got '" + s + "'");
      return x;
    };
    if (p.type == ParamType::integer_list) {
      nlohmann::json arr = nlohmann::json::array();
      for (std::size_t i = 0; i < texts.size(); ++i) arr.push_back(as_long(texts[i], where));
      return check(p, arr, where);
    }
    require(texts.size() == 1, "flag " + where + " takes one value");
    const std::string& s = texts.front();
    switch (p.type) {
      case ParamType::number: {
        double x = 0;
        const auto r = std::from_chars(s.data(), s.data() + s.size(), x);
        if (r.ec != std::errc() || r.ptr != s.data() + s.size())
          throw SchemaError(where, "expected a number, got '" + s + "'");
        return check(p, x, where);
      }
      case ParamType::integer: return check(p, as_long(s, where), where);
      case ParamType::boolean:
        if (s == "true" || s == "1") return true;
        if (s == "false" || s == "0") return false;
        throw SchemaError(where, "expected true or false, got '" + s + "'");
      default: return check(p, s, where);
    }
  }

  /// Applies environment overrides for parameters that declare one.
  void apply_env(nlohmann::json& cfg, const std::set<std::string>& keys) const {
    for (const auto& p : params_) {
      if (p.env.empty() || !keys.count(p.key)) continue;
      if (const char* v = std::getenv(p.env.c_str()); v && *v) cfg[p.pointer()] = parse_env(p, v);
    }
  }

  /// JSON Schema document describing the accepted config file.
  nlohmann::json json_schema() const {
    nlohmann::json root{{"$schema", "https://json-schema.org/draft/2020-12/schema"},
                        {"title", "Batch tool configuration"},
                        {"type", "object"},
                        {"additionalProperties", false},
                        {"properties", nlohmann::json::object()}};
    for (const auto& p : params_) {
      nlohmann::json leaf{{"description", p.help}, {"default", p.fallback}};
      switch (p.type) {
        case ParamType::number: leaf["type"] = "number"; break;
        case ParamType::integer: leaf["type"] = "integer"; break;
        case ParamType::boolean: leaf["type"] = "boolean"; break;
        case ParamType::string: leaf["type"] = "string"; break;
        case ParamType::integer_list:
          leaf["type"] = "array";
          leaf["items"] = {{"type", "integer"}};
          leaf["minItems"] = 1;
          break;
      }
      if (!p.choices.empty()) leaf["enum"] = p.choices;
      auto& bound = p.type == ParamType::integer_list ? leaf["items"] : leaf;
      if (p.min) bound[p.exclusive_min ? "exclusiveMinimum" : "minimum"] = *p.min;
      if (p.max) bound["maximum"] = *p.max;
      const auto section = p.section();
      if (section.empty()) {
        root["properties"][p.key] = leaf;
      } else {
        auto& sec = root["properties"][section];
        if (sec.is_null()) sec = {{"type", "object"}, {"additionalProperties", false}, {"properties", nlohmann::json::object()}};
        sec["properties"][p.key.substr(section.size() + 1)] = leaf;
      }
    }
    return root;
  }

  static std::string fmt(double x) {
    std::ostringstream o;
    o << x;
    return o.str();
  }

 private:
  static std::string join(const std::vector<std::string>& v) {
    std::string out;
    for (const auto& s : v) out += (out.empty() ? "" : ", ") + s;
    return out;
  }

  bool is_section(const std::string& prefix) const {
    for (const auto& p : params_)
      if (p.key.rfind(prefix + ".", 0) == 0) return true;
    return false;
  }

  void overlay_at(nlohmann::json& cfg, const nlohmann::json& doc, const std::string& prefix,
                  const std::string& path) const {
    for (const auto& [k, v] : doc.items()) {
      const std::string key = prefix.empty() ? k : prefix + "." + k;
      const std::string at = path + "." + k;
      if (const Param* p = find(key)) {
        cfg[p->pointer()] = check(*p, v, at);
      } else if (is_section(key)) {
        if (!v.is_object()) throw SchemaError(at, "expected an object");
        overlay_at(cfg, v, key, at);
      } else {
        throw SchemaError(at, "unknown key");
      }
    }
  }

  nlohmann::json parse_env(const Param& p, const std::string& text) const {
    try {
      std::vector<std::string> parts;
      if (p.type == ParamType::integer_list) {
        std::string item;
        std::istringstream in(text);
        while (std::getline(in, item, ',')) parts.push_back(item);
      } else {
        parts.push_back(text);
      }
      return parse_text(p, parts);
    } catch (const SchemaError& e) {
      throw SchemaError("$" + p.env, e.message());
    }
  }

  std::vector<Param> params_;
  std::map<std::string, std::size_t> index_;
};

/// Extracts the part of a resolved config that belongs to the given keys.
inline nlohmann::json restrict_to(const ConfigSchema& schema, const nlohmann::json& cfg,
                                  const std::vector<std::string>& keys) {
  nlohmann::json out = nlohmann::json::object();
  for (const auto& k : keys) {
    const Param* p = schema.find(k);
    require(p != nullptr, "unknown config key '" + k + "'");
    out[p->pointer()] = cfg.at(p->pointer());
  }
  return out;
}

}  // namespace mscr::cli
