#ifndef CLUSTSIG_TESTS_SCHEMA_CHECK_HPP
#define CLUSTSIG_TESTS_SCHEMA_CHECK_HPP

// Just enough of JSON Schema (type / required / properties / items / enum)
// to validate the CLI's outputs against the schema files shipped in
// schemas/. Returns an empty string on success, else the first violation.

#include <json.hpp>
#include <string>

namespace schema_check {

using nlohmann::json;

inline bool type_matches(const json& value, const std::string& type) {
  if (type == "object") return value.is_object();
  if (type == "array") return value.is_array();
  if (type == "string") return value.is_string();
  if (type == "number") return value.is_number();
  if (type == "integer") return value.is_number_integer() || value.is_number_unsigned();
  if (type == "boolean") return value.is_boolean();
  if (type == "null") return value.is_null();
  return false;
}

inline std::string validate(const json& value, const json& schema,
                            const std::string& path = "$") {
  if (schema.contains("type")) {
    const json& t = schema["type"];
    bool ok = false;
    if (t.is_string()) ok = type_matches(value, t.get<std::string>());
    else {
      for (const auto& alt : t) ok |= type_matches(value, alt.get<std::string>());
    }
    if (!ok) return path + ": type mismatch";
  }
  if (schema.contains("enum")) {
    bool ok = false;
    for (const auto& cand : schema["enum"]) ok |= (cand == value);
    if (!ok) return path + ": not in enum";
  }
  if (schema.contains("minimum") && value.is_number() &&
      value.get<double>() < schema["minimum"].get<double>()) {
    return path + ": below minimum";
  }
  if (schema.contains("maximum") && value.is_number() &&
      value.get<double>() > schema["maximum"].get<double>()) {
    return path + ": above maximum";
  }
  if (value.is_object()) {
    if (schema.contains("required")) {
      for (const auto& key : schema["required"]) {
        if (!value.contains(key.get<std::string>())) {
          return path + ": missing required key '" + key.get<std::string>() + "'";
        }
      }
    }
    if (schema.contains("properties")) {
      for (auto it = schema["properties"].begin(); it != schema["properties"].end();
           ++it) {
        if (value.contains(it.key())) {
          auto err = validate(value[it.key()], it.value(), path + "." + it.key());
          if (!err.empty()) return err;
        }
      }
    }
  }
  if (value.is_array() && schema.contains("items")) {
    for (size_t i = 0; i < value.size(); ++i) {
      auto err = validate(value[i], schema["items"],
                          path + "[" + std::to_string(i) + "]");
      if (!err.empty()) return err;
    }
  }
  return "";
}

}  // namespace schema_check

#endif
