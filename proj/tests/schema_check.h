// Minimal structural checker for the subset of JSON Schema used by
// api/arena_api.schema.json: type (single or list), enum, properties,
// required, additionalProperties (false or a schema), items and local $ref.
#ifndef ARENA_TESTS_SCHEMA_CHECK_H_
#define ARENA_TESTS_SCHEMA_CHECK_H_

#include <fstream>
#include <string>
#include <vector>

#include <json.hpp>

namespace arena::testing {

class SchemaCheck {
 public:
  explicit SchemaCheck(const std::string& path) {
    std::ifstream in(path);
    root_ = nlohmann::json::parse(in);
  }

  // Empty when `value` matches definition `def`; otherwise one message per
  // violation with a JSON-pointer-like location.
  std::vector<std::string> errors(const std::string& def,
                                  const nlohmann::ordered_json& value) const {
    std::vector<std::string> out;
    check(root_.at("$defs").at(def), nlohmann::json::parse(value.dump()), "$", &out);
    return out;
  }

 private:
  static bool type_matches(const std::string& type, const nlohmann::json& v) {
    if (type == "object") return v.is_object();
    if (type == "array") return v.is_array();
    if (type == "string") return v.is_string();
    if (type == "boolean") return v.is_boolean();
    if (type == "null") return v.is_null();
    if (type == "integer") return v.is_number_integer();
    if (type == "number") return v.is_number();
    return false;
  }

  void check(const nlohmann::json& schema, const nlohmann::json& v, const std::string& at,
             std::vector<std::string>* out) const {
    if (schema.contains("$ref")) {
      const std::string ref = schema["$ref"];
      check(root_.at("$defs").at(ref.substr(ref.rfind('/') + 1)), v, at, out);
      return;
    }
    if (schema.contains("type")) {
      std::vector<std::string> types;
      if (schema["type"].is_array()) types = schema["type"].get<std::vector<std::string>>();
      else types.push_back(schema["type"]);
      bool ok = false;
      for (const auto& t : types) ok |= type_matches(t, v);
      if (!ok) {
        out->push_back(at + ": wrong type " + std::string(v.type_name()));
        return;
      }
    }
    if (schema.contains("enum")) {
      bool ok = false;
      for (const auto& e : schema["enum"]) ok |= e == v;
      if (!ok) out->push_back(at + ": " + v.dump() + " not in enum");
    }
    if (v.is_object()) {
      for (const auto& r : schema.value("required", nlohmann::json::array()))
        if (!v.contains(r.get<std::string>()))
          out->push_back(at + ": missing " + r.get<std::string>());
      const auto props = schema.value("properties", nlohmann::json::object());
      for (const auto& [k, child] : v.items()) {
        if (props.contains(k)) {
          check(props[k], child, at + "." + k, out);
        } else if (schema.contains("additionalProperties")) {
          const auto& extra = schema["additionalProperties"];
          if (extra.is_boolean()) {
            if (!extra.get<bool>()) out->push_back(at + ": unexpected key " + k);
          } else {
            check(extra, child, at + "." + k, out);
          }
        }
      }
    }
    if (v.is_array() && schema.contains("items")) {
      for (std::size_t i = 0; i < v.size(); ++i)
        check(schema["items"], v[i], at + "[" + std::to_string(i) + "]", out);
    }
  }

  nlohmann::json root_;
};

}  // namespace arena::testing

#endif  // ARENA_TESTS_SCHEMA_CHECK_H_
