#pragma once

// Minimal structural validator for the subset of JSON Schema the repo's
// schema files use: type (possibly a union array), properties, required,
// items, enum, plus "$ref": "common#/definitions/<name>" references into
// common.v1.schema.json.

#include <fstream>
#include <stdexcept>
#include <string>

#include <json.hpp>

namespace schema_check {

using nlohmann::json;

inline json load(const std::string& dir, const std::string& name) {
    std::ifstream f(dir + "/" + name);
    if (!f) throw std::runtime_error("missing schema file " + name);
    return json::parse(f);
}

inline bool type_matches(const std::string& type, const json& value) {
    if (type == "object") return value.is_object();
    if (type == "array") return value.is_array();
    if (type == "string") return value.is_string();
    if (type == "boolean") return value.is_boolean();
    if (type == "null") return value.is_null();
    if (type == "integer") return value.is_number_integer() || value.is_number_unsigned();
    if (type == "number") return value.is_number();
    return false;
}

inline void validate(const json& schema, const json& value, const json& common,
                     const std::string& where) {
    if (schema.contains("$ref")) {
        std::string ref = schema["$ref"];
        auto pos = ref.find("#/definitions/");
        if (pos == std::string::npos)
            throw std::runtime_error("unsupported $ref " + ref);
        std::string name = ref.substr(pos + 14);
        validate(common["definitions"].at(name), value, common, where);
        return;
    }
    if (schema.contains("type")) {
        const json& t = schema["type"];
        bool ok = false;
        if (t.is_string()) {
            ok = type_matches(t.get<std::string>(), value);
        } else {
            for (const auto& alt : t)
                ok = ok || type_matches(alt.get<std::string>(), value);
        }
        if (!ok)
            throw std::runtime_error(where + ": type mismatch, got " + value.dump());
    }
    if (schema.contains("enum")) {
        bool ok = false;
        for (const auto& e : schema["enum"]) ok = ok || (e == value);
        if (!ok) throw std::runtime_error(where + ": value not in enum");
    }
    if (value.is_object()) {
        if (schema.contains("required"))
            for (const auto& key : schema["required"])
                if (!value.contains(key.get<std::string>()))
                    throw std::runtime_error(where + ": missing required key " +
                                             key.get<std::string>());
        if (schema.contains("properties"))
            for (const auto& [key, sub] : schema["properties"].items())
                if (value.contains(key))
                    validate(sub, value.at(key), common, where + "." + key);
    }
    if (value.is_array() && schema.contains("items"))
        for (std::size_t i = 0; i < value.size(); ++i)
            validate(schema["items"], value[i], common, where + "[" + std::to_string(i) + "]");
}

inline void validate_against(const std::string& schema_dir,
                             const std::string& schema_file, const json& value) {
    json schema = load(schema_dir, schema_file);
    json common = load(schema_dir, "common.v1.schema.json");
    validate(schema, value, common, "$");
}

}  // namespace schema_check
