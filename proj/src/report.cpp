#include "kramers/report.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>

namespace kramers {

std::string format_double(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[40];
    for (int prec = 15; prec <= 17; ++prec) {
        std::snprintf(buf, sizeof buf, "%.*g", prec, v);
        if (std::strtod(buf, nullptr) == v) break;
    }
    return buf;
}

void CsvTable::add_row(const std::vector<double>& vals) {
    std::vector<std::string> cells;
    cells.reserve(vals.size());
    for (double v : vals) cells.push_back(format_double(v));
    rows.push_back(std::move(cells));
}

void CsvTable::add_row(std::vector<std::string> vals) {
    rows.push_back(std::move(vals));
}

namespace {

void write_joined(std::ofstream& out, const std::vector<std::string>& cells) {
    for (size_t i = 0; i < cells.size(); ++i) {
        if (i) out << ',';
        out << cells[i];
    }
    out << '\n';
}

}  // namespace

void write_csv(const std::string& path, const CsvTable& table) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw UsageError("cannot write " + path);
    write_joined(out, table.header);
    for (const auto& row : table.rows) write_joined(out, row);
}

Json report_envelope(const std::string& command, uint64_t seed) {
    Json j;
    j["version"] = kVersion;
    j["schema"] = kSchemaVersion;
    j["command"] = command;
    j["seed"] = seed;
    return j;
}

void write_report(const std::string& path, const Json& report) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw UsageError("cannot write " + path);
    out << report.dump(2) << '\n';
}

Json load_json_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw UsageError("cannot read " + path);
    Json j;
    try {
        in >> j;
    } catch (const nlohmann::json::parse_error& e) {
        throw UsageError(path + ": " + e.what());
    }
    return j;
}

namespace {

bool type_matches(const Json& doc, const std::string& t) {
    if (t == "object") return doc.is_object();
    if (t == "array") return doc.is_array();
    if (t == "string") return doc.is_string();
    if (t == "integer") return doc.is_number_integer();
    if (t == "number") return doc.is_number();
    if (t == "boolean") return doc.is_boolean();
    if (t == "null") return doc.is_null();
    return false;
}

void walk(const Json& doc, const Json& schema, const std::string& path,
          std::vector<std::string>& out) {
    if (schema.contains("type")) {
        const Json& t = schema["type"];
        bool ok = false;
        if (t.is_string()) {
            ok = type_matches(doc, t.get<std::string>());
        } else if (t.is_array()) {
            for (const Json& one : t)
                ok = ok || type_matches(doc, one.get<std::string>());
        }
        if (!ok) {
            out.push_back(path + ": type mismatch, expected " + t.dump());
            return;
        }
    }
    if (schema.contains("enum")) {
        bool ok = false;
        for (const Json& v : schema["enum"]) ok = ok || v == doc;
        if (!ok) out.push_back(path + ": value not in enum");
    }
    if (doc.is_object()) {
        if (schema.contains("required"))
            for (const Json& key : schema["required"])
                if (!doc.contains(key.get<std::string>()))
                    out.push_back(path + ": missing required key " +
                                  key.get<std::string>());
        const Json* props =
            schema.contains("properties") ? &schema["properties"] : nullptr;
        if (schema.contains("additionalProperties") &&
            schema["additionalProperties"].is_boolean() &&
            !schema["additionalProperties"].get<bool>()) {
            for (auto it = doc.begin(); it != doc.end(); ++it)
                if (!props || !props->contains(it.key()))
                    out.push_back(path + ": unexpected key " + it.key());
        }
        if (props)
            for (auto it = props->begin(); it != props->end(); ++it)
                if (doc.contains(it.key()))
                    walk(doc[it.key()], it.value(), path + "/" + it.key(),
                         out);
    }
    if (doc.is_array() && schema.contains("items")) {
        for (size_t i = 0; i < doc.size(); ++i)
            walk(doc[i], schema["items"], path + "/" + std::to_string(i),
                 out);
    }
}

}  // namespace

std::vector<std::string> validate_against_schema(const Json& doc,
                                                 const Json& schema) {
    std::vector<std::string> violations;
    walk(doc, schema, "", violations);
    return violations;
}

}  // namespace kramers
