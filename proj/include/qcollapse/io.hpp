#pragma once

#include <cstdint>
#include <cstdio>
#include <ostream>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

namespace qcollapse {

/// All emitted numbers carry 12 significant digits, locale-independent.
inline std::string format_number(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.12g", v);
    return std::string(buf);
}

/// Minimal JSON document builder. Keys keep insertion order and doubles go
/// through format_number, so equal inputs serialize byte-identically.
class JsonValue {
public:
    static JsonValue object() { return JsonValue(Kind::Object); }
    static JsonValue array() { return JsonValue(Kind::Array); }
    static JsonValue str(std::string s) {
        JsonValue v(Kind::String);
        v.str_ = std::move(s);
        return v;
    }
    static JsonValue num(double d) {
        JsonValue v(Kind::Number);
        v.num_ = format_number(d);
        return v;
    }
    static JsonValue integer(long long i) {
        JsonValue v(Kind::Number);
        v.num_ = std::to_string(i);
        return v;
    }
    static JsonValue uinteger(unsigned long long i) {
        JsonValue v(Kind::Number);
        v.num_ = std::to_string(i);
        return v;
    }
    static JsonValue boolean(bool b) {
        JsonValue v(Kind::Bool);
        v.bool_ = b;
        return v;
    }

    JsonValue& set(const std::string& key, JsonValue v) {
        members_.emplace_back(key, std::move(v));
        return *this;
    }
    JsonValue& push(JsonValue v) {
        items_.push_back(std::move(v));
        return *this;
    }

    void dump(std::ostream& out, int indent = 0) const {
        switch (kind_) {
            case Kind::Object: {
                if (members_.empty()) {
                    out << "{}";
                    return;
                }
                out << "{\n";
                for (std::size_t i = 0; i < members_.size(); ++i) {
                    pad(out, indent + 2);
                    out << '"' << escaped(members_[i].first) << "\": ";
                    members_[i].second.dump(out, indent + 2);
                    if (i + 1 < members_.size()) out << ',';
                    out << '\n';
                }
                pad(out, indent);
                out << '}';
                return;
            }
            case Kind::Array: {
                if (items_.empty()) {
                    out << "[]";
                    return;
                }
                out << '[';
                for (std::size_t i = 0; i < items_.size(); ++i) {
                    if (i) out << ", ";
                    items_[i].dump(out, indent);
                }
                out << ']';
                return;
            }
            case Kind::String:
                out << '"' << escaped(str_) << '"';
                return;
            case Kind::Number:
                out << num_;
                return;
            case Kind::Bool:
                out << (bool_ ? "true" : "false");
                return;
        }
    }

    std::string dump_string() const {
        std::ostringstream os;
        dump(os);
        os << '\n';
        return os.str();
    }

private:
    enum class Kind { Object, Array, String, Number, Bool };

    explicit JsonValue(Kind k) : kind_(k) {}

    static void pad(std::ostream& out, int n) {
        for (int i = 0; i < n; ++i) out << ' ';
    }

    static std::string escaped(const std::string& s) {
        std::string out;
        out.reserve(s.size());
        for (char c : s) {
            switch (c) {
                case '"': out += "\\\""; break;
                case '\\': out += "\\\\"; break;
                case '\n': out += "\\n"; break;
                case '\t': out += "\\t"; break;
                case '\r': out += "\\r"; break;
                default:
                    if (static_cast<unsigned char>(c) < 0x20) {
                        char buf[8];
                        std::snprintf(buf, sizeof(buf), "\\u%04x", c);
                        out += buf;
                    } else {
                        out += c;
                    }
            }
        }
        return out;
    }

    Kind kind_;
    std::vector<std::pair<std::string, JsonValue>> members_;
    std::vector<JsonValue> items_;
    std::string str_;
    std::string num_;
    bool bool_ = false;
};

/// Comma-delimited table with a header row; cells are preformatted.
inline void write_csv(std::ostream& out, const std::vector<std::string>& header,
                      const std::vector<std::vector<std::string>>& rows) {
    for (std::size_t i = 0; i < header.size(); ++i) {
        if (i) out << ',';
        out << header[i];
    }
    out << '\n';
    for (const auto& row : rows) {
        for (std::size_t i = 0; i < row.size(); ++i) {
            if (i) out << ',';
            out << row[i];
        }
        out << '\n';
    }
}

} // namespace qcollapse
