#include "nesy/value.h"

#include <charconv>
#include <cmath>
#include <sstream>

namespace nesy {

std::string_view valueTypeName(ValueType type) {
    switch (type) {
        case ValueType::Int: return "int";
        case ValueType::Float: return "float";
        case ValueType::Symbol: return "sym";
    }
    return "?";
}

double Value::numeric() const {
    if (type() == ValueType::Int) {
        return static_cast<double>(asInt());
    }
    return asFloat();
}

std::string formatFloat(double v) {
    if (!std::isfinite(v)) {
        return std::isnan(v) ? "nan" : (v > 0 ? "inf" : "-inf");
    }
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof(buf), v);
    std::string s(buf, res.ptr);
    auto e = s.find_first_of("eE");
    if (s.find('.') == std::string::npos) {
        if (e == std::string::npos) {
            s += ".0";
        } else {
            s.insert(e, ".0");
        }
    }
    return s;
}

std::string Value::toString() const {
    switch (type()) {
        case ValueType::Int: return std::to_string(asInt());
        case ValueType::Float: return formatFloat(asFloat());
        case ValueType::Symbol: {
            std::string out = "\"";
            for (char c : asSymbol()) {
                switch (c) {
                    case '"': out += "\\\""; break;
                    case '\\': out += "\\\\"; break;
                    case '\n': out += "\\n"; break;
                    case '\t': out += "\\t"; break;
                    default: out += c;
                }
            }
            out += '"';
            return out;
        }
    }
    return {};
}

std::size_t Value::hash() const {
    std::size_t h = std::hash<std::size_t>{}(data_.index());
    std::size_t v = 0;
    switch (type()) {
        case ValueType::Int: v = std::hash<std::int64_t>{}(asInt()); break;
        case ValueType::Float: v = std::hash<double>{}(asFloat()); break;
        case ValueType::Symbol: v = std::hash<std::string>{}(asSymbol()); break;
    }
    return h ^ (v + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2));
}

std::ostream& operator<<(std::ostream& os, const Value& v) {
    return os << v.toString();
}

std::string tupleToString(const Tuple& t) {
    std::string out = "(";
    for (std::size_t i = 0; i < t.size(); ++i) {
        if (i > 0) {
            out += ", ";
        }
        out += t[i].toString();
    }
    return out + ")";
}

std::size_t TupleHash::operator()(const Tuple& t) const {
    std::size_t h = t.size();
    for (const auto& v : t) {
        h ^= v.hash() + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
    }
    return h;
}

}  // namespace nesy
