#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <ostream>
#include <string>
#include <variant>
#include <vector>

namespace nesy {

enum class ValueType { Int, Float, Symbol };

std::string_view valueTypeName(ValueType type);

/**
 * A constant in a relation column. Ordering is by type first (Int < Float <
 * Symbol) and then by value, which gives relations a deterministic order.
 */
class Value {
public:
    Value() : data_(std::int64_t{0}) {}
    static Value integer(std::int64_t v) {
        return Value(Data(v));
    }
    static Value real(double v) {
        return Value(Data(v));
    }
    static Value symbol(std::string v) {
        return Value(Data(std::move(v)));
    }

    ValueType type() const {
        return static_cast<ValueType>(data_.index());
    }
    bool isNumeric() const {
        return type() != ValueType::Symbol;
    }
    std::int64_t asInt() const {
        return std::get<std::int64_t>(data_);
    }
    double asFloat() const {
        return std::get<double>(data_);
    }
    const std::string& asSymbol() const {
        return std::get<std::string>(data_);
    }
    /** Numeric value widened to double; Int and Float only. */
    double numeric() const;

    /** Source-syntax rendering: ints as digits, floats always with a '.', symbols quoted. */
    std::string toString() const;

    std::size_t hash() const;

    friend bool operator==(const Value& a, const Value& b) {
        return a.data_ == b.data_;
    }
    friend bool operator!=(const Value& a, const Value& b) {
        return !(a == b);
    }
    friend bool operator<(const Value& a, const Value& b) {
        return a.data_ < b.data_;
    }

private:
    using Data = std::variant<std::int64_t, double, std::string>;
    explicit Value(Data d) : data_(std::move(d)) {}
    Data data_;
};

std::ostream& operator<<(std::ostream& os, const Value& v);

using Tuple = std::vector<Value>;

std::string tupleToString(const Tuple& t);

struct TupleHash {
    std::size_t operator()(const Tuple& t) const;
};

/** Shortest round-trip decimal rendering that always reads back as a float literal. */
std::string formatFloat(double v);

}  // namespace nesy
