#include "sheafdb/semiring.hpp"

#include "sheafdb/errors.hpp"

#include <charconv>
#include <ostream>

namespace sheafdb {

namespace {

std::int64_t checked_add(std::int64_t a, std::int64_t b) {
    std::int64_t out;
    if (__builtin_add_overflow(a, b, &out)) throw OverflowError("integer overflow in add");
    return out;
}

std::int64_t checked_mul(std::int64_t a, std::int64_t b) {
    std::int64_t out;
    if (__builtin_mul_overflow(a, b, &out)) throw OverflowError("integer overflow in multiply");
    return out;
}

void require_same_kind(const SemiringValue& a, const SemiringValue& b, const char* op) {
    if (a.kind() != b.kind()) {
        throw KindError(std::string(op) + ": kind mismatch (" + std::string(to_string(a.kind())) +
                        " vs " + std::string(to_string(b.kind())) + ")");
    }
}

BigInt parse_bigint(std::string_view text) {
    if (text.empty()) throw ParseError("empty number");
    std::size_t pos = 0;
    bool negative = false;
    if (text[0] == '+' || text[0] == '-') {
        negative = text[0] == '-';
        pos = 1;
    }
    if (pos == text.size()) throw ParseError("malformed number '" + std::string(text) + "'");
    BigInt value = 0;
    for (; pos < text.size(); ++pos) {
        char c = text[pos];
        if (c < '0' || c > '9') throw ParseError("malformed number '" + std::string(text) + "'");
        value = value * 10 + (c - '0');
    }
    return negative ? BigInt(-value) : value;
}

}  // namespace

std::string_view to_string(Kind kind) {
    switch (kind) {
        case Kind::Boolean: return "boolean";
        case Kind::Natural: return "natural";
        case Kind::Integer: return "integer";
        case Kind::NonnegRational: return "nonneg-rational";
    }
    return "?";
}

Kind parse_kind(std::string_view text) {
    if (text == "boolean" || text == "bool") return Kind::Boolean;
    if (text == "natural" || text == "nat") return Kind::Natural;
    if (text == "integer" || text == "int") return Kind::Integer;
    if (text == "nonneg-rational" || text == "rational" || text == "rat") return Kind::NonnegRational;
    throw ParseError("unknown semiring kind '" + std::string(text) + "'");
}

Rational parse_rational(std::string_view text) {
    if (auto slash = text.find('/'); slash != std::string_view::npos) {
        BigInt num = parse_bigint(text.substr(0, slash));
        BigInt den = parse_bigint(text.substr(slash + 1));
        if (den == 0) throw ParseError("zero denominator in '" + std::string(text) + "'");
        return Rational(num, den);
    }
    // Decimal with optional fraction and exponent.
    std::string_view mantissa = text;
    long exponent = 0;
    if (auto e = text.find_first_of("eE"); e != std::string_view::npos) {
        mantissa = text.substr(0, e);
        auto exp_text = text.substr(e + 1);
        if (!exp_text.empty() && exp_text[0] == '+') exp_text.remove_prefix(1);
        auto [ptr, ec] = std::from_chars(exp_text.data(), exp_text.data() + exp_text.size(), exponent);
        if (ec != std::errc() || ptr != exp_text.data() + exp_text.size()) {
            throw ParseError("malformed number '" + std::string(text) + "'");
        }
    }
    std::string digits;
    if (auto dot = mantissa.find('.'); dot != std::string_view::npos) {
        digits = std::string(mantissa.substr(0, dot)) + std::string(mantissa.substr(dot + 1));
        exponent -= static_cast<long>(mantissa.size() - dot - 1);
        if (digits.empty() || digits == "-" || digits == "+") {
            throw ParseError("malformed number '" + std::string(text) + "'");
        }
    } else {
        digits = std::string(mantissa);
    }
    BigInt value = parse_bigint(digits);
    BigInt scale = boost::multiprecision::pow(BigInt(10), static_cast<unsigned>(exponent < 0 ? -exponent : exponent));
    return exponent < 0 ? Rational(value, scale) : Rational(value * scale);
}

std::string format_rational(const Rational& r) {
    auto num = boost::multiprecision::numerator(r);
    auto den = boost::multiprecision::denominator(r);
    if (den == 1) return num.str();
    return num.str() + "/" + den.str();
}

SemiringValue::SemiringValue() : kind_(Kind::Natural), payload_(std::int64_t{0}) {}

SemiringValue::SemiringValue(Kind kind, std::variant<bool, std::int64_t, Rational> payload)
    : kind_(kind), payload_(std::move(payload)) {}

SemiringValue SemiringValue::boolean(bool b) { return {Kind::Boolean, b}; }

SemiringValue SemiringValue::natural(std::int64_t n) {
    if (n < 0) throw KindError("natural value must be >= 0, got " + std::to_string(n));
    return {Kind::Natural, n};
}

SemiringValue SemiringValue::integer(std::int64_t n) { return {Kind::Integer, n}; }

SemiringValue SemiringValue::rational(Rational q) {
    if (q < 0) throw KindError("nonneg-rational value must be >= 0, got " + format_rational(q));
    return {Kind::NonnegRational, std::move(q)};
}

SemiringValue SemiringValue::rational(std::int64_t num, std::int64_t den) {
    if (den == 0) throw DegenerateTotal("zero denominator");
    return rational(Rational(num, den));
}

SemiringValue SemiringValue::zero(Kind kind) {
    switch (kind) {
        case Kind::Boolean: return boolean(false);
        case Kind::Natural: return natural(0);
        case Kind::Integer: return integer(0);
        case Kind::NonnegRational: return rational(Rational(0));
    }
    throw KindError("unknown kind");
}

SemiringValue SemiringValue::one(Kind kind) {
    switch (kind) {
        case Kind::Boolean: return boolean(true);
        case Kind::Natural: return natural(1);
        case Kind::Integer: return integer(1);
        case Kind::NonnegRational: return rational(Rational(1));
    }
    throw KindError("unknown kind");
}

SemiringValue SemiringValue::parse(Kind kind, std::string_view text) {
    switch (kind) {
        case Kind::Boolean:
            if (text == "true" || text == "1") return boolean(true);
            if (text == "false" || text == "0") return boolean(false);
            throw ParseError("not a boolean: '" + std::string(text) + "'");
        case Kind::Natural:
        case Kind::Integer: {
            std::int64_t n = 0;
            auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), n);
            if (ec != std::errc() || ptr != text.data() + text.size()) {
                throw ParseError("not an integer: '" + std::string(text) + "'");
            }
            if (kind == Kind::Natural && n < 0) throw ParseError("negative natural: '" + std::string(text) + "'");
            return kind == Kind::Natural ? natural(n) : integer(n);
        }
        case Kind::NonnegRational: {
            Rational q = parse_rational(text);
            if (q < 0) throw ParseError("negative rational: '" + std::string(text) + "'");
            return rational(std::move(q));
        }
    }
    throw KindError("unknown kind");
}

bool SemiringValue::is_zero() const {
    switch (kind_) {
        case Kind::Boolean: return !std::get<bool>(payload_);
        case Kind::Natural:
        case Kind::Integer: return std::get<std::int64_t>(payload_) == 0;
        case Kind::NonnegRational: return std::get<Rational>(payload_) == 0;
    }
    return false;
}

bool SemiringValue::as_bool() const {
    if (kind_ != Kind::Boolean) throw KindError("not a boolean value");
    return std::get<bool>(payload_);
}

std::int64_t SemiringValue::as_int() const {
    if (kind_ != Kind::Natural && kind_ != Kind::Integer) throw KindError("not an integral value");
    return std::get<std::int64_t>(payload_);
}

Rational SemiringValue::as_rational() const {
    switch (kind_) {
        case Kind::Boolean: return Rational(std::get<bool>(payload_) ? 1 : 0);
        case Kind::Natural:
        case Kind::Integer: return Rational(std::get<std::int64_t>(payload_));
        case Kind::NonnegRational: return std::get<Rational>(payload_);
    }
    return Rational(0);
}

std::string SemiringValue::to_string() const {
    switch (kind_) {
        case Kind::Boolean: return std::get<bool>(payload_) ? "true" : "false";
        case Kind::Natural:
        case Kind::Integer: return std::to_string(std::get<std::int64_t>(payload_));
        case Kind::NonnegRational: return format_rational(std::get<Rational>(payload_));
    }
    return "?";
}

bool operator==(const SemiringValue& a, const SemiringValue& b) {
    return a.kind_ == b.kind_ && a.payload_ == b.payload_;
}

bool operator<(const SemiringValue& a, const SemiringValue& b) {
    if (a.kind_ != b.kind_) return a.kind_ < b.kind_;
    return a.payload_ < b.payload_;
}

std::ostream& operator<<(std::ostream& os, const SemiringValue& v) { return os << v.to_string(); }

SemiringValue add(const SemiringValue& a, const SemiringValue& b) {
    require_same_kind(a, b, "add");
    switch (a.kind()) {
        case Kind::Boolean: return SemiringValue::boolean(a.as_bool() || b.as_bool());
        case Kind::Natural: return SemiringValue::natural(checked_add(a.as_int(), b.as_int()));
        case Kind::Integer: return SemiringValue::integer(checked_add(a.as_int(), b.as_int()));
        case Kind::NonnegRational: return SemiringValue::rational(a.as_rational() + b.as_rational());
    }
    throw KindError("unknown kind");
}

SemiringValue multiply(const SemiringValue& a, const SemiringValue& b) {
    require_same_kind(a, b, "multiply");
    switch (a.kind()) {
        case Kind::Boolean: return SemiringValue::boolean(a.as_bool() && b.as_bool());
        case Kind::Natural: return SemiringValue::natural(checked_mul(a.as_int(), b.as_int()));
        case Kind::Integer: return SemiringValue::integer(checked_mul(a.as_int(), b.as_int()));
        case Kind::NonnegRational: return SemiringValue::rational(a.as_rational() * b.as_rational());
    }
    throw KindError("unknown kind");
}

SemiringValue subtract(const SemiringValue& a, const SemiringValue& b) {
    require_same_kind(a, b, "subtract");
    if (a.kind() != Kind::Integer) throw KindError("subtract is only defined on the integer kind");
    std::int64_t out;
    if (__builtin_sub_overflow(a.as_int(), b.as_int(), &out)) throw OverflowError("integer overflow in subtract");
    return SemiringValue::integer(out);
}

SemiringMorphism SemiringMorphism::identity(Kind kind) { return {kind, kind, Rule::Identity, 0}; }

SemiringMorphism SemiringMorphism::bool_indicator() {
    return {Kind::Boolean, Kind::Natural, Rule::BoolIndicator, 0};
}

SemiringMorphism SemiringMorphism::normalize_by_total(std::int64_t total) {
    if (total <= 0) throw DegenerateTotal("normalize-by-total requires a positive total, got " + std::to_string(total));
    return {Kind::Natural, Kind::NonnegRational, Rule::NormalizeByTotal, total};
}

SemiringMorphism SemiringMorphism::counting(Kind source) {
    return source == Kind::Boolean ? bool_indicator() : identity(source);
}

SemiringValue SemiringMorphism::operator()(const SemiringValue& a) const {
    if (a.kind() != source_) {
        throw KindError("morphism expects " + std::string(to_string(source_)) + ", got " +
                        std::string(to_string(a.kind())));
    }
    switch (rule_) {
        case Rule::Identity: return a;
        case Rule::BoolIndicator: return SemiringValue::natural(a.as_bool() ? 1 : 0);
        case Rule::NormalizeByTotal: return SemiringValue::rational(Rational(a.as_int(), total_));
    }
    throw KindError("unknown morphism rule");
}

SemiringValue apply_morphism(const SemiringMorphism& phi, const SemiringValue& a) { return phi(a); }

}  // namespace sheafdb
