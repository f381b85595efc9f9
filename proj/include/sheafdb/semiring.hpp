#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <cstdint>
#include <iosfwd>
#include <string>
#include <string_view>
#include <variant>

namespace sheafdb {

using Rational = boost::multiprecision::cpp_rational;
using BigInt = boost::multiprecision::cpp_int;

enum class Kind { Boolean, Natural, Integer, NonnegRational };

std::string_view to_string(Kind kind);
Kind parse_kind(std::string_view text);

/// Parses "p/q", an integer, or a finite decimal ("1.25", "-3e-2") exactly.
Rational parse_rational(std::string_view text);
/// Lowest-terms "p/q", or "p" when the denominator is 1.
std::string format_rational(const Rational& r);

/// A value in one of the supported semirings. Immutable; the kind of a value
/// never changes through arithmetic.
class SemiringValue {
public:
    /// Natural zero.
    SemiringValue();

    static SemiringValue boolean(bool b);
    static SemiringValue natural(std::int64_t n);
    static SemiringValue integer(std::int64_t n);
    static SemiringValue rational(Rational q);
    static SemiringValue rational(std::int64_t num, std::int64_t den);
    static SemiringValue zero(Kind kind);
    static SemiringValue one(Kind kind);

    /// Parses the text serialization for a known kind.
    static SemiringValue parse(Kind kind, std::string_view text);

    Kind kind() const noexcept { return kind_; }
    bool is_zero() const;

    bool as_bool() const;
    std::int64_t as_int() const;
    /// Any kind viewed as an exact rational (booleans as 0/1).
    Rational as_rational() const;

    std::string to_string() const;

    friend bool operator==(const SemiringValue& a, const SemiringValue& b);
    /// Orders within a kind; values of different kinds order by kind.
    friend bool operator<(const SemiringValue& a, const SemiringValue& b);

private:
    SemiringValue(Kind kind, std::variant<bool, std::int64_t, Rational> payload);

    Kind kind_;
    std::variant<bool, std::int64_t, Rational> payload_;
};

std::ostream& operator<<(std::ostream& os, const SemiringValue& v);

/// Semiring sum; Boolean kind is OR. Throws KindError on kind mismatch.
SemiringValue add(const SemiringValue& a, const SemiringValue& b);
/// Semiring product; Boolean kind is AND.
SemiringValue multiply(const SemiringValue& a, const SemiringValue& b);
/// Only defined on the integer kind.
SemiringValue subtract(const SemiringValue& a, const SemiringValue& b);

class SemiringMorphism {
public:
    enum class Rule { Identity, BoolIndicator, NormalizeByTotal };

    static SemiringMorphism identity(Kind kind);
    /// Boolean -> natural, true |-> 1, false |-> 0.
    static SemiringMorphism bool_indicator();
    /// Natural -> nonneg-rational, n |-> n / total. Throws DegenerateTotal when
    /// total is 0.
    static SemiringMorphism normalize_by_total(std::int64_t total);

    /// The usual count morphism for a table of the given kind: indicator for
    /// Boolean tables, identity otherwise.
    static SemiringMorphism counting(Kind source);

    Kind source() const noexcept { return source_; }
    Kind target() const noexcept { return target_; }
    Rule rule() const noexcept { return rule_; }
    std::int64_t total() const noexcept { return total_; }

    SemiringValue operator()(const SemiringValue& a) const;

private:
    SemiringMorphism(Kind source, Kind target, Rule rule, std::int64_t total)
        : source_(source), target_(target), rule_(rule), total_(total) {}

    Kind source_;
    Kind target_;
    Rule rule_;
    std::int64_t total_;
};

SemiringValue apply_morphism(const SemiringMorphism& phi, const SemiringValue& a);

}  // namespace sheafdb
