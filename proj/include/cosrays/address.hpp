#pragma once

#include <compare>
#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "cosrays/error.hpp"

namespace cosrays {

enum class Side : std::uint8_t { L, R };

struct Symbol {
    long n = 0;
    Side side = Side::R;

    long index() const { return n; }
    long magnitude() const { return n < 0 ? -n : n; }
    bool operator==(const Symbol&) const = default;
};

// L before R; inside R increasing n, inside L decreasing n.
std::strong_ordering compare_symbols(Symbol a, Symbol b);

// Eventually periodic sequence pre + per per per ...; kept canonical so that
// equality of the stored words is equality of the sequences.
class ExternalAddress {
public:
    ExternalAddress(std::vector<Symbol> preperiod, std::vector<Symbol> period);

    const std::vector<Symbol>& preperiod() const { return pre_; }
    const std::vector<Symbol>& period() const { return per_; }
    Symbol symbol_at(std::size_t k) const;

    bool operator==(const ExternalAddress&) const = default;

private:
    std::vector<Symbol> pre_;
    std::vector<Symbol> per_;
};

std::strong_ordering lex_compare(const ExternalAddress& s, const ExternalAddress& t);

// [s, a, t] in the cyclic order induced by lex_compare. Throws on repeats.
bool cyclic_between(const ExternalAddress& s, const ExternalAddress& a, const ExternalAddress& t);

ExternalAddress shift(const ExternalAddress& s);
ExternalAddress shift(const ExternalAddress& s, std::size_t k);
ExternalAddress prepend(Symbol head, const ExternalAddress& s);

// Carries the byte offset of the offending character.
class ParseError : public Error {
public:
    ParseError(std::string code, const std::string& message, std::size_t offset)
        : Error(std::move(code), message, "byte " + std::to_string(offset)), offset_(offset) {}
    std::size_t offset() const { return offset_; }

private:
    std::size_t offset_;
};

ExternalAddress parse_address(std::string_view text);
std::string format_address(const ExternalAddress& s);
std::string format_symbol(Symbol s);

enum class Sign : std::uint8_t { Minus, Plus };

inline Sign flip(Sign s) { return s == Sign::Plus ? Sign::Minus : Sign::Plus; }
inline char sign_char(Sign s) { return s == Sign::Plus ? '+' : '-'; }

struct SignedAddress {
    ExternalAddress addr{{}, {Symbol{}}};
    Sign sign = Sign::Plus;
    bool operator==(const SignedAddress&) const = default;
};

SignedAddress parse_signed(std::string_view text);
std::string format_signed(const SignedAddress& sa);

} // namespace cosrays
