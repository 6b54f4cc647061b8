#include "cosrays/address.hpp"

#include <algorithm>
#include <numeric>

namespace cosrays {

std::strong_ordering compare_symbols(Symbol a, Symbol b) {
    if (a.side != b.side) return a.side == Side::L ? std::strong_ordering::less : std::strong_ordering::greater;
    if (a.side == Side::R) return a.n <=> b.n;
    return b.n <=> a.n;
}

namespace {

std::vector<Symbol> minimal_period(std::vector<Symbol> per) {
    const std::size_t p = per.size();
    for (std::size_t d = 1; d < p; ++d) {
        if (p % d) continue;
        bool ok = true;
        for (std::size_t i = d; i < p && ok; ++i) ok = per[i] == per[i % d];
        if (ok) {
            per.resize(d);
            break;
        }
    }
    return per;
}

} // namespace

ExternalAddress::ExternalAddress(std::vector<Symbol> preperiod, std::vector<Symbol> period)
    : pre_(std::move(preperiod)), per_(std::move(period)) {
    if (per_.empty()) throw Error("empty_period", "address period must be nonempty");
    per_ = minimal_period(std::move(per_));
    // a preperiod ending in the last period symbol is one rotation too long
    while (!pre_.empty() && pre_.back() == per_.back()) {
        pre_.pop_back();
        std::rotate(per_.rbegin(), per_.rbegin() + 1, per_.rend());
    }
}

Symbol ExternalAddress::symbol_at(std::size_t k) const {
    if (k < pre_.size()) return pre_[k];
    return per_[(k - pre_.size()) % per_.size()];
}

std::strong_ordering lex_compare(const ExternalAddress& s, const ExternalAddress& t) {
    const std::size_t n = s.preperiod().size() + t.preperiod().size() +
                          std::lcm(s.period().size(), t.period().size());
    for (std::size_t k = 0; k < n; ++k) {
        auto c = compare_symbols(s.symbol_at(k), t.symbol_at(k));
        if (c != 0) return c;
    }
    return std::strong_ordering::equal;
}

bool cyclic_between(const ExternalAddress& s, const ExternalAddress& a, const ExternalAddress& t) {
    if (s == a || a == t || s == t)
        throw Error("cyclic_repeat", "cyclic order is undefined for repeated arguments");
    const bool sa = lex_compare(s, a) < 0;
    const bool at = lex_compare(a, t) < 0;
    const bool ts = lex_compare(t, s) < 0;
    return (sa && at) || (at && ts) || (ts && sa);
}

ExternalAddress shift(const ExternalAddress& s) {
    auto pre = s.preperiod();
    auto per = s.period();
    if (!pre.empty()) {
        pre.erase(pre.begin());
    } else {
        std::rotate(per.begin(), per.begin() + 1, per.end());
    }
    return ExternalAddress(std::move(pre), std::move(per));
}

ExternalAddress shift(const ExternalAddress& s, std::size_t k) {
    ExternalAddress r = s;
    for (std::size_t i = 0; i < k; ++i) r = shift(r);
    return r;
}

ExternalAddress prepend(Symbol head, const ExternalAddress& s) {
    auto pre = s.preperiod();
    pre.insert(pre.begin(), head);
    return ExternalAddress(std::move(pre), s.period());
}

// ---- text form -------------------------------------------------------------

namespace {

struct Cursor {
    std::string_view text;
    std::size_t pos = 0;

    bool done() const { return pos >= text.size(); }
    void skip_ws() {
        while (!done() && (text[pos] == ' ' || text[pos] == '\t' || text[pos] == '\n' || text[pos] == '\r')) ++pos;
    }
    // ASCII '-' or U+2212 (E2 88 92)
    std::size_t minus_len() const {
        if (done()) return 0;
        if (text[pos] == '-') return 1;
        if (text.substr(pos, 3) == "\xE2\x88\x92") return 3;
        return 0;
    }
    bool at_digit() const { return !done() && text[pos] >= '0' && text[pos] <= '9'; }
};

[[noreturn]] void fail(const Cursor& c, const std::string& what) {
    throw ParseError("syntax", "syntax error at byte " + std::to_string(c.pos) + ": " + what, c.pos);
}

Symbol read_token(Cursor& c) {
    bool neg = false;
    if (std::size_t m = c.minus_len()) {
        neg = true;
        c.pos += m;
    }
    if (!c.at_digit()) fail(c, "expected digit");
    long v = 0;
    while (c.at_digit()) {
        if (v > 100000000L) fail(c, "index too large");
        v = v * 10 + (c.text[c.pos] - '0');
        ++c.pos;
    }
    if (c.done()) fail(c, "expected L or R");
    Side side;
    if (c.text[c.pos] == 'L') side = Side::L;
    else if (c.text[c.pos] == 'R') side = Side::R;
    else fail(c, "expected L or R");
    ++c.pos;
    return Symbol{neg ? -v : v, side};
}

ExternalAddress read_address(Cursor& c, bool allow_trailer) {
    std::vector<Symbol> pre, per;
    c.skip_ws();
    while (!c.done() && c.text[c.pos] != '|') {
        pre.push_back(read_token(c));
        c.skip_ws();
    }
    if (c.done()) fail(c, "missing '|'");
    ++c.pos;
    c.skip_ws();
    const std::size_t period_at = c.pos;
    while (!c.done() && !(allow_trailer && c.text[c.pos] == ',')) {
        per.push_back(read_token(c));
        c.skip_ws();
    }
    if (per.empty())
        throw ParseError("empty_period", "syntax error at byte " + std::to_string(period_at) + ": empty period",
                         period_at);
    return ExternalAddress(std::move(pre), std::move(per));
}

} // namespace

ExternalAddress parse_address(std::string_view text) {
    Cursor c{text};
    return read_address(c, false);
}

SignedAddress parse_signed(std::string_view text) {
    Cursor c{text};
    ExternalAddress a = read_address(c, true);
    if (c.done()) fail(c, "missing ',+' or ',-'");
    ++c.pos; // ','
    c.skip_ws();
    Sign sg;
    if (!c.done() && c.text[c.pos] == '+') {
        sg = Sign::Plus;
        ++c.pos;
    } else if (std::size_t m = c.minus_len()) {
        sg = Sign::Minus;
        c.pos += m;
    } else {
        fail(c, "expected sign");
    }
    c.skip_ws();
    if (!c.done()) fail(c, "trailing input");
    return SignedAddress{std::move(a), sg};
}

std::string format_symbol(Symbol s) {
    return std::to_string(s.n) + (s.side == Side::L ? "L" : "R");
}

std::string format_address(const ExternalAddress& s) {
    std::string out;
    for (std::size_t i = 0; i < s.preperiod().size(); ++i) {
        if (i) out += ' ';
        out += format_symbol(s.preperiod()[i]);
    }
    out += '|';
    for (std::size_t i = 0; i < s.period().size(); ++i) {
        if (i) out += ' ';
        out += format_symbol(s.period()[i]);
    }
    return out;
}

std::string format_signed(const SignedAddress& sa) {
    return format_address(sa.addr) + ',' + sign_char(sa.sign);
}

} // namespace cosrays
