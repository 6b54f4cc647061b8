#include "cosrays/model.hpp"

#include <cmath>
#include <numbers>

namespace cosrays {

namespace {
constexpr double two_pi = 2.0 * std::numbers::pi;
}

double next_potential(double t, Symbol s1) {
    return std::expm1(t) - two_pi * static_cast<double>(s1.magnitude());
}

StepResult step(const ModelPoint& x) {
    const double T = next_potential(x.t, x.addr.symbol_at(1));
    if (T < 0.0) return OutOfSpace{T};
    return ModelPoint{T, shift(x.addr)};
}

SignedStepResult step_signed(const SignedModelPoint& x) {
    auto r = step(x.point);
    if (auto* p = std::get_if<ModelPoint>(&r)) return SignedModelPoint{*p, x.sign};
    return std::get<OutOfSpace>(r);
}

double invert_t(double T_next, Symbol s1) {
    return std::log1p(T_next + two_pi * static_cast<double>(s1.magnitude()));
}

double t_floor(const ExternalAddress& s, double floor, double tol) {
    // r_k = floor at the horizon, r_j = max(floor, log(1 + 2pi|s_{j+1}| + r_{j+1})) for j >= 1,
    // r_0 without the floor. Monotone in the horizon; one period is a contraction.
    const std::size_t base = s.preperiod().size() + s.period().size() + 1;
    double prev = -1.0;
    for (std::size_t k = base; k < base + 200000; k += s.period().size()) {
        double r = floor;
        for (std::size_t j = k; j-- > 1;) r = std::max(floor, invert_t(r, s.symbol_at(j + 1)));
        r = invert_t(r, s.symbol_at(1));
        if (prev >= 0.0 && std::abs(r - prev) < tol * 1e-2) return r;
        prev = r;
    }
    return prev;
}

double t_min(const ExternalAddress& s, double tol) { return t_floor(s, 0.0, tol); }

Membership in_JF(const ModelPoint& x, std::size_t horizon) {
    ModelPoint p = x;
    for (std::size_t k = 1; k <= horizon; ++k) {
        auto r = step(p);
        if (std::holds_alternative<OutOfSpace>(r)) return NonMember{k};
        p = std::get<ModelPoint>(r);
        if (std::isinf(p.t)) return Member{};
    }
    if (x.t >= t_min(x.addr)) return Member{};
    // below t_min: the orbit must fail eventually; find where
    for (std::size_t k = horizon + 1; k <= horizon + 10000; ++k) {
        auto r = step(p);
        if (std::holds_alternative<OutOfSpace>(r)) return NonMember{k};
        p = std::get<ModelPoint>(r);
    }
    return Undecided{};
}

std::vector<ModelPoint> orbit(const ModelPoint& x, std::size_t n) {
    std::vector<ModelPoint> out{x};
    for (std::size_t k = 1; k <= n; ++k) {
        auto r = step(out.back());
        if (auto* o = std::get_if<OutOfSpace>(&r))
            throw Error("out_of_space", "orbit leaves the model space (deficit " + std::to_string(o->deficit) + ")",
                        "step " + std::to_string(k));
        out.push_back(std::get<ModelPoint>(r));
    }
    return out;
}

std::vector<double> potentials(const ModelPoint& x, std::size_t n, double cap) {
    std::vector<double> T{x.t};
    for (std::size_t k = 1; k <= n && T.back() <= cap; ++k) T.push_back(next_potential(T.back(), x.addr.symbol_at(k)));
    return T;
}

void to_json(nlohmann::json& j, const ModelPoint& x) {
    j = nlohmann::json{{"t", x.t}, {"addr", format_address(x.addr)}};
}

void from_json(const nlohmann::json& j, ModelPoint& x) {
    x.t = j.at("t").get<double>();
    x.addr = parse_address(j.at("addr").get<std::string>());
}

} // namespace cosrays
