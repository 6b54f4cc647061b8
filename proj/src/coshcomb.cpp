#include "cosrays/coshcomb.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "cosrays/error.hpp"

namespace cosrays {

namespace {

constexpr double pi = std::numbers::pi;
constexpr double kTol = 1e-9;

Symbol R(long n) { return Symbol{n, Side::R}; }
Symbol L(long n) { return Symbol{n, Side::L}; }

long floor_div2(long j) { return j >= 0 ? j / 2 : -((-j + 1) / 2); }

ExternalAddress with_head(Symbol head, const ExternalAddress& tail) { return prepend(head, tail); }

template <class T>
void canonicalize(std::vector<T>& pre, std::vector<T>& per) {
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
    while (!pre.empty() && pre.back() == per.back()) {
        pre.pop_back();
        std::rotate(per.rbegin(), per.rbegin() + 1, per.rend());
    }
}

} // namespace

double strip_height(MapKind kind) { return kind == MapKind::Cosh ? pi : pi / 2; }

PartitionComponent component_of(MapKind kind, cplx z) {
    const double h = strip_height(kind);
    const double y = z.imag() / h;
    const double j = std::round(y);
    if (std::abs(z.imag() - j * h) < kTol)
        throw Error("boundary", "point lies on a strip boundary", "line " + std::to_string(static_cast<long>(j)));
    return PartitionComponent{kind, static_cast<long>(std::floor(y))};
}

const ExternalAddress& lower_boundary_tail() {
    static const ExternalAddress b({L(0)}, {R(0)});
    return b;
}

const ExternalAddress& upper_boundary_tail() {
    static const ExternalAddress b({}, {R(0)});
    return b;
}

bool ends_in_zero_r(const ExternalAddress& s) { return s.period().size() == 1 && s.period()[0] == R(0); }

// ---- itineraries -------------------------------------------------------------
//
// Inside F_(n,R) the two boundary rays n_R 0_L 0_R.. and n_R 0_R.. run along
// Im = (2n-1)h and Im = 2n h; inside F_(n,L) the rays n_L 0_R.. and n_L 0_L 0_R..
// run along Im = 2n h and (2n+1)h. Lexicographic position of the tail decides
// the strip; on a boundary the sign decides the side (+ is a right turn, which
// is upward on the right and downward on the left).

PartitionComponent first_component(MapKind kind, const SignedAddress& sa) {
    const Symbol head = sa.addr.symbol_at(0);
    const ExternalAddress tail = shift(sa.addr);
    const auto& b1 = lower_boundary_tail();
    const auto& b2 = upper_boundary_tail();
    const long n = head.n;
    const bool up = sa.sign == Sign::Plus;
    long K;
    if (head.side == Side::R) {
        if (tail == b1) K = up ? 2 * n - 1 : 2 * n - 2;
        else if (tail == b2) K = up ? 2 * n : 2 * n - 1;
        else K = 2 * n - 2 + (lex_compare(tail, b1) > 0) + (lex_compare(tail, b2) > 0);
    } else {
        if (tail == b2) K = up ? 2 * n - 1 : 2 * n;
        else if (tail == b1) K = up ? 2 * n : 2 * n + 1;
        else K = 2 * n + 1 - (lex_compare(tail, b1) > 0) - (lex_compare(tail, b2) > 0);
    }
    return PartitionComponent{kind, K};
}

Itinerary itinerary(MapKind kind, const SignedAddress& sa) {
    Itinerary it;
    it.map_kind = kind;
    const std::size_t p = sa.addr.preperiod().size();
    const std::size_t q = sa.addr.period().size();
    ExternalAddress s = sa.addr;
    for (std::size_t k = 0; k < p + q; ++k) {
        const long K = first_component(kind, SignedAddress{s, sa.sign}).K;
        (k < p ? it.preperiod : it.period).push_back(K);
        s = shift(s);
    }
    canonicalize(it.preperiod, it.period);
    return it;
}

std::vector<long> itinerary_prefix(MapKind kind, const SignedAddress& sa, std::size_t length) {
    const Itinerary it = itinerary(kind, sa);
    std::vector<long> out;
    for (std::size_t k = 0; k < length; ++k)
        out.push_back(k < it.preperiod.size() ? it.preperiod[k]
                                              : it.period[(k - it.preperiod.size()) % it.period.size()]);
    return out;
}

void to_json(nlohmann::json& j, const Itinerary& it) {
    j = nlohmann::json{{"preperiod", it.preperiod}, {"period", it.period}, {"map", kind_name(it.map_kind)}};
}

// ---- overlap -----------------------------------------------------------------

std::string overlap_kind_name(OverlapKind k) {
    switch (k) {
    case OverlapKind::SameRay: return "SameRay";
    case OverlapKind::TailFromCritical: return "TailFromCritical";
    case OverlapKind::VerticalSegment: return "VerticalSegment";
    case OverlapKind::PreimageArc: return "PreimageArc";
    case OverlapKind::DeeperArc: return "DeeperArc";
    case OverlapKind::None: return "None";
    }
    return "None";
}

namespace {

// Index j of the segment V_j shared by the L-headed ray x and the R-headed ray y.
std::optional<long> vertical_index(MapKind kind, const ExternalAddress& x, const ExternalAddress& y) {
    const Symbol hx = x.symbol_at(0), hy = y.symbol_at(0);
    if (hx.side != Side::L || hy.side != Side::R) return std::nullopt;
    const ExternalAddress tx = shift(x), ty = shift(y);
    if (tx == upper_boundary_tail() && ty == upper_boundary_tail() && hx.n == hy.n)
        return kind == MapKind::Cosh ? 2 * hx.n : hx.n;
    if (kind == MapKind::Cosh && tx == lower_boundary_tail() && ty == lower_boundary_tail() && hy.n == hx.n + 1)
        return 2 * hx.n + 1;
    return std::nullopt;
}

struct VHit {
    long j;
    Sign sign;
};

// x carries the sign opposite to the segment's, y carries the segment's sign
std::optional<VHit> vertical_pair(MapKind kind, const SignedAddress& x, const SignedAddress& y) {
    if (x.sign == y.sign) return std::nullopt;
    auto j = vertical_index(kind, x.addr, y.addr);
    if (!j) return std::nullopt;
    return VHit{*j, y.sign};
}

std::optional<VHit> vertical_either(MapKind kind, const SignedAddress& a, const SignedAddress& b) {
    if (auto v = vertical_pair(kind, a, b)) return v;
    return vertical_pair(kind, b, a);
}

bool on_positive_axis(const VHit& v) { return v.j >= 1 || (v.j == 0 && v.sign == Sign::Plus); }

std::optional<OverlapDescriptor> arc_pair(MapKind kind, const SignedAddress& a, const SignedAddress& b) {
    const Symbol ha = a.addr.symbol_at(0), hb = b.addr.symbol_at(0);
    if (ha.side != hb.side || std::abs(ha.n - hb.n) != 1) return std::nullopt;
    const SignedAddress& lo = ha.n < hb.n ? a : b;
    const SignedAddress& hi = ha.n < hb.n ? b : a;
    const SignedAddress tlo{shift(lo.addr), lo.sign}, thi{shift(hi.addr), hi.sign};
    // right side: the upper domain carries the L-headed tail; left side: the lower one
    const auto v = ha.side == Side::R ? vertical_pair(kind, thi, tlo) : vertical_pair(kind, tlo, thi);
    if (!v || !on_positive_axis(*v)) return std::nullopt;
    OverlapDescriptor d;
    d.kind = OverlapKind::PreimageArc;
    d.K = v->j;
    d.sign = v->sign;
    d.P = lo.addr.symbol_at(0).n;
    d.side = ha.side;
    return d;
}

} // namespace

OverlapDescriptor overlap(MapKind kind, const SignedAddress& a, const SignedAddress& b) {
    OverlapDescriptor d;
    if (a == b) {
        d.kind = OverlapKind::SameRay;
        return d;
    }
    if (a.addr == b.addr) {
        if (!ends_in_zero_r(a.addr)) {
            d.kind = OverlapKind::SameRay;
            return d;
        }
        d.kind = OverlapKind::TailFromCritical;
        d.critical_point = common_tail(kind, a.addr).back();
        return d;
    }
    if (auto v = vertical_either(kind, a, b)) {
        d.kind = OverlapKind::VerticalSegment;
        d.K = v->j;
        d.sign = v->sign;
        return d;
    }
    if (auto arc = arc_pair(kind, a, b)) return *arc;
    if (a.addr.symbol_at(0) == b.addr.symbol_at(0)) {
        OverlapDescriptor inner = overlap(kind, SignedAddress{shift(a.addr), a.sign}, SignedAddress{shift(b.addr), b.sign});
        if (inner.kind == OverlapKind::None) return inner;
        // a segment on the cut is pulled back to opposite sides of the common domain
        if (inner.kind == OverlapKind::VerticalSegment && on_positive_axis(VHit{inner.K, inner.sign})) return d;
        d.kind = OverlapKind::DeeperArc;
        if (inner.kind == OverlapKind::DeeperArc) {
            d.depth = inner.depth + 1;
            d.base = inner.base;
        } else {
            d.depth = 1;
            d.base = {inner};
        }
        return d;
    }
    return d;
}

bool lands_together(MapKind kind, const SignedAddress& a, const SignedAddress& b) {
    return overlap(kind, a, b).kind == OverlapKind::SameRay;
}

bool same_itinerary(MapKind kind, const SignedAddress& a, const SignedAddress& b) {
    return itinerary(kind, a) == itinerary(kind, b);
}

void to_json(nlohmann::json& j, const OverlapDescriptor& d) {
    j = nlohmann::json{{"kind", overlap_kind_name(d.kind)}};
    switch (d.kind) {
    case OverlapKind::TailFromCritical:
        j["critical_point"] = {d.critical_point.real(), d.critical_point.imag()};
        break;
    case OverlapKind::VerticalSegment:
        j["K"] = d.K;
        j["sign"] = std::string(1, sign_char(d.sign));
        break;
    case OverlapKind::PreimageArc:
        j["K"] = d.K;
        j["sign"] = std::string(1, sign_char(d.sign));
        j["P"] = d.P;
        j["side"] = d.side == Side::R ? "R" : "L";
        break;
    case OverlapKind::DeeperArc:
        j["depth"] = d.depth;
        j["base"] = d.base.front();
        break;
    default:
        break;
    }
}

double corresponding_potential(const OverlapDescriptor& d, const SignedAddress& a, const SignedAddress& b, double t) {
    const OverlapDescriptor& base = d.kind == OverlapKind::DeeperArc ? d.base.front() : d;
    if (base.kind != OverlapKind::PreimageArc) return t;
    const std::size_t m = (d.kind == OverlapKind::DeeperArc ? d.depth : 0) + 1;
    double T = t;
    for (std::size_t k = 1; k <= m; ++k) T = next_potential(T, a.addr.symbol_at(k));
    for (std::size_t k = m; k >= 1; --k) T = invert_t(T, b.addr.symbol_at(k));
    return T;
}

// ---- geometry ---------------------------------------------------------------

std::pair<cplx, cplx> vertical_segment(long K, Sign sign) {
    const double s = sign == Sign::Plus ? 0.5 : -0.5;
    return {cplx(0, K * pi), cplx(0, (K + s) * pi)};
}

std::vector<cplx> common_tail(MapKind kind, const ExternalAddress& s) {
    if (!ends_in_zero_r(s)) throw Error("domain", "address does not end in 0R 0R ...", format_address(s));
    const Family F = family(kind);
    // image tail [0, far) on the real axis, walked inward
    const std::size_t p = s.preperiod().size();
    std::vector<cplx> path;
    for (double x = p == 0 ? 40.0 : std::exp(40.0); x > 1e-6; x *= 0.5) path.push_back(F.to_w(cplx(x, 0)));
    path.push_back(F.to_w(cplx(0, 0)));
    for (std::size_t k = p; k-- > 0;) {
        const cplx start = branch(F.g, s.symbol_at(k), path.front());
        LiftedPath lp = lift_path(F.g, path, start, LiftOptions{Sign::Plus, true});
        path = std::move(lp.points);
    }
    // drop the far part that is only there to fix the branch
    std::vector<cplx> out;
    for (cplx w : path) {
        const cplx z = F.to_z(w);
        if (std::abs(z.real()) <= 40.0) out.push_back(z);
    }
    return out;
}

std::vector<cplx> preimage_arc(MapKind kind, const OverlapDescriptor& d, std::size_t n) {
    if (d.kind != OverlapKind::PreimageArc) throw Error("domain", "not a preimage arc");
    const Family F = family(kind);
    const auto [v0, v1] = vertical_segment(d.K, d.sign);
    std::vector<cplx> out;
    for (std::size_t i = 0; i < n; ++i) {
        const cplx v = v0 + (v1 - v0) * (static_cast<double>(i) / static_cast<double>(n - 1));
        const cplx w = F.to_w(v);
        const double eps = 1e-12 * (1.0 + std::abs(w));
        // upper boundary of the lower domain: the higher of the two one-sided limits
        const cplx a = branch(F.g, Symbol{d.P, d.side}, w + eps);
        const cplx b = branch(F.g, Symbol{d.P, d.side}, w - eps);
        out.push_back(F.to_z(a.imag() > b.imag() ? a : b));
    }
    return out;
}

namespace {

void add_both(std::vector<SignedAddress>& out, const ExternalAddress& s) {
    out.push_back(SignedAddress{s, Sign::Plus});
    out.push_back(SignedAddress{s, Sign::Minus});
}

// depth 0: the horizontal boundary lines
void rays_on_lines(MapKind kind, cplx z, std::vector<SignedAddress>& out) {
    const double h = strip_height(kind);
    const double jr = std::round(z.imag() / h);
    if (std::abs(z.imag() - jr * h) > kTol) return;
    const long j = static_cast<long>(jr);
    if (z.real() > -kTol) {
        if (j % 2 == 0) add_both(out, with_head(R(j / 2), upper_boundary_tail()));
        else add_both(out, with_head(R(floor_div2(j + 1)), lower_boundary_tail()));
    }
    if (z.real() < kTol) {
        if (j % 2 == 0) add_both(out, with_head(L(j / 2), upper_boundary_tail()));
        else add_both(out, with_head(L(floor_div2(j - 1)), lower_boundary_tail()));
    }
}

void vertical_rays(MapKind kind, long j, Sign sign, std::vector<SignedAddress>& out) {
    ExternalAddress x = with_head(L(j), upper_boundary_tail());
    ExternalAddress y = with_head(R(j), upper_boundary_tail());
    if (kind == MapKind::Cosh) {
        const long K = floor_div2(j);
        if (j % 2 == 0) {
            x = with_head(L(K), upper_boundary_tail());
            y = with_head(R(K), upper_boundary_tail());
        } else {
            x = with_head(L(K), lower_boundary_tail());
            y = with_head(R(K + 1), lower_boundary_tail());
        }
    }
    out.push_back(SignedAddress{x, flip(sign)});
    out.push_back(SignedAddress{y, sign});
}

// depth 1: the imaginary axis, covered by the segments V_j(+-)
void rays_on_axis(MapKind kind, cplx z, std::vector<SignedAddress>& out) {
    if (std::abs(z.real()) > kTol) return;
    const double y = z.imag() / pi;
    const long j0 = static_cast<long>(std::floor(y));
    for (long j = j0 - 1; j <= j0 + 2; ++j) {
        for (Sign s : {Sign::Plus, Sign::Minus}) {
            auto [a, b] = vertical_segment(j, s);
            const double lo = std::min(a.imag(), b.imag()) - kTol;
            const double hi = std::max(a.imag(), b.imag()) + kTol;
            if (z.imag() >= lo && z.imag() <= hi) vertical_rays(kind, j, s, out);
        }
    }
}

void dedupe(std::vector<SignedAddress>& v) {
    std::sort(v.begin(), v.end(), [](const SignedAddress& a, const SignedAddress& b) {
        return format_signed(a) < format_signed(b);
    });
    v.erase(std::unique(v.begin(), v.end()), v.end());
}

} // namespace

std::vector<SignedAddress> signed_addresses_at(MapKind kind, cplx z, int depth) {
    std::vector<SignedAddress> out;
    rays_on_lines(kind, z, out);
    if (depth >= 1) rays_on_axis(kind, z, out);
    if (depth >= 2 && std::abs(z.real()) > kTol) {
        const Family F = family(kind);
        const cplx w = F.f(z);
        if (std::abs(w.real()) <= kTol * std::max(1.0, std::abs(w)) && std::abs(w.imag()) > kTol) {
            std::vector<SignedAddress> img;
            rays_on_lines(kind, cplx(0, w.imag()), img);
            rays_on_axis(kind, cplx(0, w.imag()), img);
            dedupe(img);
            if (w.imag() > 0) {
                // on the common boundary of two fundamental domains
                constexpr double eps = 1e-6;
                const Symbol up = domain_of(F.g, F.to_w(z + cplx(0, eps)));
                const Symbol lo = domain_of(F.g, F.to_w(z - cplx(0, eps)));
                for (const auto& r : img) {
                    const bool x_type = r.addr.symbol_at(0).side == Side::L;
                    const bool to_upper = (up.side == Side::R) == x_type;
                    out.push_back(SignedAddress{prepend(to_upper ? up : lo, r.addr), r.sign});
                }
            } else {
                const Symbol s = domain_of(F.g, F.to_w(z));
                for (const auto& r : img) out.push_back(SignedAddress{prepend(s, r.addr), r.sign});
            }
        }
    }
    dedupe(out);
    if (out.empty())
        throw Error("not_on_skeleton", "point is not on the axes or their first preimages",
                    "z = " + std::to_string(z.real()) + "," + std::to_string(z.imag()));
    return out;
}

} // namespace cosrays
