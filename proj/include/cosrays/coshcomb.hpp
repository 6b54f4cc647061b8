#pragma once

#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "cosrays/address.hpp"
#include "cosrays/raytrace.hpp"

namespace cosrays {

// Strip U_K: K*h < Im z < (K+1)*h with h = pi (cosh) or pi/2 (cosh2).
struct PartitionComponent {
    MapKind map_kind = MapKind::Cosh;
    long K = 0;
    bool operator==(const PartitionComponent&) const = default;
};

double strip_height(MapKind kind);

// Throws Error("boundary", ..., "line K") within 1e-9 of a strip boundary.
PartitionComponent component_of(MapKind kind, cplx z);

// Component whose closure contains the ray of sa (no numerics).
PartitionComponent first_component(MapKind kind, const SignedAddress& sa);

struct Itinerary {
    MapKind map_kind = MapKind::Cosh;
    std::vector<long> preperiod;
    std::vector<long> period;
    bool operator==(const Itinerary&) const = default;
};

Itinerary itinerary(MapKind kind, const SignedAddress& sa);
std::vector<long> itinerary_prefix(MapKind kind, const SignedAddress& sa, std::size_t length);

void to_json(nlohmann::json& j, const Itinerary& it);

// The two tails whose rays bound the strips: 0L 0R 0R ... and 0R 0R ...
const ExternalAddress& lower_boundary_tail();
const ExternalAddress& upper_boundary_tail();

bool ends_in_zero_r(const ExternalAddress& s);

enum class OverlapKind { SameRay, TailFromCritical, VerticalSegment, PreimageArc, DeeperArc, None };

std::string overlap_kind_name(OverlapKind k);

struct OverlapDescriptor {
    OverlapKind kind = OverlapKind::None;
    cplx critical_point{};      // TailFromCritical
    long K = 0;                 // VerticalSegment / PreimageArc: segment index
    Sign sign = Sign::Plus;     // which half of the segment
    long P = 0;                 // PreimageArc: lower of the two fundamental domains
    Side side = Side::R;        // PreimageArc
    std::size_t depth = 0;      // DeeperArc: number of stripped symbols
    std::vector<OverlapDescriptor> base; // DeeperArc: the table case reached (one element)

    bool operator==(const OverlapDescriptor&) const = default;
};

OverlapDescriptor overlap(MapKind kind, const SignedAddress& a, const SignedAddress& b);
bool lands_together(MapKind kind, const SignedAddress& a, const SignedAddress& b);
bool same_itinerary(MapKind kind, const SignedAddress& a, const SignedAddress& b);

void to_json(nlohmann::json& j, const OverlapDescriptor& d);

// Potential on b of the point at potential t on a, for rays overlapping per d.
// Equal potentials except across a preimage arc, where the heads' successors differ.
double corresponding_potential(const OverlapDescriptor& d, const SignedAddress& a, const SignedAddress& b, double t);

// Segment [K h' i, (K +- 1/2) h' i] of the imaginary axis carrying the
// vertical identification, h' = pi for both maps.
std::pair<cplx, cplx> vertical_segment(long K, Sign sign);

// Common tail of the two rays with address s (s must end in 0R 0R ...),
// from far out down to the split point; last point is the critical point.
std::vector<cplx> common_tail(MapKind kind, const ExternalAddress& s);

// Sampled curve of a PreimageArc descriptor (map coordinate).
std::vector<cplx> preimage_arc(MapKind kind, const OverlapDescriptor& d, std::size_t n = 101);

// Rays through z on the axes and their first preimages. Throws
// Error("not_on_skeleton") otherwise.
std::vector<SignedAddress> signed_addresses_at(MapKind kind, cplx z, int depth = 2);

} // namespace cosrays
