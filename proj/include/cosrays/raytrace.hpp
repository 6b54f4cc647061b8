#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "cosrays/address.hpp"
#include "cosrays/cosine.hpp"
#include "cosrays/model.hpp"

namespace cosrays {

// ---- disjoint type: the certified conjugacy ---------------------------------

cplx project(const ModelPoint& x, double A);
double mu_bound(const NormalizedMap& nm);
cplx phi_n(const NormalizedMap& nm, const ModelPoint& x, std::size_t n);

struct PhiValue {
    cplx z;
    double err;
    std::size_t depth;
};

PhiValue phi(const NormalizedMap& nm, const ModelPoint& x, double tol);
std::size_t phi_depth(const NormalizedMap& nm, double tol);

// ---- cosh and cosh^2 -------------------------------------------------------

enum class MapKind { Cosh, Cosh2 };

// f = affine^{-1} o g o affine with w = alpha z + beta; cosh2 becomes cosh(w + 1).
struct Family {
    MapKind kind;
    CosineMap g;
    double alpha;
    double beta;

    cplx to_w(cplx z) const { return alpha * z + beta; }
    cplx to_z(cplx w) const { return (w - beta) / alpha; }
    cplx f(cplx z) const; // the map in its own coordinate
};

Family family(MapKind kind);
std::string kind_name(MapKind kind);

struct LiftOptions {
    Sign sign = Sign::Plus;
    bool stop_at_critical = false; // end the path where it runs into a critical value
};

struct LiftedPath {
    std::vector<cplx> points;
    bool hit_critical = false;
};

// Continue the preimage starting at z_start along the polyline `path` (in the image).
LiftedPath lift_path(const CosineMap& g, const std::vector<cplx>& path, cplx z_start, const LiftOptions& opt);

struct FamilyPoint {
    cplx z;   // in the map's own coordinate
    double err;
    std::size_t depth;
};

// Point of the canonical ray at potential t (throws "q_violation", "below_t_min").
FamilyPoint trace_family_point(const Family& F, const SignedAddress& sa, double t);

// ---- polylines -------------------------------------------------------------

struct MapSpec {
    std::string id;
    std::optional<MapKind> kind; // cosh / cosh2
    CosineMap map;               // the unscaled map for a custom spec
};

MapSpec parse_map_spec(const std::string& text);

// "1.5", "2i", "1-0.5i"; throws Error("usage").
cplx parse_complex(const std::string& text);

struct RaySample {
    double t;
    cplx z;
    double err;
};

struct RejectedSample {
    double t;
    std::string reason;
};

struct RayPolyline {
    std::string map_id;
    SignedAddress addr;
    std::vector<RaySample> samples;
    std::vector<RejectedSample> rejected;
    std::size_t depth_used = 0;
};

RayPolyline trace_ray(const MapSpec& spec, const SignedAddress& sa, double t_lo, double t_hi, std::size_t n_samples,
                      double tol, unsigned jobs = 1);

struct Endpoint {
    cplx z;
    bool stabilized = false;
    std::size_t iterations = 0;
    double last_delta = 0;
};

Endpoint endpoint_estimate(const MapSpec& spec, const SignedAddress& sa, double tol);

} // namespace cosrays
