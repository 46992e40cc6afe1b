#pragma once

#include <optional>
#include <string>
#include <vector>

#include "doe/envelope.hpp"

namespace doe {

struct PQConstraints {
    std::optional<double> pf_limit; // power factor lower bound in (0,1]
    std::optional<double> s_max;    // apparent-power capacity, pu
    int disc_vertices = 64;         // inscribed polygon approximating the disc

    void validate() const;
};

struct PQPoint {
    double p = 0.0;
    double q = 0.0;
};

// One convex polygon per closed quadrant (counterclockwise vertices). A piece
// may be degenerate (segment or point) yet still feasible; `empty` means no
// feasible point exists at all.
struct PQRegion {
    std::vector<std::vector<PQPoint>> pieces; // size 4, quadrant order I..IV
    bool empty = true;
};

// DOE rectangle ∩ power-factor bowtie ∩ capacity disc, built per quadrant by
// half-plane clipping. The pf constraint admits the origin.
PQRegion build_region(const Envelope& p_env, const Envelope& q_env, const PQConstraints& c);

// Boundary-inclusive within 1e-9.
bool contains(const PQRegion& region, double p, double q);

double area(const PQRegion& region); // shoelace over pieces; empty -> 0

// JSON: per-quadrant vertex arrays, empty flag, area.
void save_region(const PQRegion& region, const std::string& path);
// CSV `piece,vertex_idx,p,q` for external plotting.
void save_region_points(const PQRegion& region, const std::string& path);

} // namespace doe
